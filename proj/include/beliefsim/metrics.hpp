#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "beliefsim/belief.hpp"

namespace beliefsim {

struct StepTrace {
    std::uint64_t t = 0;
    double q = 0.0;
    double mean_extremity = 0.0;
    double mean_coverage = 0.0;
    double max_delta = 0.0;
    std::array<BeliefVector, 2> cluster_centroids;
};

struct Polarization {
    // Half the distance between the two 2-means centroids; 0 at consensus,
    // 1 for an antipodal split across the unit ball.
    double q = 0.0;
    std::array<BeliefVector, 2> centroids;
};

inline constexpr double kPowerIterationTol = 1e-10;
inline constexpr int kPowerIterationMaxIter = 1000;
inline constexpr int kLloydMaxIter = 1000;

// Dominant eigenvector of the sample covariance by power iteration, with the
// first nonzero component made positive. Returns e1 for K = 1, for fewer than
// two points, and when the covariance vanishes.
BeliefVector principal_axis(std::span<const BeliefVector> positions);

// Two-means split refined by Lloyd iterations in the full space, started
// from (a) the sign of each point's centered projection on the principal axis
// (median split if every projection has the same sign) and (b) the threshold
// on that projection with the least within-group variance. The start with
// the lower final SSE wins, (a) on ties. Exact for K = 1. Deterministic.
Polarization polarization_q(std::span<const BeliefVector> positions);

// Counts of projections onto `axis` in `bins` equal-width bins over [-1, 1].
// Values on an interior edge go to the right bin; +1 lands in the last bin.
// Throws std::invalid_argument if a projection leaves [-1, 1] by more than
// kUnitBallSlack or bins == 0.
std::vector<std::uint64_t> belief_histogram(std::span<const BeliefVector> positions,
                                            const BeliefVector& axis, std::uint32_t bins);

double mean_extremity(std::span<const BeliefVector> positions);

// True iff the last `window` traces all have max_delta < tol.
bool has_converged(std::span<const StepTrace> traces, double tol, std::uint32_t window);

}  // namespace beliefsim
