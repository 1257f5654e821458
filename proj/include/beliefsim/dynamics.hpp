#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beliefsim/belief.hpp"
#include "beliefsim/config.hpp"
#include "beliefsim/metrics.hpp"
#include "beliefsim/population.hpp"
#include "beliefsim/rng.hpp"

namespace beliefsim {

// Documents produced in one step, stored flat: document j occupies
// coords[j*dims, (j+1)*dims). Ids are positions in this pool.
class DocumentPool {
public:
    DocumentPool(std::uint32_t dims, std::uint64_t step) : dims_(dims), step_(step) {}

    std::uint32_t dims() const noexcept { return dims_; }
    std::uint64_t step() const noexcept { return step_; }
    std::size_t size() const noexcept { return sources_.size(); }

    std::span<const double> position(std::size_t j) const {
        return {coords_.data() + j * dims_, dims_};
    }
    std::uint32_t source_id(std::size_t j) const { return sources_[j]; }
    bool is_misinformation(std::size_t j) const { return misinformation_[j] != 0; }
    Document document(std::size_t j) const;

    void add(std::span<const double> position, std::uint32_t source_id, bool misinformation);
    void reserve(std::size_t n);

private:
    std::uint32_t dims_;
    std::uint64_t step_;
    std::vector<double> coords_;
    std::vector<std::uint32_t> sources_;
    std::vector<std::uint8_t> misinformation_;
};

struct ConsumptionRecord {
    std::uint32_t agent_id = 0;
    std::size_t curated_count = 0;
    std::vector<std::uint32_t> consumed_ids;
    double coverage = 0.0;
};

// Genuine documents first, then misinformation. Sampled mode draws n_docs
// documents (round_half_up(r * n_docs) of them misinformation placed at
// uniformly chosen committed agents). Mirror mode emits one document per
// free agent plus round_half_up(r * n_free) misinformation documents cycling
// over committed agents. Throws ConfigError if misinformation is requested
// without committed agents.
DocumentPool produce_documents(const SimState& state, const SimConfig& config, Rng& rng);

// Ids of documents within the agent's visibility radius, ascending.
std::vector<std::uint32_t> curate_for_agent(const Agent& agent, const DocumentPool& pool);

// The min(k, |curated|) curated documents nearest the agent; equal distances
// resolved by lower id. consumed_ids are ordered by (distance, id).
ConsumptionRecord consume_biased(const Agent& agent, std::span<const std::uint32_t> curated,
                                 const DocumentPool& pool);

// Single pass equivalent of consume_biased(agent, curate_for_agent(agent, pool), pool).
ConsumptionRecord consume_nearest_in_radius(const Agent& agent, const DocumentPool& pool);

// Index over a one-dimensional pool sorted by coordinate. Along either side
// of a query point the computed distance is non-decreasing, so radius counts
// and nearest-k selection need only a binary search and an outward merge.
// Results are identical to consume_nearest_in_radius, ties included.
class LinePoolIndex {
public:
    // Throws std::invalid_argument unless pool.dims() == 1.
    explicit LinePoolIndex(const DocumentPool& pool);

    ConsumptionRecord consume_nearest_in_radius(const Agent& agent) const;

private:
    const DocumentPool* pool_;
    std::vector<std::uint32_t> order_;  // ids sorted by (coordinate, id)
    std::vector<double> coords_;        // coordinates in `order_` order
};

// min(k, |curated|) distinct curated documents, uniformly without replacement
// (partial Fisher-Yates in draw order).
ConsumptionRecord consume_uniform(const Agent& agent, std::span<const std::uint32_t> curated,
                                  const DocumentPool& pool, Rng& rng);

// eta(y) = ||y|| + epsilon.
double influence_weight(std::span<const double> position, double epsilon);
inline double influence_weight(const Document& doc, double epsilon) {
    return influence_weight(doc.position, epsilon);
}

// x' = alpha x + (1 - alpha) * sum(eta(y) y) / sum(eta(y)). Committed agents
// and empty consumption leave the position unchanged.
BeliefVector update_belief(const Agent& agent, std::span<const Document> consumed, double alpha,
                           double epsilon);
BeliefVector update_belief(const Agent& agent, const DocumentPool& pool,
                           std::span<const std::uint32_t> consumed, double alpha,
                           double epsilon);

struct StepResult {
    SimState state;
    StepTrace trace;
};

// One synchronous step: every free agent curates and consumes from the pool
// produced at time t, and all updates read time-t positions. Committed agents
// neither consume nor move.
StepResult step(const SimState& state, const SimConfig& config);

struct Snapshot {
    std::uint64_t t = 0;
    std::vector<BeliefVector> positions;  // indexed by agent id
};

struct RunResult {
    SimState final_state;
    std::vector<StepTrace> traces;
    std::vector<Snapshot> snapshots;
    bool converged = false;
    std::uint64_t steps_run = 0;
};

// Steps until t_max or until max_delta < conv_tol for conv_window
// consecutive steps. Snapshots are taken whenever t is a multiple of
// snapshot_every, and at the final step.
RunResult run(const SimState& initial, const SimConfig& config);

}  // namespace beliefsim
