#include "beliefsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace beliefsim {

namespace {

// Components at or below this magnitude do not decide the axis sign.
constexpr double kSignThreshold = 1e-12;

BeliefVector unit_axis(std::size_t dims) {
    BeliefVector e(dims);
    if (dims > 0) e[0] = 1.0;
    return e;
}

void fix_sign(std::vector<double>& v) {
    for (double c : v) {
        if (std::abs(c) > kSignThreshold) {
            if (c < 0.0) {
                for (double& x : v) x = -x;
            }
            return;
        }
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

BeliefVector centroid(std::span<const BeliefVector> points) {
    const std::size_t dims = points.front().dims();
    BeliefVector c(dims);
    for (const auto& p : points) {
        for (std::size_t i = 0; i < dims; ++i) c[i] += p[i];
    }
    for (std::size_t i = 0; i < dims; ++i) c[i] /= static_cast<double>(points.size());
    return c;
}

std::array<BeliefVector, 2> label_centroids(std::span<const BeliefVector> points,
                                            const std::vector<std::uint8_t>& labels,
                                            std::array<std::size_t, 2>& counts) {
    const std::size_t dims = points.front().dims();
    std::array<BeliefVector, 2> c{BeliefVector(dims), BeliefVector(dims)};
    counts = {0, 0};
    for (std::size_t j = 0; j < points.size(); ++j) {
        const auto l = labels[j];
        ++counts[l];
        for (std::size_t i = 0; i < dims; ++i) c[l][i] += points[j][i];
    }
    for (int l = 0; l < 2; ++l) {
        if (counts[l] == 0) continue;
        for (std::size_t i = 0; i < dims; ++i) c[l][i] /= static_cast<double>(counts[l]);
    }
    return c;
}

struct LloydResult {
    std::array<BeliefVector, 2> centroids;
    double sse = 0.0;
};

// Lloyd iterations from the given labels until the assignment is a fixed
// point; empty if a cluster is empty at the start.
std::optional<LloydResult> lloyd(std::span<const BeliefVector> positions,
                                 std::vector<std::uint8_t> labels) {
    const std::size_t n = positions.size();
    std::array<std::size_t, 2> counts{};
    std::array<BeliefVector, 2> centroids = label_centroids(positions, labels, counts);
    if (counts[0] == 0 || counts[1] == 0) return std::nullopt;

    for (int iter = 0; iter < kLloydMaxIter; ++iter) {
        bool changed = false;
        std::vector<std::uint8_t> next = labels;
        for (std::size_t j = 0; j < n; ++j) {
            const double d0 = squared_distance(positions[j], centroids[0]);
            const double d1 = squared_distance(positions[j], centroids[1]);
            const std::uint8_t l = d0 < d1 ? 0 : (d1 < d0 ? 1 : labels[j]);
            if (l != labels[j]) {
                next[j] = l;
                changed = true;
            }
        }
        if (!changed) break;
        std::array<std::size_t, 2> next_counts{};
        auto next_centroids = label_centroids(positions, next, next_counts);
        if (next_counts[0] == 0 || next_counts[1] == 0) break;
        labels.swap(next);
        centroids = std::move(next_centroids);
    }

    LloydResult r;
    for (std::size_t j = 0; j < n; ++j) r.sse += squared_distance(positions[j], centroids[labels[j]]);
    r.centroids = std::move(centroids);
    return r;
}

// Labels for the threshold on `proj` with the smallest within-group sum of
// squares, or empty when all projections coincide.
std::optional<std::vector<std::uint8_t>> best_axis_split(const std::vector<double>& proj) {
    const std::size_t n = proj.size();
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return proj[a] < proj[b] || (proj[a] == proj[b] && a < b);
    });
    double total = 0.0;
    for (double x : proj) total += x;

    // Splitting after the i-th smallest leaves a between-group term
    // (s^2 / i + (T - s)^2 / (n - i)); maximizing it minimizes the SSE.
    double prefix = 0.0, best_gain = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 1; i < n; ++i) {
        prefix += proj[order[i - 1]];
        if (proj[order[i - 1]] == proj[order[i]]) continue;
        const double rest = total - prefix;
        const double gain = prefix * prefix / static_cast<double>(i) +
                            rest * rest / static_cast<double>(n - i);
        if (gain > best_gain) {
            best_gain = gain;
            best_i = i;
        }
    }
    if (best_i == 0) return std::nullopt;
    std::vector<std::uint8_t> labels(n, 0);
    for (std::size_t i = best_i; i < n; ++i) labels[order[i]] = 1;
    return labels;
}

}  // namespace

BeliefVector principal_axis(std::span<const BeliefVector> positions) {
    if (positions.empty()) throw std::invalid_argument("principal_axis: no positions");
    const std::size_t dims = positions.front().dims();
    if (dims == 1 || positions.size() < 2) return unit_axis(dims);

    const BeliefVector mean = centroid(positions);
    std::vector<double> cov(dims * dims, 0.0);
    for (const auto& p : positions) {
        for (std::size_t a = 0; a < dims; ++a) {
            const double da = p[a] - mean[a];
            for (std::size_t b = 0; b < dims; ++b) cov[a * dims + b] += da * (p[b] - mean[b]);
        }
    }
    const double scale = 1.0 / static_cast<double>(positions.size() - 1);
    for (double& c : cov) c *= scale;

    // Start from the covariance column with the largest norm; it has a
    // nonzero component along the dominant eigenvector unless the column
    // space is degenerate.
    std::size_t best = 0;
    double best_norm = 0.0;
    for (std::size_t b = 0; b < dims; ++b) {
        double s = 0.0;
        for (std::size_t a = 0; a < dims; ++a) s += cov[a * dims + b] * cov[a * dims + b];
        if (s > best_norm) {
            best_norm = s;
            best = b;
        }
    }
    if (best_norm == 0.0) return unit_axis(dims);

    std::vector<double> v(dims), w(dims);
    for (std::size_t a = 0; a < dims; ++a) v[a] = cov[a * dims + best] / std::sqrt(best_norm);
    fix_sign(v);
    for (int iter = 0; iter < kPowerIterationMaxIter; ++iter) {
        for (std::size_t a = 0; a < dims; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < dims; ++b) s += cov[a * dims + b] * v[b];
            w[a] = s;
        }
        const double len = std::sqrt(dot(w, w));
        if (len == 0.0) return unit_axis(dims);
        for (double& x : w) x /= len;
        fix_sign(w);
        const double change = std::sqrt(squared_distance(w, v));
        v.swap(w);
        if (change < kPowerIterationTol) break;
    }
    return BeliefVector(std::move(v));
}

Polarization polarization_q(std::span<const BeliefVector> positions) {
    Polarization out;
    if (positions.empty()) return out;
    if (positions.size() == 1) {
        out.centroids = {positions.front(), positions.front()};
        return out;
    }
    const std::size_t n = positions.size();
    const BeliefVector axis = principal_axis(positions);
    const BeliefVector mean = centroid(positions);

    std::vector<double> proj(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < mean.dims(); ++i) s += (positions[j][i] - mean[i]) * axis[i];
        proj[j] = s;
    }

    std::vector<std::uint8_t> labels(n);
    std::size_t positives = 0;
    for (std::size_t j = 0; j < n; ++j) {
        labels[j] = proj[j] > 0.0 ? 1 : 0;
        positives += labels[j];
    }
    if (positives == 0 || positives == n) {
        std::vector<double> sorted = proj;
        std::sort(sorted.begin(), sorted.end());
        const double median =
            n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        for (std::size_t j = 0; j < n; ++j) labels[j] = proj[j] > median ? 1 : 0;
    }

    std::optional<LloydResult> best = lloyd(positions, std::move(labels));
    if (!best) {
        out.centroids = {mean, mean};
        return out;
    }
    // Lloyd stops at the first fixed point. A second start from the best
    // threshold along the axis finds the global optimum when K = 1.
    if (auto split = best_axis_split(proj)) {
        auto alt = lloyd(positions, std::move(*split));
        if (alt && alt->sse < best->sse) best = std::move(alt);
    }
    std::array<BeliefVector, 2>& centroids = best->centroids;

    // Centroids of unit-ball points stay in the ball; rounding alone can push
    // the gap an ulp past 2.
    out.q = std::min(1.0, 0.5 * std::sqrt(squared_distance(centroids[0], centroids[1])));
    out.centroids = std::move(centroids);
    return out;
}

std::vector<std::uint64_t> belief_histogram(std::span<const BeliefVector> positions,
                                            const BeliefVector& axis, std::uint32_t bins) {
    if (bins == 0) throw std::invalid_argument("belief_histogram: bins must be positive");
    std::vector<std::uint64_t> counts(bins, 0);
    for (const auto& p : positions) {
        if (p.dims() != axis.dims()) {
            throw std::invalid_argument("belief_histogram: dimension mismatch");
        }
        double x = dot(p, axis);
        if (!(x >= -1.0 - kUnitBallSlack && x <= 1.0 + kUnitBallSlack)) {
            throw std::invalid_argument("belief_histogram: projection " + std::to_string(x) +
                                        " outside [-1, 1]");
        }
        x = std::clamp(x, -1.0, 1.0);
        auto idx = static_cast<std::size_t>(std::floor((x + 1.0) * 0.5 * bins));
        counts[std::min<std::size_t>(idx, bins - 1)] += 1;
    }
    return counts;
}

double mean_extremity(std::span<const BeliefVector> positions) {
    if (positions.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : positions) s += norm(p);
    return s / static_cast<double>(positions.size());
}

bool has_converged(std::span<const StepTrace> traces, double tol, std::uint32_t window) {
    if (traces.size() < window) return false;
    return std::all_of(traces.end() - window, traces.end(),
                       [tol](const StepTrace& t) { return t.max_delta < tol; });
}

}  // namespace beliefsim
