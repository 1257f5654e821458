#include "beliefsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

namespace beliefsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest t with sqrt(t) <= x. sqrt is correctly rounded and monotone, so
// sqrt(s) <= x exactly when s <= sqrt_preimage_bound(x); this lets scans
// compare squared distances without changing any decision.
double sqrt_preimage_bound(double x) {
    if (x < 0.0) return -1.0;
    if (std::isinf(x)) return x;
    double t = x * x;
    if (std::isinf(t)) t = std::numeric_limits<double>::max();
    while (std::sqrt(t) > x) t = std::nextafter(t, 0.0);
    for (double up = std::nextafter(t, kInf); std::sqrt(up) <= x; up = std::nextafter(t, kInf)) {
        t = up;
    }
    return t;
}

// Squared distances from x to every pool document, summed in the same order
// as distance().
template <std::size_t Dims>
void squared_distances_fixed(const double* __restrict x, const double* __restrict coords,
                             std::size_t n, double* __restrict out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double* y = coords + j * Dims;
        double sum = 0.0;
        for (std::size_t i = 0; i < Dims; ++i) {
            const double d = x[i] - y[i];
            sum += d * d;
        }
        out[j] = sum;
    }
}

void squared_distances(const double* x, const DocumentPool& pool, std::vector<double>& out) {
    const std::size_t n = pool.size();
    const std::size_t dims = pool.dims();
    out.resize(n);
    if (n == 0) return;
    const double* coords = pool.position(0).data();
    switch (dims) {
        case 1: squared_distances_fixed<1>(x, coords, n, out.data()); return;
        case 2: squared_distances_fixed<2>(x, coords, n, out.data()); return;
        case 3: squared_distances_fixed<3>(x, coords, n, out.data()); return;
        default:
            for (std::size_t j = 0; j < n; ++j) {
                const double* y = coords + j * dims;
                double sum = 0.0;
                for (std::size_t i = 0; i < dims; ++i) {
                    const double d = x[i] - y[i];
                    sum += d * d;
                }
                out[j] = sum;
            }
    }
}

using Candidate = std::pair<double, std::uint32_t>;  // (distance, doc id)

// Keeps the k smallest candidates by (distance, id) in a max-heap.
class NearestK {
public:
    explicit NearestK(std::size_t k) : k_(k) { heap_.reserve(k); }

    // Returns true if the candidate was kept.
    bool offer(double d, std::uint32_t id) {
        if (k_ == 0) return false;
        const Candidate c{d, id};
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
            return true;
        }
        if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
            return true;
        }
        return false;
    }

    bool full() const noexcept { return heap_.size() == k_; }
    double worst() const noexcept { return heap_.front().first; }

    std::vector<std::uint32_t> ids_in_order() {
        std::sort_heap(heap_.begin(), heap_.end());
        std::vector<std::uint32_t> ids;
        ids.reserve(heap_.size());
        for (const auto& c : heap_) ids.push_back(c.second);
        return ids;
    }

private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

double coverage_of(std::size_t consumed, std::size_t pool_size) {
    return pool_size == 0 ? 0.0 : static_cast<double>(consumed) / static_cast<double>(pool_size);
}

void check_dims(const Agent& agent, const DocumentPool& pool) {
    if (agent.position.dims() != pool.dims()) {
        throw std::invalid_argument("agent and document pool dimensionality differ");
    }
}

template <typename PositionOf>
BeliefVector weighted_update(const BeliefVector& x, std::size_t count, PositionOf position_of,
                             double alpha, double epsilon) {
    const std::size_t dims = x.dims();
    std::vector<double> num(dims, 0.0);
    double den = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        std::span<const double> y = position_of(j);
        if (y.size() != dims) throw std::invalid_argument("consumed document dimensionality differs");
        const double w = influence_weight(y, epsilon);
        for (std::size_t i = 0; i < dims; ++i) num[i] += w * y[i];
        den += w;
    }
    BeliefVector out(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        out[i] = alpha * x[i] + (1.0 - alpha) * (num[i] / den);
    }
    return out;
}

}  // namespace

Document DocumentPool::document(std::size_t j) const {
    return Document{static_cast<std::uint32_t>(j), BeliefVector(position(j)), sources_[j],
                    misinformation_[j] != 0};
}

void DocumentPool::add(std::span<const double> position, std::uint32_t source_id,
                       bool misinformation) {
    if (position.size() != dims_) throw std::invalid_argument("document dimensionality differs");
    coords_.insert(coords_.end(), position.begin(), position.end());
    sources_.push_back(source_id);
    misinformation_.push_back(misinformation ? 1 : 0);
}

void DocumentPool::reserve(std::size_t n) {
    coords_.reserve(n * dims_);
    sources_.reserve(n);
    misinformation_.reserve(n);
}

DocumentPool produce_documents(const SimState& state, const SimConfig& config, Rng& rng) {
    std::vector<const Agent*> free_agents;
    std::vector<const Agent*> committed;
    for (const auto& a : state.agents) (a.committed ? committed : free_agents).push_back(&a);

    const std::uint32_t n_mis = misinformation_count(config);
    if (n_mis > 0 && committed.empty()) {
        throw ConfigError("misinformation requested but there are no committed agents");
    }

    DocumentPool pool(config.dims, state.time);
    if (config.production_mode == ProductionMode::Mirror) {
        pool.reserve(free_agents.size() + n_mis);
        for (const Agent* a : free_agents) pool.add(a->position, a->id, false);
        for (std::uint32_t j = 0; j < n_mis; ++j) {
            const Agent* src = committed[j % committed.size()];
            pool.add(src->position, src->id, true);
        }
        return pool;
    }

    if (free_agents.empty() && n_mis < config.n_docs) {
        throw ConfigError("sampled production needs at least one free agent");
    }
    pool.reserve(config.n_docs);
    for (std::uint32_t j = 0; j < config.n_docs - n_mis; ++j) {
        const Agent* src = free_agents[rng.index(free_agents.size())];
        pool.add(src->position, src->id, false);
    }
    for (std::uint32_t j = 0; j < n_mis; ++j) {
        const Agent* src = committed[rng.index(committed.size())];
        pool.add(src->position, src->id, true);
    }
    return pool;
}

std::vector<std::uint32_t> curate_for_agent(const Agent& agent, const DocumentPool& pool) {
    check_dims(agent, pool);
    std::vector<std::uint32_t> ids;
    for (std::size_t j = 0; j < pool.size(); ++j) {
        if (distance(agent.position, pool.position(j)) <= agent.visibility_radius) {
            ids.push_back(static_cast<std::uint32_t>(j));
        }
    }
    return ids;
}

ConsumptionRecord consume_biased(const Agent& agent, std::span<const std::uint32_t> curated,
                                 const DocumentPool& pool) {
    check_dims(agent, pool);
    NearestK nearest(agent.capacity);
    for (std::uint32_t id : curated) nearest.offer(distance(agent.position, pool.position(id)), id);
    ConsumptionRecord rec;
    rec.agent_id = agent.id;
    rec.curated_count = curated.size();
    rec.consumed_ids = nearest.ids_in_order();
    rec.coverage = coverage_of(rec.consumed_ids.size(), pool.size());
    return rec;
}

ConsumptionRecord consume_nearest_in_radius(const Agent& agent, const DocumentPool& pool) {
    check_dims(agent, pool);
    const double* x = agent.position.view().data();
    const std::size_t k = agent.capacity;
    const double radius_sq = sqrt_preimage_bound(agent.visibility_radius);

    thread_local std::vector<double> sq;
    squared_distances(x, pool, sq);

    NearestK nearest(k);
    double admit_sq = radius_sq;
    std::size_t curated = 0;
    for (std::size_t j = 0; j < sq.size(); ++j) {
        curated += sq[j] <= radius_sq ? 1 : 0;
        if (sq[j] > admit_sq) continue;
        if (nearest.offer(std::sqrt(sq[j]), static_cast<std::uint32_t>(j)) && nearest.full()) {
            admit_sq = std::min(radius_sq, sqrt_preimage_bound(nearest.worst()));
        }
    }
    ConsumptionRecord rec;
    rec.agent_id = agent.id;
    rec.curated_count = curated;
    rec.consumed_ids = nearest.ids_in_order();
    rec.coverage = coverage_of(rec.consumed_ids.size(), pool.size());
    return rec;
}

LinePoolIndex::LinePoolIndex(const DocumentPool& pool) : pool_(&pool) {
    if (pool.dims() != 1) throw std::invalid_argument("LinePoolIndex needs a one-dimensional pool");
    order_.resize(pool.size());
    for (std::size_t j = 0; j < order_.size(); ++j) order_[j] = static_cast<std::uint32_t>(j);
    std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double ya = pool.position(a)[0], yb = pool.position(b)[0];
        return ya < yb || (ya == yb && a < b);
    });
    coords_.reserve(order_.size());
    for (std::uint32_t id : order_) coords_.push_back(pool.position(id)[0]);
}

ConsumptionRecord LinePoolIndex::consume_nearest_in_radius(const Agent& agent) const {
    check_dims(agent, *pool_);
    const double x = agent.position[0];
    const double radius = agent.visibility_radius;
    // Same arithmetic as distance() for K = 1.
    auto dist = [x](double y) {
        const double d = x - y;
        return std::sqrt(0.0 + d * d);
    };

    const std::ptrdiff_t split = std::lower_bound(coords_.begin(), coords_.end(), x) - coords_.begin();
    // Right side [split, n): distance non-decreasing with index.
    const std::ptrdiff_t right_end =
        std::partition_point(coords_.begin() + split, coords_.end(),
                             [&](double y) { return dist(y) <= radius; }) -
        coords_.begin();
    // Left side [0, split): distance non-increasing with index.
    const std::ptrdiff_t left_begin =
        std::partition_point(coords_.begin(), coords_.begin() + split,
                             [&](double y) { return dist(y) > radius; }) -
        coords_.begin();

    ConsumptionRecord rec;
    rec.agent_id = agent.id;
    rec.curated_count = static_cast<std::size_t>(right_end - left_begin);

    // Merge outward in distance order. Once k documents are taken, keep taking
    // only those tied with the last distance so that ties are settled by id.
    const std::size_t k = agent.capacity;
    std::vector<Candidate> taken;
    std::ptrdiff_t l = split - 1, r = split;
    double last = -1.0;
    while (l >= left_begin || r < right_end) {
        const double dl = l >= left_begin ? dist(coords_[l]) : kInf;
        const double dr = r < right_end ? dist(coords_[r]) : kInf;
        const double d = std::min(dl, dr);
        if (taken.size() >= k && d > last) break;
        if (dl <= dr) {
            taken.emplace_back(dl, order_[l--]);
        } else {
            taken.emplace_back(dr, order_[r++]);
        }
        last = d;
    }
    std::sort(taken.begin(), taken.end());
    if (taken.size() > k) taken.resize(k);
    rec.consumed_ids.reserve(taken.size());
    for (const auto& c : taken) rec.consumed_ids.push_back(c.second);
    rec.coverage = coverage_of(rec.consumed_ids.size(), pool_->size());
    return rec;
}

ConsumptionRecord consume_uniform(const Agent& agent, std::span<const std::uint32_t> curated,
                                  const DocumentPool& pool, Rng& rng) {
    check_dims(agent, pool);
    std::vector<std::uint32_t> ids(curated.begin(), curated.end());
    const std::size_t take = std::min<std::size_t>(agent.capacity, ids.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.index(ids.size() - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(take);
    ConsumptionRecord rec;
    rec.agent_id = agent.id;
    rec.curated_count = curated.size();
    rec.consumed_ids = std::move(ids);
    rec.coverage = coverage_of(take, pool.size());
    return rec;
}

double influence_weight(std::span<const double> position, double epsilon) {
    return norm(position) + epsilon;
}

BeliefVector update_belief(const Agent& agent, std::span<const Document> consumed, double alpha,
                           double epsilon) {
    if (agent.committed || consumed.empty()) return agent.position;
    return weighted_update(
        agent.position, consumed.size(),
        [&](std::size_t j) { return consumed[j].position.view(); }, alpha, epsilon);
}

BeliefVector update_belief(const Agent& agent, const DocumentPool& pool,
                           std::span<const std::uint32_t> consumed, double alpha,
                           double epsilon) {
    if (agent.committed || consumed.empty()) return agent.position;
    return weighted_update(
        agent.position, consumed.size(), [&](std::size_t j) { return pool.position(consumed[j]); },
        alpha, epsilon);
}

StepResult step(const SimState& state, const SimConfig& config) {
    Rng production = substream(state.seed, StreamPurpose::Production, state.time);
    const DocumentPool pool = produce_documents(state, config, production);

    StepResult out;
    out.state.time = state.time + 1;
    out.state.seed = state.seed;
    out.state.agents = state.agents;

    std::size_t consumed_total = 0;
    std::size_t n_free = 0;
    double max_delta = 0.0;
    std::vector<BeliefVector> free_positions;
    free_positions.reserve(state.agents.size());

    std::optional<LinePoolIndex> line_index;
    if (pool.dims() == 1) line_index.emplace(pool);

    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        const Agent& agent = state.agents[i];
        if (agent.committed) continue;
        ConsumptionRecord rec;
        if (agent.consumer_kind == ConsumerKind::Biased) {
            rec = line_index ? line_index->consume_nearest_in_radius(agent)
                             : consume_nearest_in_radius(agent, pool);
        } else {
            Rng rng = substream(state.seed, StreamPurpose::Consumption, state.time, agent.id);
            rec = consume_uniform(agent, curate_for_agent(agent, pool), pool, rng);
        }
        BeliefVector next =
            update_belief(agent, pool, rec.consumed_ids, config.alpha, config.epsilon_influence);
        if (!is_valid_belief(next)) {
            throw std::logic_error("belief update left the unit ball for agent " +
                                   std::to_string(agent.id));
        }
        max_delta = std::max(max_delta, distance(agent.position, next));
        consumed_total += rec.consumed_ids.size();
        ++n_free;
        free_positions.push_back(next);
        out.state.agents[i].position = std::move(next);
    }

    StepTrace& trace = out.trace;
    trace.t = out.state.time;
    trace.max_delta = max_delta;
    // One division of exact integer totals: equals k / |pool| bitwise when
    // every agent consumes k documents.
    trace.mean_coverage =
        n_free == 0 || pool.size() == 0
            ? 0.0
            : static_cast<double>(consumed_total) /
                  (static_cast<double>(n_free) * static_cast<double>(pool.size()));
    trace.mean_extremity = mean_extremity(free_positions);
    Polarization pol = polarization_q(free_positions);
    trace.q = pol.q;
    trace.cluster_centroids = std::move(pol.centroids);
    return out;
}

RunResult run(const SimState& initial, const SimConfig& config) {
    validate(config);
    RunResult result;
    result.final_state = initial;
    SimState& state = result.final_state;

    auto take_snapshot = [&] {
        Snapshot snap;
        snap.t = state.time;
        snap.positions.reserve(state.agents.size());
        for (const auto& a : state.agents) snap.positions.push_back(a.position);
        result.snapshots.push_back(std::move(snap));
    };

    if (state.time % config.snapshot_every == 0) take_snapshot();
    const bool check_convergence = std::isfinite(config.conv_tol);

    while (result.steps_run < config.t_max) {
        StepResult next = step(state, config);
        state = std::move(next.state);
        result.traces.push_back(std::move(next.trace));
        ++result.steps_run;
        if (state.time % config.snapshot_every == 0) take_snapshot();
        if (check_convergence &&
            has_converged(result.traces, config.conv_tol, config.conv_window)) {
            result.converged = true;
            break;
        }
    }
    if (result.snapshots.empty() || result.snapshots.back().t != state.time) take_snapshot();
    return result;
}

}  // namespace beliefsim
