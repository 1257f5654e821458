#include "beliefsim/population.hpp"

#include <cmath>

namespace beliefsim {

std::size_t SimState::n_free() const noexcept {
    std::size_t n = 0;
    for (const auto& a : agents) n += a.committed ? 0 : 1;
    return n;
}

std::vector<BeliefVector> SimState::free_positions() const {
    std::vector<BeliefVector> out;
    out.reserve(agents.size());
    for (const auto& a : agents) {
        if (!a.committed) out.push_back(a.position);
    }
    return out;
}

BeliefVector sample_in_ball(std::uint32_t dims, double radius, Rng& rng) {
    BeliefVector v(dims);
    if (radius == 0.0) return v;
    double len = 0.0;
    do {
        for (std::uint32_t i = 0; i < dims; ++i) v[i] = rng.normal();
        len = norm(v);
    } while (len == 0.0);
    const double r = dims == 1 ? rng.uniform01()
                               : std::pow(rng.uniform01(), 1.0 / static_cast<double>(dims));
    const double scale = radius * r / len;
    for (std::uint32_t i = 0; i < dims; ++i) v[i] *= scale;
    return v;
}

BeliefVector committed_position(std::uint32_t dims, double magnitude, std::uint32_t j) {
    BeliefVector v(dims);
    v[0] = (j % 2 == 0) ? magnitude : -magnitude;
    return v;
}

SimState init_population(const SimConfig& config) {
    validate(config);
    SimState state;
    state.seed = config.seed;
    Rng rng = substream(config.seed, StreamPurpose::Initialization);

    const std::uint32_t n_free = config.n_free();
    std::uint32_t n_biased = n_free;
    switch (config.consumer_kind) {
        case ConsumerPolicy::Biased: n_biased = n_free; break;
        case ConsumerPolicy::Uniform: n_biased = 0; break;
        case ConsumerPolicy::Mixed:
            n_biased = static_cast<std::uint32_t>(round_half_up(config.p_biased * n_free));
            break;
    }

    state.agents.reserve(config.n_agents);
    for (std::uint32_t i = 0; i < config.n_agents; ++i) {
        Agent a;
        a.id = i;
        a.visibility_radius = config.visibility_radius;
        a.capacity = config.capacity_k;
        if (i < n_free) {
            a.position = sample_in_ball(config.dims, config.init_spread, rng);
            a.consumer_kind = i < n_biased ? ConsumerKind::Biased : ConsumerKind::Uniform;
        } else {
            a.position = committed_position(config.dims, config.committed_magnitude, i - n_free);
            a.committed = true;
        }
        state.agents.push_back(std::move(a));
    }
    return state;
}

}  // namespace beliefsim
