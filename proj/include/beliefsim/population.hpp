#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beliefsim/belief.hpp"
#include "beliefsim/config.hpp"
#include "beliefsim/rng.hpp"

namespace beliefsim {

// Population at time t. Free agents carry ids 0..n_free-1 and committed agents
// follow them. Random draws for step t come from substreams of `seed`, so the
// state plus the config fully determine the rest of the run.
struct SimState {
    std::uint64_t time = 0;
    std::vector<Agent> agents;
    std::uint64_t seed = 0;

    std::size_t n_free() const noexcept;
    std::vector<BeliefVector> free_positions() const;
};

// Uniform draw from the K-ball of the given radius: Gaussian direction times
// radius * U^(1/K).
BeliefVector sample_in_ball(std::uint32_t dims, double radius, Rng& rng);

// Position of the j-th committed agent: alternating +/- magnitude along e1.
BeliefVector committed_position(std::uint32_t dims, double magnitude, std::uint32_t j);

// Initial population. Consumes only the initialization substream of
// config.seed.
SimState init_population(const SimConfig& config);

}  // namespace beliefsim
