#include "beliefsim/config.hpp"

#include <cmath>

namespace beliefsim {

std::uint64_t round_half_up(double x) {
    if (!(x >= 0.0)) return 0;
    return static_cast<std::uint64_t>(std::floor(x + 0.5 + 1e-9));
}

std::uint32_t misinformation_count(const SimConfig& config) {
    const std::uint32_t base =
        config.production_mode == ProductionMode::Mirror ? config.n_free() : config.n_docs;
    return static_cast<std::uint32_t>(round_half_up(config.misinfo_ratio * base));
}

namespace {

void require(bool ok, const char* key, const std::string& message) {
    if (!ok) throw ConfigError(message, key);
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const SimConfig& c) {
    require(c.n_agents > 0, "n_agents", "n_agents must be positive");
    require(c.n_committed <= c.n_agents, "n_committed", "n_committed must not exceed n_agents");
    require(c.dims > 0, "dims", "dims must be positive");
    require(c.n_docs > 0, "n_docs", "n_docs must be positive");
    require(in_unit_interval(c.misinfo_ratio), "misinfo_ratio", "misinfo_ratio must lie in [0, 1]");
    require(c.alpha > 0.0 && c.alpha < 1.0, "alpha", "alpha must lie in (0, 1)");
    require(c.capacity_k > 0, "capacity_k", "capacity_k must be positive");
    require(std::isfinite(c.visibility_radius) && c.visibility_radius >= 0.0,
            "visibility_radius", "visibility_radius must be a non-negative real");
    require(in_unit_interval(c.p_biased), "consumer_kind", "mixed consumer fraction must lie in [0, 1]");
    require(in_unit_interval(c.committed_magnitude), "committed_magnitude", "committed_magnitude must lie in [0, 1]");
    require(std::isfinite(c.epsilon_influence) && c.epsilon_influence > 0.0,
            "epsilon_influence", "epsilon_influence must be positive");
    require(in_unit_interval(c.init_spread), "init_spread", "init_spread must lie in [0, 1]");
    require(c.conv_tol > 0.0, "conv_tol", "conv_tol must be positive (or none)");
    require(c.conv_window > 0, "conv_window", "conv_window must be positive");
    require(c.snapshot_every > 0, "snapshot_every", "snapshot_every must be positive");

    if (c.production_mode == ProductionMode::Mirror) {
        require(c.n_docs == c.n_free(), "n_docs",
                "mirror production requires n_docs = n_agents - n_committed (" +
                    std::to_string(c.n_free()) + ")");
    }
    if (c.misinfo_ratio > 0.0) {
        require(c.n_committed > 0, "misinfo_ratio", "misinfo_ratio > 0 requires at least one committed agent");
    }
    require(c.n_free() > 0, "n_committed", "at least one free (non-committed) agent is required");
}

}  // namespace beliefsim
