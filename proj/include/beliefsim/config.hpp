#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beliefsim {

// Raised for any parameter that violates the model's ranges or cross-field
// constraints. `key` names the offending config key when there is one; `line`
// is the 1-based config-file line when known, else 0.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& message, std::string key = {}, int line = 0)
        : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + message
                                         : message),
          message_(message),
          key_(std::move(key)),
          line_(line) {}

    const std::string& message() const noexcept { return message_; }
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

    ConfigError at_line(int line) const { return ConfigError(message_, key_, line); }

private:
    std::string message_;
    std::string key_;
    int line_;
};

enum class ConsumerPolicy : std::uint8_t { Biased, Uniform, Mixed };

enum class ProductionMode : std::uint8_t {
    // One document per free agent at its exact position (Y_t = X_t).
    Mirror,
    // n_docs documents drawn with replacement from free-agent positions.
    Sampled,
};

// Sentinel for "never stop early".
inline constexpr double kNoConvergence = std::numeric_limits<double>::infinity();

struct SimConfig {
    std::uint32_t n_agents = 200;
    std::uint32_t n_committed = 2;
    std::uint32_t dims = 1;
    std::uint32_t n_docs = 1600;
    double misinfo_ratio = 0.05;
    double alpha = 0.8;
    std::uint32_t capacity_k = 10;
    double visibility_radius = 0.6;
    ConsumerPolicy consumer_kind = ConsumerPolicy::Biased;
    // Fraction of free agents that are biased under ConsumerPolicy::Mixed.
    double p_biased = 0.5;
    ProductionMode production_mode = ProductionMode::Sampled;
    double committed_magnitude = 0.95;
    double epsilon_influence = 1e-6;
    double init_spread = 0.25;
    std::uint32_t t_max = 1000;
    double conv_tol = 1e-9;
    std::uint32_t conv_window = 20;
    std::uint32_t snapshot_every = 100;
    std::uint64_t seed = 42;

    std::uint32_t n_free() const noexcept { return n_agents - n_committed; }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// floor(x + 1/2), with a small allowance so products such as 0.15 * 10 that
// are mathematically exact halves round up despite representation error.
std::uint64_t round_half_up(double x);

// Number of misinformation documents injected per step for this config.
std::uint32_t misinformation_count(const SimConfig& config);

// Throws ConfigError on the first violated range or cross-field constraint.
void validate(const SimConfig& config);

}  // namespace beliefsim
