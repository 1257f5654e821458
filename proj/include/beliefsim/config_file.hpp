#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "beliefsim/sweep.hpp"

namespace beliefsim {

// Plain-text configuration:
//
//   # comment
//   n_agents = 200
//   consumer_kind = mixed(0.3)     # biased | uniform | mixed(<p_biased>)
//   production_mode = sampled      # sampled | mirror
//   conv_tol = none                # disables early stopping
//   n_values = 100, 400, 1600
//
// Keys are the SimConfig and SweepSpec field names; the sweep's base config
// is the SimConfig described by the same file. Unknown or repeated keys are
// rejected, keys not given keep their defaults, and every constraint is
// checked at parse time. Errors are ConfigError with the offending line.
SweepSpec parse_config(std::string_view text);

// Reads and parses a file. A missing or unreadable file is a ConfigError.
SweepSpec load_config(const std::filesystem::path& path);

// Every key exactly once, in canonical order. parse_config(render_config(s))
// reproduces s.
std::string render_config(const SweepSpec& spec);

// Names of all accepted keys, in canonical order.
const std::vector<std::string>& config_keys();

// Shortest decimal string that parses back to the same double; "inf",
// "-inf" and "nan" for non-finite values. Locale independent.
std::string format_double(double x);

}  // namespace beliefsim
