#pragma once

#include <cstdint>
#include <vector>

#include "beliefsim/config.hpp"

namespace beliefsim {

// Grid over information volume (n_docs) and misinformation ratio, with
// independent replicates per cell.
struct SweepSpec {
    SimConfig base;
    std::vector<std::uint32_t> n_values{100, 400, 1600, 6400};
    std::vector<double> r_values{0.0, 0.05, 0.1, 0.2};
    std::uint32_t replicates = 10;
    std::uint64_t base_seed = 42;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct SweepRow {
    std::uint32_t n_docs = 0;
    double r = 0.0;
    std::uint32_t replicate = 0;
    std::uint64_t seed = 0;
    double q_final = 0.0;
    double mean_extremity_final = 0.0;
    std::uint64_t steps_run = 0;
    bool converged = false;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct CellAggregate {
    std::uint32_t n_docs = 0;
    double r = 0.0;
    double mean_q = 0.0;
    // Sample standard deviation (n - 1); 0 when there is a single replicate.
    double stddev_q = 0.0;
    double mean_extremity = 0.0;
    std::uint32_t n_replicates = 0;
};

// Identity of a grid cell, derived from its (N, r) values rather than its
// position in the grid so that editing the grid leaves other cells' seeds
// alone: mix64(N) ^ bits(r).
std::uint64_t cell_key(std::uint32_t n_docs, double r) noexcept;

// mix64(mix64(base ^ cell * 0x9E3779B97F4A7C15) ^ replicate). For a fixed
// base and cell the map replicate -> seed is a bijection.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t cell,
                          std::uint64_t replicate) noexcept;

// base with n_docs and misinfo_ratio overridden.
SimConfig cell_config(const SweepSpec& spec, std::uint32_t n_docs, double r);

// Grid shape only: non-empty, strictly ascending, in range, replicates > 0.
void validate_grid(const SweepSpec& spec);

// validate_grid plus validity of every cell's SimConfig.
void validate(const SweepSpec& spec);

// One run from init to stop, summarized. Uses config.seed.
SweepRow summarize_run(const SimConfig& config);

// All (N, r, replicate) runs, sorted by (N, r, replicate). The result does
// not depend on `parallelism`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned parallelism);

// Per-(N, r) statistics, in the order cells first appear in `rows`.
std::vector<CellAggregate> aggregate(const std::vector<SweepRow>& rows);

}  // namespace beliefsim
