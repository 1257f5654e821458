#include "beliefsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "beliefsim/dynamics.hpp"
#include "beliefsim/metrics.hpp"
#include "beliefsim/population.hpp"
#include "beliefsim/rng.hpp"

namespace beliefsim {

std::uint64_t cell_key(std::uint32_t n_docs, double r) noexcept {
    const double canonical = r == 0.0 ? 0.0 : r;  // fold -0.0
    return mix64(n_docs) ^ std::bit_cast<std::uint64_t>(canonical);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t cell,
                          std::uint64_t replicate) noexcept {
    return mix64(mix64(base_seed ^ (cell * kGoldenGamma)) ^ replicate);
}

SimConfig cell_config(const SweepSpec& spec, std::uint32_t n_docs, double r) {
    SimConfig c = spec.base;
    c.n_docs = n_docs;
    c.misinfo_ratio = r;
    return c;
}

void validate_grid(const SweepSpec& spec) {
    if (spec.n_values.empty()) throw ConfigError("n_values must not be empty", "n_values");
    if (spec.r_values.empty()) throw ConfigError("r_values must not be empty", "r_values");
    if (spec.replicates == 0) throw ConfigError("replicates must be positive", "replicates");
    for (std::size_t i = 0; i < spec.n_values.size(); ++i) {
        if (spec.n_values[i] == 0) throw ConfigError("n_values entries must be positive", "n_values");
        if (i > 0 && spec.n_values[i] <= spec.n_values[i - 1]) {
            throw ConfigError("n_values must be strictly ascending", "n_values");
        }
    }
    for (std::size_t i = 0; i < spec.r_values.size(); ++i) {
        const double r = spec.r_values[i];
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("r_values entries must lie in [0, 1]", "r_values");
        if (i > 0 && r <= spec.r_values[i - 1]) {
            throw ConfigError("r_values must be strictly ascending", "r_values");
        }
    }
}

void validate(const SweepSpec& spec) {
    validate_grid(spec);
    for (std::uint32_t n : spec.n_values) {
        for (double r : spec.r_values) {
            try {
                validate(cell_config(spec, n, r));
            } catch (const ConfigError& e) {
                throw ConfigError("sweep cell (N=" + std::to_string(n) +
                                  ", r=" + std::to_string(r) + "): " + e.message(),
                                  e.key());
            }
        }
    }
}

SweepRow summarize_run(const SimConfig& config) {
    const RunResult result = run(init_population(config), config);
    const auto positions = result.final_state.free_positions();
    SweepRow row;
    row.n_docs = config.n_docs;
    row.r = config.misinfo_ratio;
    row.seed = config.seed;
    row.q_final = polarization_q(positions).q;
    row.mean_extremity_final = mean_extremity(positions);
    row.steps_run = result.steps_run;
    row.converged = result.converged;
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned parallelism) {
    validate(spec);

    struct Task {
        SimConfig config;
        std::uint32_t replicate;
    };
    std::vector<Task> tasks;
    for (std::uint32_t n : spec.n_values) {
        for (double r : spec.r_values) {
            const std::uint64_t cell = cell_key(n, r);
            for (std::uint32_t rep = 0; rep < spec.replicates; ++rep) {
                SimConfig c = cell_config(spec, n, r);
                c.seed = derive_seed(spec.base_seed, cell, rep);
                tasks.push_back({c, rep});
            }
        }
    }

    std::vector<SweepRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                rows[i] = summarize_run(tasks[i].config);
                rows[i].replicate = tasks[i].replicate;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };

    const std::size_t n_threads =
        std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(tasks.size(), 1));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<CellAggregate> aggregate(const std::vector<SweepRow>& rows) {
    std::vector<CellAggregate> out;
    std::vector<std::vector<const SweepRow*>> members;
    for (const auto& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CellAggregate& a) {
            return a.n_docs == row.n_docs && a.r == row.r;
        });
        if (it == out.end()) {
            out.push_back({row.n_docs, row.r, 0.0, 0.0, 0.0, 0});
            members.emplace_back();
            it = out.end() - 1;
        }
        members[static_cast<std::size_t>(it - out.begin())].push_back(&row);
    }
    // Welford's update for mean and variance of Q.
    for (std::size_t c = 0; c < out.size(); ++c) {
        double mean_q = 0.0, m2 = 0.0, mean_e = 0.0;
        std::size_t count = 0;
        for (const SweepRow* r : members[c]) {
            ++count;
            const double delta = r->q_final - mean_q;
            mean_q += delta / static_cast<double>(count);
            m2 += delta * (r->q_final - mean_q);
            mean_e += (r->mean_extremity_final - mean_e) / static_cast<double>(count);
        }
        out[c].n_replicates = static_cast<std::uint32_t>(count);
        out[c].mean_q = mean_q;
        out[c].mean_extremity = mean_e;
        out[c].stddev_q = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0;
    }
    return out;
}

}  // namespace beliefsim
