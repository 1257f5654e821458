#include "beliefsim/beliefsim.h"

#include <cstring>
#include <exception>
#include <string>

#include "beliefsim/artifacts.hpp"
#include "beliefsim/config_file.hpp"
#include "beliefsim/dynamics.hpp"
#include "beliefsim/metrics.hpp"
#include "beliefsim/population.hpp"
#include "beliefsim/sweep.hpp"

struct bsim_config {
    beliefsim::SweepSpec spec;
};

struct bsim_sim {
    beliefsim::SimConfig config;
    beliefsim::SimState state;
};

namespace {

thread_local std::string last_error;

bsim_status fail(bsim_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
bsim_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return BSIM_OK;
    } catch (const beliefsim::ConfigError& e) {
        return fail(BSIM_ERR_CONFIG, e.what());
    } catch (const beliefsim::IoError& e) {
        return fail(BSIM_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(BSIM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(BSIM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(BSIM_ERR_INTERNAL, "unknown error");
    }
}

#define BSIM_REQUIRE(cond)                                                 \
    do {                                                                   \
        if (!(cond)) return fail(BSIM_ERR_INVALID_ARGUMENT, #cond " failed"); \
    } while (0)

}  // namespace

extern "C" {

const char* bsim_version(void) { return BELIEFSIM_VERSION; }

const char* bsim_last_error(void) { return last_error.c_str(); }

bsim_status bsim_config_default(bsim_config** out) {
    BSIM_REQUIRE(out != nullptr);
    return guarded([&] { *out = new bsim_config{}; });
}

bsim_status bsim_config_load(const char* path, bsim_config** out) {
    BSIM_REQUIRE(path != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new bsim_config{beliefsim::load_config(path)}; });
}

bsim_status bsim_config_parse(const char* text, bsim_config** out) {
    BSIM_REQUIRE(text != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new bsim_config{beliefsim::parse_config(text)}; });
}

void bsim_config_free(bsim_config* config) { delete config; }

bsim_status bsim_config_get_seed(const bsim_config* config, uint64_t* out) {
    BSIM_REQUIRE(config != nullptr && out != nullptr);
    *out = config->spec.base.seed;
    return BSIM_OK;
}

bsim_status bsim_config_set_seed(bsim_config* config, uint64_t seed) {
    BSIM_REQUIRE(config != nullptr);
    config->spec.base.seed = seed;
    return BSIM_OK;
}

bsim_status bsim_config_set_snapshot_every(bsim_config* config, uint32_t every) {
    BSIM_REQUIRE(config != nullptr);
    if (every == 0) return fail(BSIM_ERR_CONFIG, "snapshot_every must be positive");
    config->spec.base.snapshot_every = every;
    return BSIM_OK;
}

bsim_status bsim_config_render(const bsim_config* config, char* buf, size_t cap, size_t* needed) {
    BSIM_REQUIRE(config != nullptr);
    return guarded([&] {
        const std::string text = beliefsim::render_config(config->spec);
        if (needed) *needed = text.size() + 1;
        if (buf == nullptr && cap == 0) return;
        if (buf == nullptr || cap < text.size() + 1) {
            throw std::invalid_argument("buffer too small for rendered config");
        }
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

bsim_status bsim_run_to_dir(const bsim_config* config, const char* out_dir) {
    BSIM_REQUIRE(config != nullptr && out_dir != nullptr);
    return guarded([&] { beliefsim::write_run_outputs(config->spec, out_dir); });
}

bsim_status bsim_sweep_to_dir(const bsim_config* config, const char* out_dir, uint32_t threads) {
    BSIM_REQUIRE(config != nullptr && out_dir != nullptr);
    BSIM_REQUIRE(threads > 0);
    return guarded([&] { beliefsim::write_sweep_outputs(config->spec, out_dir, threads); });
}

uint64_t bsim_derive_seed(uint64_t base_seed, uint64_t cell, uint64_t replicate) {
    return beliefsim::derive_seed(base_seed, cell, replicate);
}

uint64_t bsim_cell_key(uint32_t n_docs, double r) { return beliefsim::cell_key(n_docs, r); }

bsim_status bsim_sim_create(const bsim_config* config, bsim_sim** out) {
    BSIM_REQUIRE(config != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] {
        const auto& c = config->spec.base;
        *out = new bsim_sim{c, beliefsim::init_population(c)};
    });
}

void bsim_sim_free(bsim_sim* sim) { delete sim; }

bsim_status bsim_sim_step(bsim_sim* sim, bsim_step_trace* trace) {
    BSIM_REQUIRE(sim != nullptr);
    return guarded([&] {
        auto result = beliefsim::step(sim->state, sim->config);
        sim->state = std::move(result.state);
        if (trace) {
            *trace = {result.trace.t, result.trace.q, result.trace.mean_extremity,
                      result.trace.mean_coverage, result.trace.max_delta};
        }
    });
}

uint64_t bsim_sim_time(const bsim_sim* sim) { return sim ? sim->state.time : 0; }

size_t bsim_sim_agent_count(const bsim_sim* sim) { return sim ? sim->state.agents.size() : 0; }

size_t bsim_sim_dims(const bsim_sim* sim) { return sim ? sim->config.dims : 0; }

bsim_status bsim_sim_positions(const bsim_sim* sim, double* buf, size_t cap) {
    BSIM_REQUIRE(sim != nullptr && buf != nullptr);
    const std::size_t dims = sim->config.dims;
    if (cap < sim->state.agents.size() * dims) {
        return fail(BSIM_ERR_INVALID_ARGUMENT, "position buffer too small");
    }
    for (const auto& a : sim->state.agents) {
        for (std::size_t d = 0; d < dims; ++d) *buf++ = a.position[d];
    }
    return BSIM_OK;
}

bsim_status bsim_sim_polarization(const bsim_sim* sim, double* q) {
    BSIM_REQUIRE(sim != nullptr && q != nullptr);
    return guarded([&] { *q = beliefsim::polarization_q(sim->state.free_positions()).q; });
}

}  // extern "C"
