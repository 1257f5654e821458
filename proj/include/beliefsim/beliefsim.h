/*
 * beliefsim C API.
 *
 * Opaque handles over the C++ simulator. Every call returns a bsim_status;
 * on failure the message for the calling thread is available from
 * bsim_last_error() until that thread's next API call.
 */
#ifndef BELIEFSIM_BELIEFSIM_H
#define BELIEFSIM_BELIEFSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BSIM_BUILDING_LIBRARY)
#    define BSIM_API __declspec(dllexport)
#  else
#    define BSIM_API __declspec(dllimport)
#  endif
#else
#  define BSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsim_status {
    BSIM_OK = 0,
    BSIM_ERR_CONFIG = 1,           /* invalid parameters or config file */
    BSIM_ERR_IO = 2,               /* output could not be written */
    BSIM_ERR_INVALID_ARGUMENT = 3, /* null handle, bad buffer, etc. */
    BSIM_ERR_INTERNAL = 4
} bsim_status;

typedef struct bsim_config bsim_config;
typedef struct bsim_sim bsim_sim;

typedef struct bsim_step_trace {
    uint64_t t;
    double q;
    double mean_extremity;
    double mean_coverage;
    double max_delta;
} bsim_step_trace;

BSIM_API const char* bsim_version(void);
BSIM_API const char* bsim_last_error(void);

/* Configuration (simulation parameters plus sweep grid). */
BSIM_API bsim_status bsim_config_default(bsim_config** out);
BSIM_API bsim_status bsim_config_load(const char* path, bsim_config** out);
BSIM_API bsim_status bsim_config_parse(const char* text, bsim_config** out);
BSIM_API void bsim_config_free(bsim_config* config);
BSIM_API bsim_status bsim_config_get_seed(const bsim_config* config, uint64_t* out);
BSIM_API bsim_status bsim_config_set_seed(bsim_config* config, uint64_t seed);
BSIM_API bsim_status bsim_config_set_snapshot_every(bsim_config* config, uint32_t every);

/*
 * Writes the canonical config text (NUL-terminated) into buf. *needed
 * receives the required size including the terminator; passing buf = NULL
 * with cap = 0 is a size query. Returns BSIM_ERR_INVALID_ARGUMENT if cap is
 * too small.
 */
BSIM_API bsim_status bsim_config_render(const bsim_config* config, char* buf, size_t cap,
                                        size_t* needed);

/* Whole-run drivers that write the CSV artifacts into out_dir. */
BSIM_API bsim_status bsim_run_to_dir(const bsim_config* config, const char* out_dir);
BSIM_API bsim_status bsim_sweep_to_dir(const bsim_config* config, const char* out_dir,
                                       uint32_t threads);

BSIM_API uint64_t bsim_derive_seed(uint64_t base_seed, uint64_t cell, uint64_t replicate);
BSIM_API uint64_t bsim_cell_key(uint32_t n_docs, double r);

/* Step-by-step simulation. */
BSIM_API bsim_status bsim_sim_create(const bsim_config* config, bsim_sim** out);
BSIM_API void bsim_sim_free(bsim_sim* sim);
BSIM_API bsim_status bsim_sim_step(bsim_sim* sim, bsim_step_trace* trace);
BSIM_API uint64_t bsim_sim_time(const bsim_sim* sim);
BSIM_API size_t bsim_sim_agent_count(const bsim_sim* sim);
BSIM_API size_t bsim_sim_dims(const bsim_sim* sim);
/* Row-major agent positions (agent_count * dims doubles), ordered by id. */
BSIM_API bsim_status bsim_sim_positions(const bsim_sim* sim, double* buf, size_t cap);
BSIM_API bsim_status bsim_sim_polarization(const bsim_sim* sim, double* q);

#ifdef __cplusplus
}
#endif

#endif /* BELIEFSIM_BELIEFSIM_H */
