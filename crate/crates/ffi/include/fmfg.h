#ifndef FMFG_H
#define FMFG_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes. `Ok` is zero.
typedef enum FmfgStatus {
  FMFG_STATUS_OK = 0,
  FMFG_STATUS_NULL_POINTER = 1,
  FMFG_STATUS_INVALID_ARGUMENT = 2,
  FMFG_STATUS_CONFIG = 3,
  FMFG_STATUS_ASSUMPTION = 4,
  FMFG_STATUS_SOLVER = 5,
  FMFG_STATUS_IO = 6,
  FMFG_STATUS_BUFFER_TOO_SMALL = 7,
  FMFG_STATUS_PANIC = 8,
} FmfgStatus;

// Loaded problem plus solver settings.
typedef struct FmfgConfig FmfgConfig;

// Converged (or last) iterate of a fixed-point solve.
typedef struct FmfgSolution FmfgSolution;

// Scalar summary of a solve.
typedef struct FmfgDiagnostics {
  uint32_t outer_iterations;
  bool converged;
  double final_gap;
  double hjb_residual;
  double fp_residual;
  double min_density;
  double mass_error_max;
} FmfgDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *fmfg_last_error(void);

void fmfg_clear_error(void);

// Static NUL-terminated version string.
const char *fmfg_version(void);

// Loads and validates a TOML config.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum FmfgStatus fmfg_config_load(const char *path, struct FmfgConfig **out);

// # Safety
// `cfg` must come from [`fmfg_config_load`] and not be used afterwards.
void fmfg_config_free(struct FmfgConfig *cfg);

// Number of grid nodes `n^d` of the configured problem.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum FmfgStatus fmfg_config_grid_len(const struct FmfgConfig *cfg, size_t *out);

// Runs the damped fixed-point solver. A non-converged run still returns
// `Ok` with a handle; inspect the diagnostics.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum FmfgStatus fmfg_solve(const struct FmfgConfig *cfg, struct FmfgSolution **out);

// # Safety
// `sol` must come from [`fmfg_solve`] and not be used afterwards.
void fmfg_solution_free(struct FmfgSolution *sol);

// # Safety
// `sol` must be a live handle; `out` writable.
enum FmfgStatus fmfg_solution_diagnostics(const struct FmfgSolution *sol,
                                          struct FmfgDiagnostics *out);

// Number of time steps `Nt`; the solution holds `Nt + 1` levels.
//
// # Safety
// `sol` must be a live handle; `out` writable.
enum FmfgStatus fmfg_solution_nt(const struct FmfgSolution *sol, size_t *out);

// Copies `u` at time level `level` (row-major, `n^d` values) into `buf`.
//
// # Safety
// `sol` must be a live handle; `buf` must hold `len` doubles.
enum FmfgStatus fmfg_solution_copy_u(const struct FmfgSolution *sol,
                                     size_t level,
                                     double *buf,
                                     size_t len);

// Copies `m` at time level `level` into `buf`.
//
// # Safety
// As [`fmfg_solution_copy_u`].
enum FmfgStatus fmfg_solution_copy_m(const struct FmfgSolution *sol,
                                     size_t level,
                                     double *buf,
                                     size_t len);

// `out = (-Δ)^s input` on the `n^d` grid.
//
// # Safety
// `input` and `out` must each hold `n^d` doubles.
enum FmfgStatus fmfg_fractional_laplacian(uint32_t dim,
                                          uint32_t n,
                                          double s,
                                          const double *input,
                                          double *out);

// `out = exp(-t(σ(-Δ) + (-Δ)^s)) input`.
//
// # Safety
// `input` and `out` must each hold `n^d` doubles.
enum FmfgStatus fmfg_heat_step(uint32_t dim,
                               uint32_t n,
                               double s,
                               double sigma,
                               double t,
                               const double *input,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FMFG_H */
