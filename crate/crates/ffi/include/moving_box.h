#ifndef MOVING_BOX_H
#define MOVING_BOX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MbStatus {
  MB_STATUS_OK = 0,
  MB_STATUS_NULL_POINTER = 1,
  MB_STATUS_INVALID_LAW = 2,
  MB_STATUS_OUTSIDE_HORIZON = 3,
  MB_STATUS_OUTSIDE_BOX = 4,
  MB_STATUS_SINGULAR = 5,
  MB_STATUS_DELETED_LEVEL = 6,
  MB_STATUS_UNSUPPORTED = 7,
  MB_STATUS_NUMERICAL = 8,
  MB_STATUS_INVALID_ARGUMENT = 9,
  MB_STATUS_PANIC = 10,
} MbStatus;

/**
 * Potential family selector.
 */
typedef enum MbFamily {
  MB_FAMILY_WELL = 0,
  MB_FAMILY_SUSY1 = 1,
  MB_FAMILY_SUSY2_J0 = 2,
  MB_FAMILY_SUSY2_J1 = 3,
} MbFamily;

/**
 * Boundary law handle.
 */
typedef struct MbLaw MbLaw;

/**
 * Fixed-domain potential handle.
 */
typedef struct MbModel MbModel;

/**
 * Moving-wall wavefunction handle.
 */
typedef struct MbSolution MbSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length
 * including the terminator, or 0 when no error has been recorded.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t mb_last_error_message(char *buf, size_t len);

/**
 * `L(t) = sqrt(λt² + μt + ν)` on `[0, t_max]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbStatus mb_law_case1(double lambda, double mu, double nu, double t_max, struct MbLaw **out);

/**
 * `L(t) = L0 + v t` on `[0, t_max]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbStatus mb_law_linear(double l0, double v, double t_max, struct MbLaw **out);

/**
 * # Safety
 * `law` must come from an `mb_law_*` constructor and not be used afterwards.
 */
void mb_law_free(struct MbLaw *law);

/**
 * `L`, `L̇` and `L̈` at time `t`. Any output pointer may be null.
 *
 * # Safety
 * `law` must be a live handle; non-null outputs must be valid.
 */
enum MbStatus mb_law_eval(const struct MbLaw *law,
                          double t,
                          double *length,
                          double *velocity,
                          double *acceleration);

/**
 * Rescaled clock `τ(t) = ∫₀ᵗ ds / L²`.
 *
 * # Safety
 * `law` must be a live handle and `out` valid.
 */
enum MbStatus mb_law_tau(const struct MbLaw *law, double t, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum MbStatus mb_model_new(enum MbFamily family, struct MbModel **out);

/**
 * Copy of `model` with the harmonic term `c1 q²/4` added. Such models
 * only support potential evaluation and the numerical spectrum.
 *
 * # Safety
 * `model` must be a live handle and `out` valid.
 */
enum MbStatus mb_model_with_case1(const struct MbModel *model, double c1, struct MbModel **out);

/**
 * # Safety
 * `model` must come from `mb_model_*` and not be used afterwards.
 */
void mb_model_free(struct MbModel *model);

/**
 * Fixed-domain potential at `q`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid.
 */
enum MbStatus mb_model_potential(const struct MbModel *model, double q, double *out);

/**
 * Energy of level `n`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid.
 */
enum MbStatus mb_model_energy(const struct MbModel *model, size_t n, double *out);

/**
 * Normalized stationary mode `Q_n(q)`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid.
 */
enum MbStatus mb_model_mode_value(const struct MbModel *model, size_t n, double q, double *out);

/**
 * Lowest `k` finite-difference eigenvalues (Richardson-extrapolated
 * between `n_x` and `2 n_x`), written to `out[0..k]`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for `k` doubles.
 */
enum MbStatus mb_fd_spectrum(const struct MbModel *model, size_t n_x, size_t k, double *out);

/**
 * Superposition `Σ c_n ψ_n` with `c_n = coeff_re[i] + i·coeff_im[i]` for
 * `n = levels[i]`, normalized on construction. `coeff_im` may be null.
 *
 * # Safety
 * Handles must be live; arrays must hold `count` elements; `out` valid.
 */
enum MbStatus mb_solution_new(const struct MbModel *model,
                              const struct MbLaw *law,
                              const size_t *levels,
                              const double *coeff_re,
                              const double *coeff_im,
                              size_t count,
                              struct MbSolution **out);

/**
 * # Safety
 * `sol` must come from `mb_solution_new` and not be used afterwards.
 */
void mb_solution_free(struct MbSolution *sol);

/**
 * `ψ(x, t)`.
 *
 * # Safety
 * `sol` must be a live handle; `re` and `im` valid.
 */
enum MbStatus mb_solution_psi(const struct MbSolution *sol,
                              double t,
                              double x,
                              double *re,
                              double *im);

/**
 * Physical potential `V(x, t)` seen by the solution.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid.
 */
enum MbStatus mb_solution_potential(const struct MbSolution *sol, double t, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOVING_BOX_H */
