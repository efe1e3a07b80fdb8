#ifndef XYDQPT_H
#define XYDQPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XyStatus {
  XY_STATUS_OK = 0,
  XY_STATUS_INVALID_ARGUMENT = 1,
  XY_STATUS_NULL_POINTER = 2,
  XY_STATUS_NUMERICAL = 3,
  XY_STATUS_BUFFER_TOO_SMALL = 4,
  XY_STATUS_PANIC = 5,
} XyStatus;

typedef enum XyDirection {
  XY_DIRECTION_X = 0,
  XY_DIRECTION_Y = 1,
} XyDirection;

/**
 * Opaque quench protocol.
 */
typedef struct XyQuench XyQuench;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *xy_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length plus one. Returns
 * 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t xy_last_error(char *buf, size_t len);

/**
 * Creates a quench protocol. `n_sites = 0` selects the thermodynamic limit;
 * otherwise the chain length must be even.
 *
 * # Safety
 * `out` must be valid for a pointer write. The handle must be released
 * with [`xy_quench_free`].
 */
enum XyStatus xy_quench_new(double gamma0,
                            double lambda0,
                            double gammaf,
                            double lambdaf,
                            double beta,
                            double phi,
                            size_t n_sites,
                            struct XyQuench **out);

/**
 * Releases a handle from [`xy_quench_new`]. Null is ignored.
 *
 * # Safety
 * `q` must be null or a live handle; it must not be used afterwards.
 */
void xy_quench_free(struct XyQuench *q);

/**
 * Single-mode Loschmidt amplitude `G_k(t)`.
 *
 * # Safety
 * `q` must be a live handle; `re` and `im` valid for writes.
 */
enum XyStatus xy_mode_amplitude(const struct XyQuench *q,
                                double k,
                                double t,
                                double *re,
                                double *im);

/**
 * Rate function at `len` increasing times: the finite-chain sum for a finite
 * handle, the momentum integral otherwise.
 *
 * # Safety
 * `times` must hold `len` values and `values` room for `len`.
 */
enum XyStatus xy_rate(const struct XyQuench *q, const double *times, size_t len, double *values);

/**
 * Momenta `k*` where the Fisher zeros cross the imaginary axis, with the
 * post-quench energies there. `count` receives the number found; if it
 * exceeds `capacity` the first `capacity` are written and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * `k_star` and `eps_post` must have room for `capacity` values (either may be
 * null when `capacity` is 0); `count` valid for a write.
 */
enum XyStatus xy_find_crossings(const struct XyQuench *q,
                                double *k_star,
                                double *eps_post,
                                size_t capacity,
                                size_t *count);

/**
 * Critical β of the handle's protocol with β left free: `+inf` when every β
 * in the bracket has a crossing and 0 when none has.
 *
 * # Safety
 * `q` must be a live handle; `out` valid for a write.
 */
enum XyStatus xy_critical_beta(const struct XyQuench *q, double *out);

/**
 * Long-distance order parameter of the initial state along `direction`.
 * `tol <= 0` selects the default tolerance. `converged` receives 1 if the
 * correlator limit converged, 0 otherwise.
 *
 * # Safety
 * `value`, `r_used` and `converged` must be valid for writes.
 */
enum XyStatus xy_order_parameter(double gamma,
                                 double lambda,
                                 double beta,
                                 double phi,
                                 enum XyDirection direction,
                                 double tol,
                                 double *value,
                                 size_t *r_used,
                                 int32_t *converged);

/**
 * Transverse magnetization of the initial state on an even chain of `n_sites`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum XyStatus xy_m_z(double gamma,
                     double lambda,
                     double beta,
                     double phi,
                     size_t n_sites,
                     double *out);

/**
 * Pfaffian of a row-major skew-symmetric `dim × dim` matrix. `im` may be
 * null for a real matrix.
 *
 * # Safety
 * `re` (and `im` when non-null) must hold `dim * dim` values; `out_re` and
 * `out_im` must be valid for writes.
 */
enum XyStatus xy_pfaffian(const double *re,
                          const double *im,
                          size_t dim,
                          double *out_re,
                          double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XYDQPT_H */
