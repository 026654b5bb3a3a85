#ifndef FPDIM_H
#define FPDIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Product mode selector: quantum product at `q = 1`.
#define FPDIM_MODE_QUANTUM 0

// Product mode selector: classical cup product truncated to the box.
#define FPDIM_MODE_CLASSICAL 1

typedef enum FpdimStatus {
  FPDIM_STATUS_OK = 0,
  FPDIM_STATUS_NULL_POINTER = 1,
  FPDIM_STATUS_INVALID_ARGUMENT = 2,
  FPDIM_STATUS_DOMAIN = 3,
  FPDIM_STATUS_INVARIANT_VIOLATION = 4,
  FPDIM_STATUS_OVERFLOW = 5,
  FPDIM_STATUS_NON_CONVERGENCE = 6,
  FPDIM_STATUS_CACHE = 7,
  FPDIM_STATUS_IO = 8,
  FPDIM_STATUS_BUFFER_TOO_SMALL = 9,
  FPDIM_STATUS_PANIC = 10,
} FpdimStatus;

// A quantum or classical product table of one Grassmannian.
typedef struct FpdimTable FpdimTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fpdim_version(void);

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *fpdim_last_error(void);

// `ρ_{k,λ}(x)` by the closed form; requires `x > k + λ_1 − 1`.
//
// # Safety
// `parts` must point to `len` values; `out` must be writable.
enum FpdimStatus fpdim_rho(size_t k, const size_t *parts, size_t len, double x, double *out);

// `dim S_λ(C^k)`; `FPDIM_STATUS_OVERFLOW` if it does not fit in 64 bits.
//
// # Safety
// `parts` must point to `len` values; `out` must be writable.
enum FpdimStatus fpdim_hook_dimension(size_t k, const size_t *parts, size_t len, uint64_t *out);

// Littlewood–Richardson coefficient `c^ν_{λμ}`.
//
// # Safety
// Each part pointer must point to its length in values; `out` must be writable.
enum FpdimStatus fpdim_lr_coefficient(const size_t *lambda,
                                      size_t lambda_len,
                                      const size_t *mu,
                                      size_t mu_len,
                                      const size_t *nu,
                                      size_t nu_len,
                                      uint64_t *out);

// Spectral radius of a nonnegative `dim × dim` row-major matrix.
//
// # Safety
// `entries` must point to `dim * dim` values; `out` must be writable.
enum FpdimStatus fpdim_spectral_radius(size_t dim,
                                       const double *entries,
                                       double tol,
                                       size_t max_iter,
                                       double *out);

// Builds the product table of `Gr(k, n)` in the given `FPDIM_MODE_*`.
//
// # Safety
// `out` must be writable. The handle must be released with `fpdim_table_free`.
enum FpdimStatus fpdim_table_new(size_t k, size_t n, uint32_t mode, struct FpdimTable **out);

// Releases a table. Null is ignored.
//
// # Safety
// `table` must come from `fpdim_table_new` and not be used afterwards.
void fpdim_table_free(struct FpdimTable *table);

// Number of Schubert classes in the table's basis.
//
// # Safety
// `table` must be a live handle; `out` must be writable.
enum FpdimStatus fpdim_table_rank(const struct FpdimTable *table, size_t *out);

// Copies the parts of basis element `index` into `parts` and stores their
// count in `out_len`. With too small a buffer, returns
// `FPDIM_STATUS_BUFFER_TOO_SMALL` and still stores the required length.
//
// # Safety
// `table` must be a live handle; `parts` must have room for `capacity`
// values (or be null with `capacity` 0); `out_len` must be writable.
enum FpdimStatus fpdim_table_basis_element(const struct FpdimTable *table,
                                           size_t index,
                                           size_t *parts,
                                           size_t capacity,
                                           size_t *out_len);

// Structure constant: coefficient of `q^d σ_ν` in `σ_i σ_j`, all given by
// basis index.
//
// # Safety
// `table` must be a live handle; `out` must be writable.
enum FpdimStatus fpdim_table_coefficient(const struct FpdimTable *table,
                                         size_t i,
                                         size_t j,
                                         size_t nu,
                                         size_t d,
                                         uint64_t *out);

// Frobenius–Perron dimension of basis element `index`: the spectral radius
// of its multiplication matrix at `q = 1`.
//
// # Safety
// `table` must be a live handle; `out` must be writable.
enum FpdimStatus fpdim_table_fpdim(const struct FpdimTable *table,
                                   size_t index,
                                   double tol,
                                   size_t max_iter,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPDIM_H */
