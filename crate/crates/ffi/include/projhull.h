#ifndef PROJHULL_H
#define PROJHULL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PhStatus {
  PH_STATUS_OK = 0,
  PH_STATUS_NULL_POINTER = 1,
  PH_STATUS_INVALID_ARGUMENT = 2,
  PH_STATUS_DIMENSION_MISMATCH = 3,
  PH_STATUS_DEGREE_CAP = 4,
  PH_STATUS_INTERPOLATION_REGIME = 5,
  PH_STATUS_NUMERICAL_FAILURE = 6,
  PH_STATUS_INVALID_CONFIG = 7,
  PH_STATUS_PANIC = 8,
} PhStatus;

// Opaque sampled compactum.
typedef struct PhCompactum PhCompactum;

// Opaque homogeneous polynomial.
typedef struct PhPolynomial PhPolynomial;

typedef struct PhComplex {
  double re;
  double im;
} PhComplex;

// `[lo, hi]`; `lam_*` for extremal values, plain norms for `ph_hom_norm`.
// `bracketed == 0` means the interpolation regime (both ends `+inf`).
typedef struct PhBracket {
  double lo;
  double hi;
  int32_t bracketed;
} PhBracket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, static storage.
const char *ph_version(void);

// Message of the last failed call on this thread; valid until the next call
// that fails. Empty if nothing failed yet.
const char *ph_last_error(void);

// `samples` points on the circle `|z| = radius` of the chart `Z_0 != 0` in `P^1`.
//
// # Safety
// `out` must be a valid pointer.
enum PhStatus ph_compactum_circle(size_t samples, double radius, struct PhCompactum **out_k);

// `count` points of `P^n`, row-major: point `i` is `coords[i*(n+1) .. (i+1)*(n+1)]`.
//
// # Safety
// `coords` must hold `count*(n+1)` values; `out` must be valid.
enum PhStatus ph_compactum_from_points(size_t n,
                                       const struct PhComplex *coords,
                                       size_t count,
                                       struct PhCompactum **out_k);

// Either a serialized compactum or `{"generator": {...}, "samples": N}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid.
enum PhStatus ph_compactum_from_json(const char *json, struct PhCompactum **out_k);

// Ambient dimension `n` of `P^n`, or 0 for a null handle.
//
// # Safety
// `k` must be null or a live handle.
size_t ph_compactum_dim(const struct PhCompactum *k);

// Number of sample points, or 0 for a null handle.
//
// # Safety
// `k` must be null or a live handle.
size_t ph_compactum_len(const struct PhCompactum *k);

// # Safety
// `k` must be null or a handle not yet freed.
void ph_compactum_free(struct PhCompactum *k);

// Bracket on the degree-`d` extremal function at the point with homogeneous
// coordinates `x[0..len]`, default solver settings.
//
// # Safety
// `k` live, `x` holds `len` values, `out` valid.
enum PhStatus ph_truncated_extremal(const struct PhCompactum *k,
                                    const struct PhComplex *x,
                                    size_t len,
                                    size_t d,
                                    struct PhBracket *out_b);

// Bracket on the norm of evaluation at the (unnormalized) vector `z` over
// degree-`d` sections. `InterpolationRegime` if unbounded.
//
// # Safety
// `k` live, `z` holds `len` values, `out` valid.
enum PhStatus ph_hom_norm(const struct PhCompactum *k,
                          const struct PhComplex *z,
                          size_t len,
                          size_t d,
                          struct PhBracket *out_b);

// Coefficient count of degree-`d` forms in `n+1` variables.
size_t ph_polynomial_coeff_count(size_t n, size_t d);

// Degree-`d` form in `n+1` variables; coefficients in graded-lex order
// (`Z_0^d` first).
//
// # Safety
// `coeffs` holds `len` values; `out` valid.
enum PhStatus ph_polynomial_new(size_t n,
                                size_t d,
                                const struct PhComplex *coeffs,
                                size_t len,
                                struct PhPolynomial **out_p);

// # Safety
// `p` live, `z` holds `len` values, `out` valid.
enum PhStatus ph_polynomial_eval(const struct PhPolynomial *p,
                                 const struct PhComplex *z,
                                 size_t len,
                                 struct PhComplex *out_v);

// Fubini–Study pointwise norm `|P(z)| / ‖z‖^d`.
//
// # Safety
// `p` live, `z` holds `len` values, `out` valid.
enum PhStatus ph_polynomial_fs_norm(const struct PhPolynomial *p,
                                    const struct PhComplex *z,
                                    size_t len,
                                    double *out_v);

// `max_K |P|` over the sample lift (unit representatives).
//
// # Safety
// `k` and `p` live, `out` valid.
enum PhStatus ph_polynomial_sup_on(const struct PhCompactum *k,
                                   const struct PhPolynomial *p,
                                   double *out_v);

// # Safety
// `p` must be null or a handle not yet freed.
void ph_polynomial_free(struct PhPolynomial *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROJHULL_H */
