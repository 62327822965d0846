#ifndef KZMODP_H
#define KZMODP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KzpStatus {
  KZP_STATUS_OK = 0,
  // The computation ran and the identity does not hold.
  KZP_STATUS_CHECK_FAILED = 1,
  // Malformed arguments: bad modulus, lengths, κ divisible by p, ...
  KZP_STATUS_INVALID_ARGUMENT = 2,
  // A hypothesis of the requested statement is not met.
  KZP_STATUS_PRECONDITION = 3,
  KZP_STATUS_NULL_POINTER = 4,
  KZP_STATUS_INTERNAL = 5,
} KzpStatus;

typedef enum KzpCurve {
  KZP_CURVE_ELLIPTIC = 0,
  KZP_CURVE_QUARTIC = 1,
  KZP_CURVE_CUBIC3 = 2,
  KZP_CURVE_GENUS2 = 3,
  KZP_CURVE_SURFACE = 4,
} KzpCurve;

// A Taylor-coefficient solution together with the problem it solves.
typedef struct KzpSolution KzpSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; valid until the next call
// into the library from the same thread. Never null.
const char *kzp_last_error(void);

// Builds `I^{(l_1 p - 1, .., l_k p - 1)}(z, q)` for `κ = kappa_num / kappa_den`,
// weights `m[0..n]`, and `q[0..k]`, `l[0..k]`. Least positive exponents are used.
//
// # Safety
// `m` must point to `n` values, `q` and `l` to `k` values each, and `out` must be writable.
enum KzpStatus kzp_solve(uint64_t p,
                         int64_t kappa_num,
                         int64_t kappa_den,
                         const uint32_t *m,
                         size_t n,
                         uint32_t k,
                         const int64_t *q,
                         const uint32_t *l,
                         struct KzpSolution **out);

// # Safety
// `sol` must come from `kzp_solve` and not have been freed; null is ignored.
void kzp_solution_free(struct KzpSolution *sol);

// Dimension of the weight space the solution lives in.
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KzpStatus kzp_solution_dim(const struct KzpSolution *sol, size_t *out);

// `true` when every coordinate vanishes.
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KzpStatus kzp_solution_is_zero(const struct KzpSolution *sol, bool *out);

// WeightVector JSON of the solution; with `expanded` false, the coordinates
// without the `Π (z_a - z_b)^{M_ab}` factor plus a `prefactor` array of exponents.
//
// # Safety
// `sol` must be a live handle and `out` writable; release the string with `kzp_string_free`.
enum KzpStatus kzp_solution_to_json(const struct KzpSolution *sol, bool expanded, char **out);

// # Safety
// `s` must come from this library; null is ignored.
void kzp_string_free(char *s);

// `KZP_STATUS_OK` when the solution satisfies the KZ equations.
//
// # Safety
// `sol` must be a live handle.
enum KzpStatus kzp_check_kz(const struct KzpSolution *sol);

// `KZP_STATUS_OK` when `e` annihilates the solution.
//
// # Safety
// `sol` must be a live handle.
enum KzpStatus kzp_check_singular(const struct KzpSolution *sol);

// `Σ_{x ∈ F_p} x^i`.
//
// # Safety
// `out` must be writable.
enum KzpStatus kzp_power_sum(uint64_t p, uint64_t i, uint64_t *out);

// Smallest generator of `F_p^×`.
//
// # Safety
// `out` must be writable.
enum KzpStatus kzp_primitive_root(uint64_t p, uint64_t *out);

// Point-sum identity at branch points `x[0..len]` (2 for the surface, 4 for the
// quartic, 3 otherwise).
//
// # Safety
// `x` must point to `len` values.
enum KzpStatus kzp_curve_check(enum KzpCurve kind, uint64_t p, const uint64_t *x, size_t len);

// Library version as a static string.
const char *kzp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KZMODP_H */
