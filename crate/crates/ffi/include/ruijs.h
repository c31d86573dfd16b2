#ifndef RUIJS_H
#define RUIJS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RuijsStatus {
  RUIJS_STATUS_OK = 0,
  RUIJS_STATUS_NULL_POINTER = 1,
  RUIJS_STATUS_INVALID_ARGUMENT = 2,
  RUIJS_STATUS_NON_FINITE = 3,
  RUIJS_STATUS_POLE = 4,
  RUIJS_STATUS_UNSUPPORTED_REGIME = 5,
  RUIJS_STATUS_GENERICITY = 6,
  RUIJS_STATUS_BALANCING = 7,
  RUIJS_STATUS_SAMPLER_EXHAUSTED = 8,
  RUIJS_STATUS_CONFIG = 9,
  RUIJS_STATUS_PANIC = 10,
} RuijsStatus;

typedef enum RuijsVariant {
  RUIJS_VARIANT_ELLIPTIC = 0,
  RUIJS_VARIANT_TRIGONOMETRIC = 1,
  RUIJS_VARIANT_HYPERBOLIC = 2,
  RUIJS_VARIANT_RATIONAL = 3,
} RuijsVariant;

typedef enum RuijsFamily {
  RUIJS_FAMILY_H = 0,
  RUIJS_FAMILY_D = 1,
  RUIJS_FAMILY_HAT_H = 2,
  RUIJS_FAMILY_HAT_D = 3,
} RuijsFamily;

/**
 * A difference operator.
 */
typedef struct RuijsOperator RuijsOperator;

/**
 * Model parameters `(δ, κ)` and the bracket variant.
 */
typedef struct RuijsParams RuijsParams;

typedef struct RuijsComplex {
  double re;
  double im;
} RuijsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *ruijs_last_error(void);

/**
 * Default parameters for a variant: generic `δ`, `κ`, `|p| = 0.3`, `ω = 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RuijsStatus ruijs_params_default(enum RuijsVariant variant, struct RuijsParams **out);

/**
 * Parameters with an explicit modulus: `τ` for the elliptic variant, `ω` for
 * trigonometric and hyperbolic, ignored for rational.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RuijsStatus ruijs_params_new(enum RuijsVariant variant,
                                  struct RuijsComplex modulus,
                                  struct RuijsComplex delta,
                                  struct RuijsComplex kappa,
                                  struct RuijsParams **out);

/**
 * # Safety
 * `params` must come from this library and not be used afterwards. Null is ignored.
 */
void ruijs_params_free(struct RuijsParams *params);

/**
 * The bracket `[x]`.
 *
 * # Safety
 * `params` must be a live handle and `out` valid for writes.
 */
enum RuijsStatus ruijs_bracket(const struct RuijsParams *params,
                               struct RuijsComplex x,
                               struct RuijsComplex *out);

/**
 * `θ(z; p)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RuijsStatus ruijs_theta(struct RuijsComplex z,
                             struct RuijsComplex p,
                             struct RuijsComplex *out);

/**
 * `Γ(z; p, q)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RuijsStatus ruijs_elliptic_gamma(struct RuijsComplex z,
                                      struct RuijsComplex p,
                                      struct RuijsComplex q,
                                      struct RuijsComplex *out);

/**
 * Builds `H^{(k)}_{m,r}` or one of its companion families.
 *
 * # Safety
 * `params` must be a live handle and `out` valid for writes.
 */
enum RuijsStatus ruijs_operator_build(const struct RuijsParams *params,
                                      enum RuijsFamily family,
                                      size_t m,
                                      size_t r,
                                      uint32_t k,
                                      struct RuijsOperator **out);

/**
 * `a ∘ b`.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum RuijsStatus ruijs_operator_compose(const struct RuijsOperator *a,
                                        const struct RuijsOperator *b,
                                        struct RuijsOperator **out);

/**
 * # Safety
 * `op` must come from this library and not be used afterwards. Null is ignored.
 */
void ruijs_operator_free(struct RuijsOperator *op);

/**
 * Number of variables (`m + r`) the operator acts on.
 *
 * # Safety
 * `op` must be a live handle and `out` valid for writes.
 */
enum RuijsStatus ruijs_operator_slots(const struct RuijsOperator *op, size_t *out);

/**
 * Number of distinct shifts with a stored coefficient.
 *
 * # Safety
 * `op` must be a live handle and `out` valid for writes.
 */
enum RuijsStatus ruijs_operator_term_count(const struct RuijsOperator *op, size_t *out);

/**
 * Coefficient of the shift `key` at `point`; both arrays have one entry per slot.
 *
 * # Safety
 * `op` must be a live handle, `key` and `point` valid for `len` reads, `out` valid for writes.
 */
enum RuijsStatus ruijs_operator_coefficient(const struct RuijsOperator *op,
                                            const int32_t *key,
                                            const struct RuijsComplex *point,
                                            size_t len,
                                            struct RuijsComplex *out);

/**
 * Compares `a ∘ b` with `b ∘ a` at `samples` seeded random points and
 * writes the largest relative residual.
 *
 * # Safety
 * `a`, `b` must be live handles and `max_residual` valid for writes.
 */
enum RuijsStatus ruijs_check_commute(const struct RuijsOperator *a,
                                     const struct RuijsOperator *b,
                                     size_t samples,
                                     uint64_t seed,
                                     double *max_residual);

/**
 * Runs a suite (`all`, `commutativity`, `wronski`, `kernel`, `sources`,
 * `transforms`, `independence`, `poincare`) or, if `name` is an identity name,
 * that identity. `config_json` may be null for defaults. On success
 * `*report_json` holds the JSON report (free with `ruijs_string_free`) and
 * `*exit_code` the CLI exit code (0 pass, 1 fail, 2 inconclusive).
 *
 * # Safety
 * String arguments must be null or NUL-terminated UTF-8; out pointers valid for writes.
 */
enum RuijsStatus ruijs_verify_json(const char *config_json,
                                   const char *name,
                                   char **report_json,
                                   int32_t *exit_code);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ruijs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RUIJS_H */
