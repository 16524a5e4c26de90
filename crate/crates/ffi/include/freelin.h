#ifndef FREELIN_H
#define FREELIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of [`freelin_endo_invert`].
typedef enum FreelinInversion {
  FREELIN_INVERSION_EXACT = 0,
  FREELIN_INVERSION_TRUNCATED = 1,
  FREELIN_INVERSION_NOT_INVERTIBLE = 2,
  FREELIN_INVERSION_INCONCLUSIVE = 3,
} FreelinInversion;

// Outcome of [`freelin_endo_jacobian_invertible`].
typedef enum FreelinJacobian {
  FREELIN_JACOBIAN_INVERTIBLE = 0,
  FREELIN_JACOBIAN_NOT_INVERTIBLE_AT_CUTOFF = 1,
  FREELIN_JACOBIAN_INCONCLUSIVE = 2,
} FreelinJacobian;

typedef enum FreelinStatus {
  FREELIN_STATUS_OK = 0,
  FREELIN_STATUS_NULL_POINTER = 1,
  FREELIN_STATUS_INVALID_UTF8 = 2,
  FREELIN_STATUS_INVALID_INPUT = 3,
  FREELIN_STATUS_TERM_LIMIT = 4,
  // A computation ran but its mathematical precondition failed.
  FREELIN_STATUS_COMPUTATION = 5,
  FREELIN_STATUS_PANIC = 6,
} FreelinStatus;

// A torus action on a free algebra.
typedef struct FreelinAction FreelinAction;

// An endomorphism of a free algebra.
typedef struct FreelinEndo FreelinEndo;

// A free polynomial over Q or a prime field.
typedef struct FreelinPoly FreelinPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *freelin_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void freelin_string_free(char *s);

// Parses `text` as a polynomial in z1..zn over `field` ("Q" or "Fp:<p>").
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum FreelinStatus freelin_poly_parse(const char *text,
                                      const char *field,
                                      size_t n,
                                      struct FreelinPoly **out);

// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum FreelinStatus freelin_poly_mul(const struct FreelinPoly *a,
                                    const struct FreelinPoly *b,
                                    struct FreelinPoly **out);

// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum FreelinStatus freelin_poly_add(const struct FreelinPoly *a,
                                    const struct FreelinPoly *b,
                                    struct FreelinPoly **out);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum FreelinStatus freelin_poly_to_string(const struct FreelinPoly *p, char **out);

// # Safety
// `p` must come from this library and not have been freed. Null is ignored.
void freelin_poly_free(struct FreelinPoly *p);

// Reads `{"field", "n", "images"}`.
//
// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum FreelinStatus freelin_endo_from_json(const char *json, struct FreelinEndo **out);

// # Safety
// `e` must be a live handle; `out` must be writable.
enum FreelinStatus freelin_endo_to_json(const struct FreelinEndo *e, char **out);

// The composite whose i-th image is ψᵢ with zⱼ replaced by φⱼ.
//
// # Safety
// `phi` and `psi` must be live handles; `out` must be writable.
enum FreelinStatus freelin_endo_compose(const struct FreelinEndo *phi,
                                        const struct FreelinEndo *psi,
                                        struct FreelinEndo **out);

// Bounded inversion. `cutoff` 0 selects the default escalation. `inverse`
// may be null; otherwise it receives the candidate inverse, or null when
// there is none.
//
// # Safety
// `e` must be a live handle; `status` must be writable.
enum FreelinStatus freelin_endo_invert(const struct FreelinEndo *e,
                                       size_t cutoff,
                                       enum FreelinInversion *status,
                                       struct FreelinEndo **inverse);

// Whether the Jacobian matrix has an inverse with entries of degree at
// most `cutoff`.
//
// # Safety
// `e` must be a live handle; `result` must be writable.
enum FreelinStatus freelin_endo_jacobian_invertible(const struct FreelinEndo *e,
                                                    size_t cutoff,
                                                    enum FreelinJacobian *result);

// # Safety
// `e` must come from this library and not have been freed. Null is ignored.
void freelin_endo_free(struct FreelinEndo *e);

// Reads `{"field", "n", "r", "images"}`.
//
// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum FreelinStatus freelin_action_from_json(const char *json, struct FreelinAction **out);

// Checks the action axioms; `valid` receives 1 or 0.
//
// # Safety
// `a` must be a live handle; `valid` must be writable.
enum FreelinStatus freelin_action_validate(const struct FreelinAction *a, int32_t *valid);

// Runs the averaging linearization and returns its report as JSON.
//
// # Safety
// `a` must be a live handle; `report` must be writable.
enum FreelinStatus freelin_action_linearize(const struct FreelinAction *a, char **report);

// # Safety
// `a` must come from this library and not have been freed. Null is ignored.
void freelin_action_free(struct FreelinAction *a);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREELIN_H */
