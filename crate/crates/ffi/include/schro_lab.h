#ifndef SCHRO_LAB_H
#define SCHRO_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. `SL_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum sl_status {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_DIMENSION_MISMATCH = 3,
  SL_STATUS_UNSUPPORTED = 4,
  SL_STATUS_PARSE = 5,
  SL_STATUS_BUFFER_TOO_SMALL = 6,
  SL_STATUS_INTERNAL = 7,
} sl_status;

/*
 Dispersion relation selector. `param` carries `a` for `Fractional` and
 the sign (±1) for `Saddle`; it is ignored otherwise.
 */
typedef enum sl_symbol_kind {
  SL_SYMBOL_KIND_ELLIPTIC = 0,
  SL_SYMBOL_KIND_FRACTIONAL = 1,
  SL_SYMBOL_KIND_NONELLIPTIC = 2,
  /*
   `ξ₁ξ₂` in two dimensions.
   */
  SL_SYMBOL_KIND_HYPERBOLIC = 3,
  /*
   `ξ₁ξ₂ ± ξ₃²` in three dimensions.
   */
  SL_SYMBOL_KIND_SADDLE = 4,
} sl_symbol_kind;

typedef enum sl_family {
  SL_FAMILY_SCHRODINGER = 0,
  SL_FAMILY_FRACTIONAL = 1,
  SL_FAMILY_NONELLIPTIC = 2,
} sl_family;

/*
 Opaque band-limited field.
 */
typedef struct sl_field sl_field;

/*
 Opaque time sequence.
 */
typedef struct sl_sequence sl_sequence;

typedef struct sl_symbol {
  enum sl_symbol_kind kind;
  double param;
} sl_symbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *sl_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/*
 Frees a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void sl_string_free(char *s);

/*
 Parses a field from its JSON form.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum sl_status sl_field_from_json(const char *json, struct sl_field **out);

/*
 Serializes a field to JSON. Release the string with [`sl_string_free`].

 # Safety
 `field` must be a live handle; `out` must be writable.
 */
enum sl_status sl_field_to_json(const struct sl_field *field, char **out);

/*
 Seeded random sum of smooth bumps supported in `inner ≤ |ξ| < outer`,
 sampled on the lattice `atom_step·ℤ^N`.

 # Safety
 `out` must be writable.
 */
enum sl_status sl_field_random(size_t dimension,
                               double inner,
                               double outer,
                               double atom_step,
                               size_t bumps,
                               uint64_t seed,
                               struct sl_field **out);

/*
 # Safety
 `field` must be null or a handle from this library not yet freed.
 */
void sl_field_free(struct sl_field *field);

/*
 # Safety
 `field` must be a live handle; `out` must be writable.
 */
enum sl_status sl_field_dimension(const struct sl_field *field, size_t *out);

/*
 Frequency-side L² norm.

 # Safety
 `field` must be a live handle; `out` must be writable.
 */
enum sl_status sl_field_l2_norm(const struct sl_field *field, double *out);

/*
 # Safety
 `field` must be a live handle; `out` must be writable.
 */
enum sl_status sl_field_sobolev_norm(const struct sl_field *field, double s, double *out);

/*
 New field `e^{itσ(D)}f`.

 # Safety
 `field` must be a live handle; `sym` must point to a valid symbol; `out`
 must be writable.
 */
enum sl_status sl_field_propagate(const struct sl_field *field,
                                  double t,
                                  const struct sl_symbol *sym,
                                  struct sl_field **out);

/*
 `e^{itσ(D)}f(x)` written to `re`/`im`. `x` holds `len` coordinates.

 # Safety
 `field` must be a live handle; `x` must point to `len` doubles; `sym`
 must be valid; `re` and `im` must be writable.
 */
enum sl_status sl_field_evaluate(const struct sl_field *field,
                                 const double *x,
                                 size_t len,
                                 double t,
                                 const struct sl_symbol *sym,
                                 double *re,
                                 double *im);

/*
 `t_n = (n+1)^{−1/r}` for `n = 1..=count`.

 # Safety
 `out` must be writable.
 */
enum sl_status sl_sequence_power(double r, size_t count, struct sl_sequence **out);

/*
 Concatenated lattice blocks at scales `R_1 = first_scale, R_2, …`.

 # Safety
 `out` must be writable.
 */
enum sl_status sl_sequence_block(double r,
                                 size_t dimension,
                                 double first_scale,
                                 size_t block_count,
                                 struct sl_sequence **out);

/*
 # Safety
 `seq` must be null or a handle from this library not yet freed.
 */
void sl_sequence_free(struct sl_sequence *seq);

/*
 # Safety
 `seq` must be a live handle; `out` must be writable.
 */
enum sl_status sl_sequence_len(const struct sl_sequence *seq, size_t *out);

/*
 Copies the decreasing times into `buf`, which must hold `sl_sequence_len` values.

 # Safety
 `seq` must be a live handle; `buf` must point to `capacity` writable doubles.
 */
enum sl_status sl_sequence_values(const struct sl_sequence *seq, double *buf, size_t capacity);

/*
 `sup_b b^r ♯{n : t_n > b}`.

 # Safety
 `seq` must be a live handle; `out` must be writable.
 */
enum sl_status sl_sequence_quasinorm(const struct sl_sequence *seq, double r, double *out);

/*
 Sharp regularity threshold `s₀`. Pass `r = INFINITY` for the continuous
 case; `a` is read only for the fractional family. `inclusive` is set to 1
 when the endpoint itself is admissible.

 # Safety
 `family` must be one of the enumerators; `s0` and `inclusive` must be writable.
 */
enum sl_status sl_threshold(enum sl_family family,
                            double a,
                            size_t dimension,
                            double r,
                            double *s0,
                            int32_t *inclusive);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHRO_LAB_H */
