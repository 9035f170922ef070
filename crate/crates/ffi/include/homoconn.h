#ifndef HOMOCONN_H
#define HOMOCONN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HomoconnStatus {
  HOMOCONN_STATUS_OK = 0,
  HOMOCONN_STATUS_NULL_POINTER = 1,
  HOMOCONN_STATUS_INVALID_ARGUMENT = 2,
  HOMOCONN_STATUS_UNSUPPORTED = 3,
  HOMOCONN_STATUS_BUFFER_TOO_SMALL = 4,
  HOMOCONN_STATUS_VERIFICATION_FAILED = 5,
  HOMOCONN_STATUS_INTERNAL = 6,
} HomoconnStatus;

typedef enum HomoconnEinstein {
  HOMOCONN_EINSTEIN_NOT_APPLICABLE = 0,
  HOMOCONN_EINSTEIN_EINSTEIN = 1,
  HOMOCONN_EINSTEIN_NOT_EINSTEIN = 2,
} HomoconnEinstein;

// Opaque connection handle.
typedef struct HomoconnConnection HomoconnConnection;

// Dimensions of the invariant, metric and skew-torsion connection spaces.
typedef struct HomoconnDims {
  uint32_t n;
  uint32_t invariant;
  uint32_t metric;
  uint32_t skew;
} HomoconnDims;

// Scalar summary of a connection report.
typedef struct HomoconnSummary {
  uint32_t dim;
  double scalar;
  double scalar_via_torsion;
  double torsion_norm_sq;
  double curvature_max;
  double torsion_max;
  double route_gap;
  double einstein_residual;
  bool is_metric;
  bool is_skew_torsion;
  enum HomoconnEinstein einstein;
} HomoconnSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread; NULL when there is none.
// The result must be released with `homoconn_string_free`.
char *homoconn_last_error(void);

// Static description of a status code.
const char *homoconn_status_message(enum HomoconnStatus status);

// Solver dimensions for S^{2n+1}.
//
// # Safety
// `out` must be null or point to writable memory for one `HomoconnDims`.
enum HomoconnStatus homoconn_dims(uint32_t n, struct HomoconnDims *out);

// Builds the skew-torsion connection with parameters (r, q) on the sphere
// named by `sphere` ("s3", "s5", "s7", "s9", ...). `has_q` selects whether q
// is passed; it must be false for spheres without a q parameter.
//
// # Safety
// `sphere` must be a valid NUL-terminated string and `out` must be null or
// point to writable memory for one pointer.
enum HomoconnStatus homoconn_connection_skew(const char *sphere,
                                             double r,
                                             bool has_q,
                                             double q_re,
                                             double q_im,
                                             double tolerance,
                                             struct HomoconnConnection **out);

// Releases a handle; NULL is ignored.
//
// # Safety
// `h` must be null or a handle from `homoconn_connection_skew` not yet freed.
void homoconn_connection_free(struct HomoconnConnection *h);

// # Safety
// `h` must be a live handle and `out` must point to one `HomoconnSummary`.
enum HomoconnStatus homoconn_connection_summary(const struct HomoconnConnection *h,
                                                struct HomoconnSummary *out);

// Writes Sym(Ric) row-major into `buf` (dim * dim entries). When `buf` is
// NULL or too small, `*needed` receives the required length.
//
// # Safety
// `h` must be a live handle, `buf` null or valid for `len` doubles, and
// `needed` null or valid for one size_t.
enum HomoconnStatus homoconn_connection_sym_ricci(const struct HomoconnConnection *h,
                                                  double *buf,
                                                  size_t len,
                                                  size_t *needed);

// Full JSON report of the connection; release with `homoconn_string_free`.
// Returns NULL on failure.
//
// # Safety
// `h` must be null or a live handle.
char *homoconn_connection_json(const struct HomoconnConnection *h);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void homoconn_string_free(char *s);

// Runs the verification batteries; `*all_passed` receives the verdict.
// Returns `VerificationFailed` when any battery fails.
//
// # Safety
// `all_passed` must be null or valid for one bool.
enum HomoconnStatus homoconn_verify(uint64_t seed, uint32_t trials, bool *all_passed);

// Whether the named sphere class has a complex q parameter (s5, s7).
//
// # Safety
// `sphere` must be null or a valid NUL-terminated string.
bool homoconn_sphere_has_q(const char *sphere);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMOCONN_H */
