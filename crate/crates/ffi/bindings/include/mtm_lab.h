#ifndef MTM_LAB_H
#define MTM_LAB_H

#include <stddef.h>
#include <stdint.h>

typedef enum MtmStatus {
  MTM_STATUS_OK = 0,
  MTM_STATUS_NULL_POINTER = 1,
  MTM_STATUS_INVALID_ARGUMENT = 2,
  MTM_STATUS_OUT_OF_RANGE = 3,
  MTM_STATUS_CONFIG = 4,
  MTM_STATUS_NUMERICAL = 5,
  MTM_STATUS_IO = 6,
  MTM_STATUS_PANIC = 7,
} MtmStatus;

/**
 * Which reflection coefficient to sample: r on the w-line or r-hat on the z-line.
 */
typedef enum MtmReflection {
  MTM_REFLECTION_W = 0,
  MTM_REFLECTION_Z = 1,
} MtmReflection;

typedef enum MtmCommand {
  MTM_COMMAND_SIMULATE = 0,
  MTM_COMMAND_SCATTER = 1,
  MTM_COMMAND_PREDICT = 2,
  MTM_COMMAND_SOLITON = 3,
  MTM_COMMAND_RECONSTRUCT = 4,
  MTM_COMMAND_RESOLVE = 5,
  MTM_COMMAND_REPORT = 6,
} MtmCommand;

/**
 * Field state (u, v) on a uniform grid at one time.
 */
typedef struct MtmFields MtmFields;

/**
 * Reflection coefficients and discrete spectrum.
 */
typedef struct MtmScattering MtmScattering;

typedef struct MtmComplex {
  double re;
  double im;
} MtmComplex;

/**
 * Both field components at one point.
 */
typedef struct MtmPoint {
  struct MtmComplex u;
  struct MtmComplex v;
} MtmPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *mtm_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mtm_string_free(char *s);

/**
 * Copies `n` samples of u and v on the grid x_start + k dx into a new handle.
 *
 * # Safety
 * `u` and `v` must point to `n` readable values; `out` must be writable.
 */
enum MtmStatus mtm_fields_new(double t,
                              double x_start,
                              double dx,
                              uintptr_t n,
                              const struct MtmComplex *u,
                              const struct MtmComplex *v,
                              struct MtmFields **out);

/**
 * Gaussian data u = a exp(-(x/width)^2), v = e^{i phase} u on [-half_width, half_width].
 *
 * # Safety
 * `out` must be writable.
 */
enum MtmStatus mtm_fields_gaussian(double amplitude,
                                   double width,
                                   double v_phase,
                                   double half_width,
                                   double dx,
                                   struct MtmFields **out);

/**
 * # Safety
 * `f` must be null or a live handle from this library.
 */
void mtm_fields_free(struct MtmFields *f);

/**
 * Number of grid points; 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
uintptr_t mtm_fields_len(const struct MtmFields *f);

/**
 * Time, first node and spacing of the grid.
 *
 * # Safety
 * `f` must be a live handle; outputs must be writable.
 */
enum MtmStatus mtm_fields_grid(const struct MtmFields *f, double *t, double *x_start, double *dx);

/**
 * Node k and the fields there.
 *
 * # Safety
 * `f` must be a live handle; outputs must be writable (`x` may be null).
 */
enum MtmStatus mtm_fields_get(const struct MtmFields *f,
                              uintptr_t k,
                              double *x,
                              struct MtmPoint *out);

/**
 * Conserved charge, the integral of |u|^2 + |v|^2.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_fields_charge(const struct MtmFields *f, double *out);

/**
 * Advances to `t_final` with the split-step solver (time step = dx).
 * `drift`, if non-null, receives the relative charge drift.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_fields_evolve(const struct MtmFields *f,
                                 double t_final,
                                 struct MtmFields **out,
                                 double *drift);

/**
 * Direct transform sampling r and r-hat at `n_grid` points of [w_min, w_max].
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_scatter(const struct MtmFields *f,
                           double w_min,
                           double w_max,
                           uintptr_t n_grid,
                           struct MtmScattering **out);

/**
 * Parses scattering data in the JSON layout written by `mtm-lab scatter`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MtmStatus mtm_scattering_from_json(const char *json, struct MtmScattering **out);

/**
 * Serializes to JSON; release the string with `mtm_string_free`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_scattering_to_json(const struct MtmScattering *s, char **out);

/**
 * # Safety
 * `s` must be null or a live handle from this library.
 */
void mtm_scattering_free(struct MtmScattering *s);

/**
 * Number of eigenvalues; 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
uintptr_t mtm_scattering_eigen_count(const struct MtmScattering *s);

/**
 * Eigenvalue lambda_j and norming constant C_j.
 *
 * # Safety
 * `s` must be a live handle; outputs must be writable.
 */
enum MtmStatus mtm_scattering_eigen(const struct MtmScattering *s,
                                    uintptr_t j,
                                    struct MtmComplex *lambda,
                                    struct MtmComplex *big_c);

/**
 * Interpolated reflection coefficient at `at`; zero outside the sampled range.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_scattering_reflection(const struct MtmScattering *s,
                                         enum MtmReflection which,
                                         double at,
                                         struct MtmComplex *out);

/**
 * Scattering data at time t under the linear flow.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_scattering_evolve(const struct MtmScattering *s,
                                     double t,
                                     struct MtmScattering **out);

/**
 * Leading-order long-time fields at (t, x) from the radiation part.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_predict(const struct MtmScattering *s, double t, double x, struct MtmPoint *out);

/**
 * Fields at (t, x) through the Riemann-Hilbert problem, on a contour
 * [-half_width, half_width] with `nodes` points. Radiation-only or
 * reflectionless data.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum MtmStatus mtm_reconstruct(const struct MtmScattering *s,
                               double t,
                               double x,
                               double half_width,
                               uintptr_t nodes,
                               struct MtmPoint *out);

/**
 * Exact one-soliton fields for eigenvalue lambda and norming constant C.
 *
 * # Safety
 * `out` must be writable.
 */
enum MtmStatus mtm_one_soliton(struct MtmComplex lambda,
                               struct MtmComplex big_c,
                               double t,
                               double x,
                               struct MtmPoint *out);

/**
 * Runs one CLI command on a JSON config file, writing into `out_dir`.
 * `passed` receives 1 if every check held, else 0. `run_dir`, if non-null,
 * receives the directory written (free with `mtm_string_free`).
 *
 * # Safety
 * Strings must be NUL-terminated; `passed` must be writable.
 */
enum MtmStatus mtm_run(enum MtmCommand command,
                       const char *config_path,
                       const char *out_dir,
                       int32_t *passed,
                       char **run_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MTM_LAB_H */
