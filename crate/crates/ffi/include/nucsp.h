#ifndef NUCSP_H
#define NUCSP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NucspStatus {
  NUCSP_STATUS_OK = 0,
  NUCSP_STATUS_NULL_POINTER = 1,
  NUCSP_STATUS_DOMAIN = 2,
  NUCSP_STATUS_CONVERGENCE = 3,
  NUCSP_STATUS_NOT_FOUND = 4,
  NUCSP_STATUS_INVALID_UTF8 = 5,
  NUCSP_STATUS_PANIC = 6,
  NUCSP_STATUS_IO = 7,
} NucspStatus;

/**
 * Opaque crystal film.
 */
typedef struct NucspFilm NucspFilm;

/**
 * Opaque nuclide record.
 */
typedef struct NucspNuclide NucspNuclide;

/**
 * Opaque probe.
 */
typedef struct NucspProbe NucspProbe;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or an empty
 * string. The pointer stays valid until the next failing call on the
 * same thread.
 */
const char *nucsp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nucsp_version(void);

/**
 * Looks up a built-in nuclide such as `"Fe-57"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum NucspStatus nucsp_nuclide_from_name(const char *name, struct NucspNuclide **out);

/**
 * Creates a nuclide from its parameters. Spins are doubled.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum NucspStatus nucsp_nuclide_new(const char *name,
                                   double e0_kev,
                                   double lifetime_s,
                                   double alpha_ic,
                                   int32_t jg2,
                                   int32_t je2,
                                   double branch_divisor,
                                   struct NucspNuclide **out);

/**
 * # Safety
 * `p` must be null or a handle from a nuclide constructor, freed once.
 */
void nucsp_nuclide_free(struct NucspNuclide *p);

/**
 * Coherent radiative decay rate, 1/s.
 *
 * # Safety
 * `n` must be a live nuclide handle; `out` must be writable.
 */
enum NucspStatus nucsp_radiative_rate(const struct NucspNuclide *n, double *out);

/**
 * Exact coherent fraction for doubled spins `jg2 -> je2`, as a reduced
 * fraction.
 *
 * # Safety
 * `num` and `den` must be writable.
 */
enum NucspStatus nucsp_coherent_fraction(int32_t jg2, int32_t je2, int64_t *num, int64_t *den);

/**
 * Creates a probe of charge `z_charge` e, rest energy in eV, speed `beta` c.
 *
 * # Safety
 * `out` must be writable.
 */
enum NucspStatus nucsp_probe_new(int32_t z_charge,
                                 double rest_energy_ev,
                                 double beta,
                                 struct NucspProbe **out);

/**
 * # Safety
 * `p` must be null or a handle from [`nucsp_probe_new`], freed once.
 */
void nucsp_probe_free(struct NucspProbe *p);

/**
 * Coherent single-nucleus photon yield at transverse distance `r_perp_nm`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum NucspStatus nucsp_coherent_yield(const struct NucspProbe *probe,
                                      const struct NucspNuclide *nuclide,
                                      double r_perp_nm,
                                      double *out);

/**
 * Looks up a lattice preset (`"sc100"`, `"bcc100"`, `"fcc100"`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum NucspStatus nucsp_film_from_preset(const char *name,
                                        uint32_t n_layers,
                                        struct NucspFilm **out);

/**
 * Creates a film with square period `a_nm` and interlayer displacement
 * `(b_x, b_y, b_z)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NucspStatus nucsp_film_new(double a_nm,
                                double b_x_nm,
                                double b_y_nm,
                                double b_z_nm,
                                uint32_t n_layers,
                                struct NucspFilm **out);

/**
 * # Safety
 * `p` must be null or a film handle, freed once.
 */
void nucsp_film_free(struct NucspFilm *p);

/**
 * Photon yield per atomic layer and per squared probe charge, summed over
 * every emission cone, with a hard reciprocal cutoff at `1 / r_min_nm`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum NucspStatus nucsp_layer_yield(const struct NucspProbe *probe,
                                   const struct NucspNuclide *nuclide,
                                   const struct NucspFilm *film,
                                   double r_min_nm,
                                   double *out);

/**
 * Bremsstrahlung probability within `window_ev` around `center_ev`.
 *
 * # Safety
 * `probe` must be live; `out` must be writable.
 */
enum NucspStatus nucsp_br_window_yield(const struct NucspProbe *probe,
                                       uint32_t z_nucleus,
                                       double r_perp_nm,
                                       double center_ev,
                                       double window_ev,
                                       double *out);

/**
 * Modified Bessel function K0.
 *
 * # Safety
 * `out` must be writable.
 */
enum NucspStatus nucsp_bessel_k0(double x, double *out);

/**
 * Modified Bessel function K1.
 *
 * # Safety
 * `out` must be writable.
 */
enum NucspStatus nucsp_bessel_k1(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NUCSP_H */
