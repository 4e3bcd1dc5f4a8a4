#ifndef GIANTBIC_H
#define GIANTBIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GbInitialState {
  GB_INITIAL_STATE_ATOM = 0,
  GB_INITIAL_STATE_P_STATE = 1,
} GbInitialState;

/**
 * Classification of an eigenstate, as returned by `gb_lattice_spectrum`.
 */
typedef enum GbStateKind {
  GB_STATE_KIND_CONTINUUM = 0,
  GB_STATE_KIND_BIC = 1,
  GB_STATE_KIND_BOC = 2,
  GB_STATE_KIND_DECOUPLED = 3,
} GbStateKind;

typedef enum GbStatus {
  GB_STATUS_OK = 0,
  GB_STATUS_NULL_POINTER = 1,
  GB_STATUS_CONFIG = 2,
  GB_STATUS_DOMAIN = 3,
  GB_STATUS_NUMERICAL = 4,
  GB_STATUS_ANALYSIS = 5,
  GB_STATUS_IO = 6,
  GB_STATUS_PANIC = 7,
  GB_STATUS_BUFFER_TOO_SMALL = 8,
} GbStatus;

/**
 * Opaque oscillating-BIC design.
 */
typedef struct GbDesign GbDesign;

/**
 * Opaque finite lattice with its atom couplings.
 */
typedef struct GbLattice GbLattice;

/**
 * Scalar summary of a design.
 */
typedef struct GbDesignInfo {
  size_t points;
  size_t spacing;
  double hopping;
  double omega_bic;
  double rho0;
  double phi_bic_sq;
  double tau;
  double gamma_inv;
  double nm_ratio;
  double osc_frequency;
  double period;
  /**
   * 0 for n0 divisible by 4, 2 for the M = 3, n0 = 4l + 2 branch.
   */
  uint32_t spacing_mod4;
} GbDesignInfo;

/**
 * Out-of-band bound states; index 0 is below the band.
 */
typedef struct GbBocInfo {
  double energies[2];
  double energies_asymptotic[2];
  double emitter_probability[2];
  double emitter_probability_asymptotic;
} GbBocInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gb_version(void);

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL,
 * or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t gb_last_error_message(char *buf, size_t len);

/**
 * Design the oscillating-BIC atom with `points` coupling points spaced by `spacing`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the caller.
 */
enum GbStatus gb_design_new(size_t points, size_t spacing, double hopping, struct GbDesign **out);

/**
 * # Safety
 * `design` must be null or a handle from `gb_design_new` not yet freed.
 */
void gb_design_free(struct GbDesign *design);

/**
 * # Safety
 * `design` must be a live handle and `out` a valid pointer.
 */
enum GbStatus gb_design_info(const struct GbDesign *design, struct GbDesignInfo *out);

/**
 * # Safety
 * `design` must be a live handle and `out` a valid pointer.
 */
enum GbStatus gb_design_boc(const struct GbDesign *design, struct GbBocInfo *out);

/**
 * Chain of `sites` sites carrying the design centred in it, with
 * rho1/rho0 = J'/J = `imperfection_ratio`.
 *
 * # Safety
 * `design` must be a live handle and `out` a valid pointer.
 */
enum GbStatus gb_lattice_from_design(const struct GbDesign *design,
                                     size_t sites,
                                     double imperfection_ratio,
                                     struct GbLattice **out);

/**
 * Chain with `points` couplings of strength `rho0` spaced by `spacing`,
 * the first at 1-based site `offset`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GbStatus gb_lattice_new(size_t sites,
                             double hopping,
                             double detuning,
                             size_t points,
                             size_t spacing,
                             double rho0,
                             size_t offset,
                             struct GbLattice **out);

/**
 * # Safety
 * `lattice` must be null or a handle not yet freed.
 */
void gb_lattice_free(struct GbLattice *lattice);

/**
 * Number of lattice sites, or 0 for a null handle.
 *
 * # Safety
 * `lattice` must be null or a live handle.
 */
size_t gb_lattice_sites(const struct GbLattice *lattice);

/**
 * Eigenvalues (ascending), emitter probabilities and kinds of every
 * eigenstate. `*count` receives N + 1; if `capacity` is smaller nothing is
 * written and `GB_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `lattice` must be a live handle, `count` valid, and each array must hold
 * `capacity` elements.
 */
enum GbStatus gb_lattice_spectrum(const struct GbLattice *lattice,
                                  double *energies,
                                  double *emitter_probabilities,
                                  enum GbStateKind *kinds,
                                  size_t capacity,
                                  size_t *count);

/**
 * Atom probability and leakage at `n_times` sorted times. `initial` is a
 * `GbInitialState` value; `GB_INITIAL_STATE_P_STATE` needs a lattice built
 * from a design. `leakage` may be null.
 *
 * # Safety
 * `lattice` must be a live handle; `times` and `prob_atom` (and `leakage`
 * if non-null) must hold `n_times` elements.
 */
enum GbStatus gb_lattice_evolve(const struct GbLattice *lattice,
                                uint32_t initial,
                                const double *times,
                                size_t n_times,
                                double *prob_atom,
                                double *leakage);

/**
 * Preparation table of |p>: 1-based sites and complex amplitudes of every
 * site above the amplitude floor. `*count` receives the table length.
 *
 * # Safety
 * `lattice` must be a live handle built from a design, `count` valid, and
 * each array must hold `capacity` elements.
 */
enum GbStatus gb_lattice_p_state(const struct GbLattice *lattice,
                                 size_t *sites,
                                 double *re,
                                 double *im,
                                 size_t capacity,
                                 size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIANTBIC_H */
