/* Copyright 2026 The hybridcool Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef HYBRIDCOOL_H
#define HYBRIDCOOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every function.
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_CONFIG = 3,
  HC_STATUS_CONVERGENCE = 4,
  HC_STATUS_PHYSICALITY = 5,
  HC_STATUS_CUTOFF = 6,
  HC_STATUS_NUMERICAL = 7,
  HC_STATUS_HEATING = 8,
  HC_STATUS_PANIC = 9,
} HcStatus;

// Second-moment equations of the cavity and mechanics.
typedef struct HcMomentSystem HcMomentSystem;

// System parameters plus optional coupling overrides.
typedef struct HcParams HcParams;

typedef struct HcOptimalDrive {
  double rabi;
  double delta_q;
  double n_min;
  double f_max;
} HcOptimalDrive;

// Cooling and heating rates of one channel.
typedef struct HcRates {
  double minus;
  double plus;
  double net;
} HcRates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next call into the library from the same thread.
const char *hc_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *hc_version(void);

// Creates parameters holding the built-in figure values (Ω = 10 MHz,
// G = 0.2 MHz, γ = 1e-5 MHz, n_th = 1e3).
//
// # Safety
// `out` must be a valid pointer to writable storage for one pointer.
enum HcStatus hc_params_new_default(struct HcParams **out);

// Parses a TOML configuration document.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum HcStatus hc_params_from_toml(const char *text, struct HcParams **out);

// Releases parameters. NULL is ignored.
//
// # Safety
// `h` must be NULL or a pointer returned by this library and not yet freed.
void hc_params_free(struct HcParams *h);

// Reads a parameter by its config name ("Omega", "kappa", ..., or "G",
// "G_o" for the coupling overrides; an unset override reads as NaN).
//
// # Safety
// `h` must be a live handle, `field` NUL-terminated, `out` writable.
enum HcStatus hc_params_get(const struct HcParams *h, const char *field, double *out);

// Sets a parameter by its config name and revalidates; the handle is left
// unchanged when validation fails. NaN clears the "G"/"G_o" overrides.
//
// # Safety
// `h` must be a live handle and `field` NUL-terminated.
enum HcStatus hc_params_set(struct HcParams *h, const char *field, double value);

// Drive maximizing the qubit cooling rate and its occupancy limit.
//
// # Safety
// `out` must be writable.
enum HcStatus hc_optimal_drive(double omega,
                               double relax,
                               double dephase,
                               double n_q,
                               struct HcOptimalDrive *out);

// Phonon occupancy limit of cavity cooling for Δ_c < 0.
//
// # Safety
// `out` must be writable.
enum HcStatus hc_cavity_quantum_limit(double omega, double delta_c, double kappa, double *out);

// Weak-coupling rates of the qubit and cavity channels with the couplings
// "G" and "G_o" of `h` (G_o = 0 when unset).
//
// # Safety
// `h` must be a live handle; `qubit` and `cavity` writable.
enum HcStatus hc_rates(const struct HcParams *h,
                       bool strict_paper,
                       struct HcRates *qubit,
                       struct HcRates *cavity);

// Steady phonon number of the weak-coupling rate equation.
//
// # Safety
// `h` must be a live handle; `out` writable.
enum HcStatus hc_steady_phonon(const struct HcParams *h, bool strict_paper, double *out);

// Builds the moment equations from `h` with qubit coupling "G" and
// optomechanical coupling "G_o" (both required).
//
// # Safety
// `h` must be a live handle; `out` writable.
enum HcStatus hc_moment_system_new(const struct HcParams *h,
                                   bool strict_paper,
                                   struct HcMomentSystem **out);

// Releases a moment system. NULL is ignored.
//
// # Safety
// `s` must be NULL or a pointer returned by this library and not yet freed.
void hc_moment_system_free(struct HcMomentSystem *s);

// ⟨b†b⟩ at `n_times` times, starting from the vacuum cavity and a thermal
// mechanical state with occupancy `n_b0`.
//
// # Safety
// `s` must be live; `times` and `out_n_b` must each hold `n_times` doubles.
enum HcStatus hc_moment_evolve(const struct HcMomentSystem *s,
                               double n_b0,
                               const double *times,
                               uintptr_t n_times,
                               double *out_n_b);

// Steady ⟨b†b⟩ of the moment equations.
//
// # Safety
// `s` must be live; `out` writable.
enum HcStatus hc_moment_steady(const struct HcMomentSystem *s, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYBRIDCOOL_H */
