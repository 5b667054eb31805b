/* Copyright 2026 nmrqip contributors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef NMRQIP_H
#define NMRQIP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NmrStatus {
  NMR_STATUS_OK = 0,
  NMR_STATUS_NULL_POINTER = 1,
  NMR_STATUS_INVALID_ARGUMENT = 2,
  NMR_STATUS_DIMENSION_MISMATCH = 3,
  // GRAPE stopped short of its target; outputs are still written.
  NMR_STATUS_NOT_CONVERGED = 4,
  NMR_STATUS_INTERNAL = 5,
} NmrStatus;

typedef struct NmrDensity NmrDensity;

typedef struct NmrPulse NmrPulse;

typedef struct NmrSpinSystem NmrSpinSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next call into this library from the same thread.
const char *nmr_last_error_message(void);

// Frees a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void nmr_string_free(char *s);

// Loads a bundled molecule (`chloroform`, `malonic`, `crotonic`, `chain7`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum NmrStatus nmr_spin_system_preset(const char *name, struct NmrSpinSystem **out);

// Parses a molecule JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum NmrStatus nmr_spin_system_from_json(const char *json, struct NmrSpinSystem **out);

// Number of spins, 0 for NULL.
//
// # Safety
// `sys` must be NULL or a live handle.
size_t nmr_spin_system_num_spins(const struct NmrSpinSystem *sys);

// # Safety
// `sys` must be NULL or a handle not yet freed.
void nmr_spin_system_free(struct NmrSpinSystem *sys);

// Pseudo-pure state `(1 − ε)/2^n I + ε|0…0⟩⟨0…0|`.
//
// # Safety
// `out` must be writable.
enum NmrStatus nmr_pps_new(size_t n, double epsilon, struct NmrDensity **out);

// Hilbert-space dimension, 0 for NULL.
//
// # Safety
// `rho` must be NULL or a live handle.
size_t nmr_density_dim(const struct NmrDensity *rho);

// `Tr(ρ P)` for a Pauli label such as `"XZ"` or `"-IY"`.
//
// # Safety
// `rho` must be a live handle, `pauli` NUL-terminated, `out` writable.
enum NmrStatus nmr_density_expectation_pauli(const struct NmrDensity *rho,
                                             const char *pauli,
                                             double *out);

// # Safety
// `rho` must be NULL or a handle not yet freed.
void nmr_density_free(struct NmrDensity *rho);

// GRAPE towards `target` (row-major `dim × dim`) from a seeded random pulse.
// Writes the pulse and its fidelity even when the target fidelity is not
// reached, in which case the status is `NotConverged`.
//
// # Safety
// `sys` must be a live handle, the target arrays must hold `dim²` values,
// `out_pulse` and `out_fidelity` must be writable.
enum NmrStatus nmr_grape_optimize(const struct NmrSpinSystem *sys,
                                  const double *target_re,
                                  const double *target_im,
                                  size_t dim,
                                  size_t n_steps,
                                  double dt,
                                  size_t max_iters,
                                  double target_fidelity,
                                  uint64_t seed,
                                  struct NmrPulse **out_pulse,
                                  double *out_fidelity);

// GRAPE for a CNOT between two spins of `sys`.
//
// # Safety
// As [`nmr_grape_optimize`].
enum NmrStatus nmr_grape_cnot(const struct NmrSpinSystem *sys,
                              size_t control,
                              size_t target,
                              size_t n_steps,
                              double dt,
                              size_t max_iters,
                              double target_fidelity,
                              uint64_t seed,
                              struct NmrPulse **out_pulse,
                              double *out_fidelity);

// Number of time steps, 0 for NULL.
//
// # Safety
// `pulse` must be NULL or a live handle.
size_t nmr_pulse_num_steps(const struct NmrPulse *pulse);

// JSON form of a pulse; free with [`nmr_string_free`]. NULL on failure.
//
// # Safety
// `pulse` must be a live handle.
char *nmr_pulse_to_json(const struct NmrPulse *pulse);

// # Safety
// `json` must be NUL-terminated and `out` writable.
enum NmrStatus nmr_pulse_from_json(const char *json, struct NmrPulse **out);

// # Safety
// `pulse` must be NULL or a handle not yet freed.
void nmr_pulse_free(struct NmrPulse *pulse);

// `|Tr(U_th† U_exp)|² / d²` for two `dim × dim` row-major unitaries.
//
// # Safety
// All arrays must hold `dim²` values and `out` must be writable.
enum NmrStatus nmr_gate_fidelity_hs(const double *a_re,
                                    const double *a_im,
                                    const double *b_re,
                                    const double *b_im,
                                    size_t dim,
                                    double *out);

// Exact one-clean-qubit estimate of `Tr(U)/2^n` for an `n_target`-qubit `U`.
//
// # Safety
// The arrays must hold `4^n_target` values; outputs must be writable.
enum NmrStatus nmr_dqc1_trace(const double *u_re,
                              const double *u_im,
                              size_t n_target,
                              double epsilon,
                              double *out_re,
                              double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NMRQIP_H */
