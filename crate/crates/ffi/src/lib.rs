// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

//! C interface to nmrqip.
//!
//! Every fallible call returns an [`NmrStatus`]; on failure the message is
//! kept per thread and read back with [`nmr_last_error_message`]. Objects are
//! opaque handles released by their `_free` function. Matrices cross the
//! boundary as separate row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nmrqip::control::{cnot_matrix, grape::initial_guess, grape_optimize, ControlPulse, GrapeConfig};
use nmrqip::experiments::{dqc1_trace, Dqc1Instance, Dqc1Mode};
use nmrqip::qop::{self, Mat, C64};
use nmrqip::spin::{self, Preset, SpinSystem};
use nmrqip::{Error, PauliString};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// GRAPE stopped short of its target; outputs are still written.
    NotConverged = 4,
    Internal = 5,
}

pub struct NmrSpinSystem(SpinSystem);
pub struct NmrDensity(Mat);
pub struct NmrPulse(ControlPulse);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(NmrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } => NmrStatus::DimensionMismatch,
            Error::InvalidArgument(_)
            | Error::InvalidOperator(_)
            | Error::Unphysical(_)
            | Error::NotClifford(_)
            | Error::Config(_)
            | Error::Json(_) => NmrStatus::InvalidArgument,
            _ => NmrStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NmrStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(NmrStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<NmrStatus, Fail>) -> NmrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            NmrStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn matrix_arg(re: *const f64, im: *const f64, dim: usize) -> Result<Mat, Fail> {
    if re.is_null() || im.is_null() {
        return Err(null("matrix data"));
    }
    if dim == 0 || dim > 1 << 7 {
        return Err(invalid("matrix dimension must be in 1..=128"));
    }
    let re = std::slice::from_raw_parts(re, dim * dim);
    let im = std::slice::from_raw_parts(im, dim * dim);
    Ok(Mat::from_fn(dim, dim, |r, c| C64::new(re[r * dim + c], im[r * dim + c])))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn nmr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nmr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a bundled molecule (`chloroform`, `malonic`, `crotonic`, `chain7`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_spin_system_preset(name: *const c_char, out: *mut *mut NmrSpinSystem) -> NmrStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let p = Preset::from_name(name).ok_or_else(|| invalid(format!("unknown preset '{name}'")))?;
        write_out(out, Box::into_raw(Box::new(NmrSpinSystem(p.load()))))?;
        Ok(NmrStatus::Ok)
    })
}

/// Parses a molecule JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_spin_system_from_json(json: *const c_char, out: *mut *mut NmrSpinSystem) -> NmrStatus {
    guard(|| {
        let sys = SpinSystem::from_json(str_arg(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(NmrSpinSystem(sys))))?;
        Ok(NmrStatus::Ok)
    })
}

/// Number of spins, 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nmr_spin_system_num_spins(sys: *const NmrSpinSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.n())
}

/// # Safety
/// `sys` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nmr_spin_system_free(sys: *mut NmrSpinSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Pseudo-pure state `(1 − ε)/2^n I + ε|0…0⟩⟨0…0|`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_pps_new(n: usize, epsilon: f64, out: *mut *mut NmrDensity) -> NmrStatus {
    guard(|| {
        if !(1..=7).contains(&n) {
            return Err(invalid("qubit count must be in 1..=7"));
        }
        let rho = spin::make_pps(n, epsilon)?;
        write_out(out, Box::into_raw(Box::new(NmrDensity(rho))))?;
        Ok(NmrStatus::Ok)
    })
}

/// Hilbert-space dimension, 0 for NULL.
///
/// # Safety
/// `rho` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nmr_density_dim(rho: *const NmrDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.nrows())
}

/// `Tr(ρ P)` for a Pauli label such as `"XZ"` or `"-IY"`.
///
/// # Safety
/// `rho` must be a live handle, `pauli` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_density_expectation_pauli(
    rho: *const NmrDensity,
    pauli: *const c_char,
    out: *mut f64,
) -> NmrStatus {
    guard(|| {
        let rho = rho.as_ref().ok_or_else(|| null("rho"))?;
        let p: PauliString = str_arg(pauli, "pauli")?.parse()?;
        if 1usize << p.n() != rho.0.nrows() {
            return Err(Fail(NmrStatus::DimensionMismatch, format!("{}-qubit label on a {}-dim state", p.n(), rho.0.nrows())));
        }
        let sign = p.sign().ok_or_else(|| invalid("label must be Hermitian"))?;
        write_out(out, sign * qop::pauli_expectation(&rho.0, &p.unsigned()))?;
        Ok(NmrStatus::Ok)
    })
}

/// # Safety
/// `rho` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nmr_density_free(rho: *mut NmrDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// GRAPE towards `target` (row-major `dim × dim`) from a seeded random pulse.
/// Writes the pulse and its fidelity even when the target fidelity is not
/// reached, in which case the status is `NotConverged`.
///
/// # Safety
/// `sys` must be a live handle, the target arrays must hold `dim²` values,
/// `out_pulse` and `out_fidelity` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_grape_optimize(
    sys: *const NmrSpinSystem,
    target_re: *const f64,
    target_im: *const f64,
    dim: usize,
    n_steps: usize,
    dt: f64,
    max_iters: usize,
    target_fidelity: f64,
    seed: u64,
    out_pulse: *mut *mut NmrPulse,
    out_fidelity: *mut f64,
) -> NmrStatus {
    guard(|| {
        let sys = sys.as_ref().ok_or_else(|| null("sys"))?;
        let target = matrix_arg(target_re, target_im, dim)?;
        grape(&sys.0, &target, n_steps, dt, max_iters, target_fidelity, seed, out_pulse, out_fidelity)
    })
}

/// GRAPE for a CNOT between two spins of `sys`.
///
/// # Safety
/// As [`nmr_grape_optimize`].
#[no_mangle]
pub unsafe extern "C" fn nmr_grape_cnot(
    sys: *const NmrSpinSystem,
    control: usize,
    target: usize,
    n_steps: usize,
    dt: f64,
    max_iters: usize,
    target_fidelity: f64,
    seed: u64,
    out_pulse: *mut *mut NmrPulse,
    out_fidelity: *mut f64,
) -> NmrStatus {
    guard(|| {
        let sys = sys.as_ref().ok_or_else(|| null("sys"))?;
        let n = sys.0.n();
        if control == target || control >= n || target >= n {
            return Err(invalid("control and target must be distinct spins"));
        }
        let u = cnot_matrix(control, target, n);
        grape(&sys.0, &u, n_steps, dt, max_iters, target_fidelity, seed, out_pulse, out_fidelity)
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn grape(
    sys: &SpinSystem,
    target: &Mat,
    n_steps: usize,
    dt: f64,
    max_iters: usize,
    target_fidelity: f64,
    seed: u64,
    out_pulse: *mut *mut NmrPulse,
    out_fidelity: *mut f64,
) -> Result<NmrStatus, Fail> {
    if out_pulse.is_null() || out_fidelity.is_null() {
        return Err(null("output pointer"));
    }
    if n_steps == 0 {
        return Err(invalid("n_steps must be positive"));
    }
    let cfg = GrapeConfig { max_iters, target_fidelity, ..Default::default() };
    cfg.validate()?;
    let init = initial_guess(sys, n_steps, dt, cfg.u_max, seed)?;
    let out = grape_optimize(sys, target, &init, &cfg)?;
    out_fidelity.write(out.fidelity);
    out_pulse.write(Box::into_raw(Box::new(NmrPulse(out.pulse))));
    if out.status.is_converged() {
        Ok(NmrStatus::Ok)
    } else {
        set_error(format!("GRAPE stopped at fidelity {:.6} ({:?})", out.fidelity, out.status));
        Ok(NmrStatus::NotConverged)
    }
}

/// Number of time steps, 0 for NULL.
///
/// # Safety
/// `pulse` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nmr_pulse_num_steps(pulse: *const NmrPulse) -> usize {
    pulse.as_ref().map_or(0, |p| p.0.n_steps())
}

/// JSON form of a pulse; free with [`nmr_string_free`]. NULL on failure.
///
/// # Safety
/// `pulse` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nmr_pulse_to_json(pulse: *const NmrPulse) -> *mut c_char {
    clear_error();
    match pulse.as_ref() {
        Some(p) => CString::new(p.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_error("pulse is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_pulse_from_json(json: *const c_char, out: *mut *mut NmrPulse) -> NmrStatus {
    guard(|| {
        let p = ControlPulse::from_json(str_arg(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(NmrPulse(p))))?;
        Ok(NmrStatus::Ok)
    })
}

/// # Safety
/// `pulse` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nmr_pulse_free(pulse: *mut NmrPulse) {
    if !pulse.is_null() {
        drop(Box::from_raw(pulse));
    }
}

/// `|Tr(U_th† U_exp)|² / d²` for two `dim × dim` row-major unitaries.
///
/// # Safety
/// All arrays must hold `dim²` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_gate_fidelity_hs(
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    dim: usize,
    out: *mut f64,
) -> NmrStatus {
    guard(|| {
        let a = matrix_arg(a_re, a_im, dim)?;
        let b = matrix_arg(b_re, b_im, dim)?;
        write_out(out, qop::gate_fidelity_hs(&a, &b)?)?;
        Ok(NmrStatus::Ok)
    })
}

/// Exact one-clean-qubit estimate of `Tr(U)/2^n` for an `n_target`-qubit `U`.
///
/// # Safety
/// The arrays must hold `4^n_target` values; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nmr_dqc1_trace(
    u_re: *const f64,
    u_im: *const f64,
    n_target: usize,
    epsilon: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NmrStatus {
    guard(|| {
        if !(1..=6).contains(&n_target) {
            return Err(invalid("n_target must be in 1..=6"));
        }
        let u = matrix_arg(u_re, u_im, 1 << n_target)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = dqc1_trace(&Dqc1Instance { u, epsilon, mode: Dqc1Mode::Exact }, &mut rng)?;
        write_out(out_re, e.re)?;
        write_out(out_im, e.im)?;
        Ok(NmrStatus::Ok)
    })
}
