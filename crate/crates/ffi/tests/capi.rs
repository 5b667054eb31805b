// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use nmrqip_ffi::*;

fn last_error() -> String {
    let p = nmr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn split(m: &[[(f64, f64); 4]; 4]) -> (Vec<f64>, Vec<f64>) {
    let re = m.iter().flat_map(|r| r.iter().map(|c| c.0)).collect();
    let im = m.iter().flat_map(|r| r.iter().map(|c| c.1)).collect();
    (re, im)
}

#[test]
fn spin_system_handles() {
    let name = CString::new("chloroform").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { nmr_spin_system_preset(name.as_ptr(), &mut sys) }, NmrStatus::Ok);
    assert!(nmr_last_error_message().is_null());
    assert_eq!(unsafe { nmr_spin_system_num_spins(sys) }, 2);
    unsafe { nmr_spin_system_free(sys) };

    let bad = CString::new("benzene").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { nmr_spin_system_preset(bad.as_ptr(), &mut sys) }, NmrStatus::InvalidArgument);
    assert!(sys.is_null());
    assert!(last_error().contains("benzene"));
    assert_eq!(unsafe { nmr_spin_system_preset(ptr::null(), &mut sys) }, NmrStatus::NullPointer);
    assert_eq!(unsafe { nmr_spin_system_num_spins(ptr::null()) }, 0);

    let json = CString::new(r#"{"n": 1, "offsets_hz": [10.0], "j_hz": []}"#).unwrap();
    let st = unsafe { nmr_spin_system_from_json(json.as_ptr(), &mut sys) };
    if st == NmrStatus::Ok {
        assert_eq!(unsafe { nmr_spin_system_num_spins(sys) }, 1);
        unsafe { nmr_spin_system_free(sys) };
    } else {
        assert_eq!(st, NmrStatus::InvalidArgument, "{}", last_error());
    }
    let garbage = CString::new("{").unwrap();
    assert_eq!(unsafe { nmr_spin_system_from_json(garbage.as_ptr(), &mut sys) }, NmrStatus::InvalidArgument);
}

#[test]
fn pseudo_pure_expectations() {
    let mut rho = ptr::null_mut();
    assert_eq!(unsafe { nmr_pps_new(2, 0.25, &mut rho) }, NmrStatus::Ok);
    assert_eq!(unsafe { nmr_density_dim(rho) }, 4);
    let mut v = 0.0;
    for (label, want) in [("ZI", 0.25), ("ZZ", 0.25), ("-ZZ", -0.25), ("XI", 0.0), ("II", 1.0)] {
        let l = CString::new(label).unwrap();
        assert_eq!(unsafe { nmr_density_expectation_pauli(rho, l.as_ptr(), &mut v) }, NmrStatus::Ok);
        assert!((v - want).abs() < 1e-15, "{label}: {v}");
    }
    let l = CString::new("ZZZ").unwrap();
    assert_eq!(unsafe { nmr_density_expectation_pauli(rho, l.as_ptr(), &mut v) }, NmrStatus::DimensionMismatch);
    let l = CString::new("iZ").unwrap();
    let mut r1 = ptr::null_mut();
    assert_eq!(unsafe { nmr_pps_new(1, 0.5, &mut r1) }, NmrStatus::Ok);
    assert_eq!(unsafe { nmr_density_expectation_pauli(r1, l.as_ptr(), &mut v) }, NmrStatus::InvalidArgument);
    assert_eq!(unsafe { nmr_pps_new(2, 1.5, &mut r1) }, NmrStatus::InvalidArgument);
    unsafe {
        nmr_density_free(rho);
        nmr_density_free(r1);
        nmr_density_free(ptr::null_mut());
    }
}

#[test]
fn fidelity_and_trace() {
    let one = (1.0, 0.0);
    let zero = (0.0, 0.0);
    let cnot = [[one, zero, zero, zero], [zero, one, zero, zero], [zero, zero, zero, one], [zero, zero, one, zero]];
    let (re, im) = split(&cnot);
    let mut f = 0.0;
    let st = unsafe { nmr_gate_fidelity_hs(re.as_ptr(), im.as_ptr(), re.as_ptr(), im.as_ptr(), 4, &mut f) };
    assert_eq!(st, NmrStatus::Ok);
    assert!((f - 1.0).abs() < 1e-15);
    let (mut tr, mut ti) = (0.0, 0.0);
    assert_eq!(unsafe { nmr_dqc1_trace(re.as_ptr(), im.as_ptr(), 2, 0.3, &mut tr, &mut ti) }, NmrStatus::Ok);
    assert!((tr - 0.5).abs() < 1e-12 && ti.abs() < 1e-12);
    assert_eq!(unsafe { nmr_dqc1_trace(re.as_ptr(), ptr::null(), 2, 0.3, &mut tr, &mut ti) }, NmrStatus::NullPointer);
    assert_eq!(unsafe { nmr_dqc1_trace(re.as_ptr(), im.as_ptr(), 2, 0.0, &mut tr, &mut ti) }, NmrStatus::InvalidArgument);
}

#[test]
fn grape_pulse_round_trip() {
    let name = CString::new("chloroform").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { nmr_spin_system_preset(name.as_ptr(), &mut sys) }, NmrStatus::Ok);
    let mut pulse = ptr::null_mut();
    let mut f = 0.0;
    let st = unsafe { nmr_grape_cnot(sys, 0, 1, 500, 1e-5, 2000, 0.99, 7, &mut pulse, &mut f) };
    assert_eq!(st, NmrStatus::Ok);
    assert!(f >= 0.99);
    assert_eq!(unsafe { nmr_pulse_num_steps(pulse) }, 500);
    let json = unsafe { nmr_pulse_to_json(pulse) };
    assert!(!json.is_null());
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { nmr_pulse_from_json(json, &mut back) }, NmrStatus::Ok);
    assert_eq!(unsafe { nmr_pulse_num_steps(back) }, 500);

    // one iteration cannot reach the target: the pulse still comes back
    let mut short = ptr::null_mut();
    let st = unsafe { nmr_grape_cnot(sys, 0, 1, 20, 1e-5, 1, 0.999, 3, &mut short, &mut f) };
    assert_eq!(st, NmrStatus::NotConverged);
    assert!(!short.is_null() && f < 0.999);
    assert!(last_error().contains("GRAPE"));
    assert_eq!(unsafe { nmr_grape_cnot(sys, 0, 0, 20, 1e-5, 1, 0.9, 3, &mut short, &mut f) }, NmrStatus::InvalidArgument);
    unsafe {
        nmr_string_free(json);
        nmr_pulse_free(pulse);
        nmr_pulse_free(back);
        nmr_pulse_free(short);
        nmr_spin_system_free(sys);
    }
}

#[test]
fn errors_are_per_thread() {
    let bad = CString::new("nope").unwrap();
    let mut sys = ptr::null_mut();
    assert_ne!(unsafe { nmr_spin_system_preset(bad.as_ptr(), &mut sys) }, NmrStatus::Ok);
    std::thread::spawn(|| assert!(nmr_last_error_message().is_null())).join().unwrap();
    assert!(!nmr_last_error_message().is_null());
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nmrqip.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|r| r.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}
