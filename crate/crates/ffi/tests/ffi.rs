use std::ffi::{CStr, CString};
use std::ptr;

use ghzv_ffi::*;

fn new_strategy(name: &str, n: usize, d: usize, lambdas: Option<&[f64]>) -> (GhzvStatus, *mut GhzvStrategy) {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    let (lp, ln) = lambdas.map_or((ptr::null(), 0), |l| (l.as_ptr(), l.len()));
    let st = unsafe { ghzv_strategy_new(name.as_ptr(), n, d, 0, f64::NAN, f64::NAN, lp, ln, &mut h) };
    (st, h)
}

fn last_error() -> String {
    let p = ghzv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn omega2_spectrum_and_matrix() {
    let (st, h) = new_strategy("omega2", 2, 3, None);
    assert_eq!(st, GhzvStatus::Ok);
    assert!(ghzv_last_error().is_null());
    unsafe {
        assert_eq!(ghzv_strategy_dim(h), 9);
        assert_eq!(ghzv_strategy_test_count(h), 4);
        let mut sd = GhzvSpectral::default();
        assert_eq!(ghzv_strategy_spectral(h, &mut sd), GhzvStatus::Ok);
        assert!((sd.nu - 0.75).abs() < 1e-10);
        assert!(sd.homogeneous);

        let (mut re, mut im) = (vec![0.0; 81], vec![0.0; 81]);
        assert_eq!(ghzv_strategy_omega(h, re.as_mut_ptr(), im.as_mut_ptr(), 81), GhzvStatus::Ok);
        // (1 + 3|G><G|)/4: diagonal of |000...> block is (1 + 1)/4
        assert!((re[0] - 0.5).abs() < 1e-12);
        assert!((re[1] - 0.0).abs() < 1e-12);
        assert!((re[8] - 0.25).abs() < 1e-12);
        assert!(im.iter().all(|x| x.abs() < 1e-12));
        assert_eq!(ghzv_strategy_omega(h, re.as_mut_ptr(), im.as_mut_ptr(), 80), GhzvStatus::BufferTooSmall);

        let json = ghzv_strategy_json(h);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ghzv_string_free(json);
        assert!(text.contains("\"name\": \"omega2\""));
        ghzv_strategy_free(h);
    }
}

#[test]
fn ghz_like_strategy_and_simulation() {
    let lambdas = [0.7f64.sqrt(), 0.3f64.sqrt()];
    let (st, h) = new_strategy("omega6", 3, 0, Some(&lambdas));
    assert_eq!(st, GhzvStatus::Ok);
    unsafe {
        let mut sd = GhzvSpectral::default();
        assert_eq!(ghzv_strategy_spectral(h, &mut sd), GhzvStatus::Ok);
        assert!((sd.nu - 30.0 / 47.0).abs() < 1e-9);
        let src = CString::new("target").unwrap();
        let mut sum = GhzvRunSummary::default();
        assert_eq!(ghzv_simulate(h, src.as_ptr(), 500, 9, &mut sum), GhzvStatus::Ok);
        assert_eq!(sum.passes, 500);
        let bad = CString::new("noise").unwrap();
        assert_eq!(ghzv_simulate(h, bad.as_ptr(), 10, 9, &mut sum), GhzvStatus::InvalidArgument);
        ghzv_strategy_free(h);
    }
}

#[test]
fn errors_are_reported() {
    let (st, h) = new_strategy("omega2", 2, 9, None);
    assert_eq!(st, GhzvStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("odd prime"));

    let (st, _) = new_strategy("omega42", 2, 2, None);
    assert_eq!(st, GhzvStatus::InvalidArgument);

    let mut out = 0u64;
    unsafe {
        assert_eq!(ghzv_strategy_new(ptr::null(), 2, 2, 0, f64::NAN, f64::NAN, ptr::null(), 0, ptr::null_mut()), GhzvStatus::NullPointer);
        assert_eq!(ghzv_strategy_spectral(ptr::null(), ptr::null_mut()), GhzvStatus::NullPointer);
        assert_eq!(ghzv_num_tests(0.01, 0.01, 2.0 / 3.0, &mut out), GhzvStatus::Ok);
        assert_eq!(out, 689);
        assert_eq!(ghzv_num_tests(0.0, 0.01, 2.0 / 3.0, &mut out), GhzvStatus::InvalidArgument);
        assert_eq!(ghzv_gme_tests(199, 0.01, GhzvGmeKind::Optimal, 0, &mut out), GhzvStatus::Ok);
        assert_eq!(out, 1);
        assert_eq!(ghzv_gme_tests(2, 0.001, GhzvGmeKind::Plm, 3, &mut out), GhzvStatus::Ok);
        assert_eq!(out, 21);
        assert_eq!(ghzv_adversarial_num_tests((-1.0f64).exp(), 0.01, 0.01, &mut out), GhzvStatus::Ok);
        assert_eq!(out, (std::f64::consts::E * 100.0 * 100f64.ln()).ceil() as u64);
        ghzv_strategy_free(ptr::null_mut());
        ghzv_string_free(ptr::null_mut());
    }
}

#[test]
fn dimension_cap_is_enforced() {
    ghzv_set_dim_cap(16);
    let (st, h) = new_strategy("omega1", 5, 2, None);
    ghzv_set_dim_cap(0);
    assert_eq!(st, GhzvStatus::CapExceeded);
    assert!(h.is_null());
    assert!(last_error().contains("GHZV_DIM_CAP"));
}
