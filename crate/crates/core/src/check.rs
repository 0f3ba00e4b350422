//! Self-check suite: algebraic identities, spectra, counts and plan
//! consistency of everything the library builds.

use serde::Serialize;

use crate::analysis::{gme_tests, gme_tests_zh_limit, num_tests, GmeKind, VerificationPlan};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64, ONE};
use crate::measurements::admissible::{enumerate_admissible, enumerate_admissible_qubit, gram_min_eigenvalue};
use crate::measurements::pauli::{gm_injectivity, min_bases, pauli_residue_is_bijective};
use crate::measurements::projectors::canonical_projector_z;
use crate::states::{diagonal_index, ghz_state, GhzLikeSpec};
use crate::strategies::{
    adversarial_p, homogeneous_form, omega_i, omega_ii, omega_iii, omega_iv, omega_v, omega_v_optimal_nu,
    omega_v_optimal_p, omega_v_prime, omega_vi, omega_vi_optimal_nu, omega_vi_optimal_p, omega_vii, omega_viii,
    omega_ix, AdaptedFamily, Strategy, HOMOGENEITY_TOL,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { name: name.into(), passed, detail: detail.into() }
}

/// `1 + Σ_{j'≠j} (|j'><j|)^{⊗n}`.
fn one_plus_ghz_offdiag(n: usize, d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(d.pow(n as u32));
    for a in 0..d {
        for b in 0..d {
            if a != b {
                m[(diagonal_index(a, d, n), diagonal_index(b, d, n))] += ONE;
            }
        }
    }
    m
}

fn homogeneity_error(s: &Strategy, beta: f64) -> f64 {
    s.omega().max_abs_diff(&homogeneous_form(&s.target, beta))
}

fn check_homogeneous_ghz() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        worst = worst.max(homogeneity_error(&omega_i(n)?, 1.0 / 3.0));
    }
    for (d, n) in [(3, 2), (3, 3), (5, 2), (7, 2)] {
        worst = worst.max(homogeneity_error(&omega_ii(n, d)?, 1.0 / (d as f64 + 1.0)));
    }
    for (d, m, n) in [(3, 3, 2), (3, 3, 3), (4, 7, 2)] {
        worst = worst.max(homogeneity_error(&omega_iii(n, d, m)?, 1.0 / (d as f64 + 1.0)));
    }
    Ok(result("homogeneous GHZ strategies", worst < 1e-10, format!("max entry error {worst:.2e}")))
}

fn check_ghz_gaps() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        worst = worst.max((omega_i(n)?.spectral_data()?.nu - 2.0 / 3.0).abs());
    }
    for (d, n) in [(3, 2), (3, 3), (5, 2)] {
        worst = worst.max((omega_ii(n, d)?.spectral_data()?.nu - d as f64 / (d as f64 + 1.0)).abs());
    }
    for (d, m, n) in [(3, 3, 2), (4, 7, 2)] {
        worst = worst.max((omega_iii(n, d, m)?.spectral_data()?.nu - d as f64 / (d as f64 + 1.0)).abs());
    }
    Ok(result("spectral gaps of GHZ strategies", worst < 1e-9, format!("max deviation {worst:.2e}")))
}

fn check_projector_sums() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        let sum = omega_i(n)?.tests[1..].iter().fold(ComplexMatrix::zeros(1 << n), |acc, t| &acc + &t.test.matrix);
        let expect = one_plus_ghz_offdiag(n, 2).scale(2f64.powi(n as i32 - 2));
        worst = worst.max(sum.max_abs_diff(&expect));
    }
    for (d, n) in [(3, 2), (3, 3), (5, 2), (5, 3)] {
        let s = omega_ii(n, d)?;
        let sum = s.tests[1..].iter().fold(ComplexMatrix::zeros(s.omega().dim()), |acc, t| &acc + &t.test.matrix);
        let expect = one_plus_ghz_offdiag(n, d).scale((d as f64).powi(n as i32 - 2));
        worst = worst.max(sum.max_abs_diff(&expect));
    }
    for (d, m, n) in [(3, 3, 2), (3, 3, 3), (4, 7, 2), (4, 7, 3)] {
        let s = omega_iii(n, d, m)?;
        let sum = s.tests[1..].iter().fold(ComplexMatrix::zeros(s.omega().dim()), |acc, t| &acc + &t.test.matrix);
        let expect = one_plus_ghz_offdiag(n, d).scale((m as f64).powi(n as i32 - 1) / d as f64);
        worst = worst.max(sum.max_abs_diff(&expect));
    }
    Ok(result("sums of canonical test projectors", worst < 1e-10, format!("max entry error {worst:.2e}")))
}

fn check_injectivity() -> CheckResult {
    let mut bad = Vec::new();
    for d in 3..=13 {
        let m = min_bases(d);
        for l in 1..d {
            if !gm_injectivity(d, m, l) {
                bad.push((d, l));
            }
        }
    }
    let counterexample = !pauli_residue_is_bijective(9, 3);
    result(
        "injectivity of g mod m; residue map fails at d = 9",
        bad.is_empty() && counterexample,
        format!("non-injective (d, l): {bad:?}; d = 9 counterexample found: {counterexample}"),
    )
}

fn check_admissible() -> Result<CheckResult> {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 2..=4 {
        let found = enumerate_admissible_qubit(n)?;
        let tests: Vec<_> = found.iter().map(|a| a.test.clone()).collect();
        let gram = gram_min_eigenvalue(&tests)?;
        ok &= found.len() == 1 + (1 << (n - 1)) && gram > 1e-9;
        detail.push(format!("n={n}: {} (Gram min eig {gram:.3})", found.len()));
    }
    let qutrit = enumerate_admissible(2, 3, false)?.len();
    ok &= qutrit == 4;
    detail.push(format!("d=3 n=2: {qutrit}"));
    Ok(result("admissible test counts", ok, detail.join(", ")))
}

fn check_ghz_like() -> Result<CheckResult> {
    let specs = [
        GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()])?,
        GhzLikeSpec::new(vec![0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()])?,
    ];
    let mut worst: f64 = 0.0;
    for spec in &specs {
        for n in [2, 3] {
            worst = worst.max((omega_iv(spec, n, 0.5)?.spectral_data()?.nu - 0.5).abs());
            let v = if spec.d() == 2 {
                omega_v_prime(spec, n, omega_v_optimal_p(spec))?
            } else {
                omega_v(spec, n, None, omega_v_optimal_p(spec))?
            };
            worst = worst.max((v.spectral_data()?.nu - omega_v_optimal_nu(spec)).abs());
            let vi = omega_vi(spec, n, omega_vi_optimal_p(spec, n), AdaptedFamily::auto(spec.d()))?;
            worst = worst.max((vi.spectral_data()?.nu - omega_vi_optimal_nu(spec, n)).abs());
        }
    }
    Ok(result("spectral gaps of GHZ-like strategies", worst < 1e-9, format!("max deviation {worst:.2e}")))
}

fn check_adversarial() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut homogeneous = true;
    for (n, d) in [(3, 2), (2, 3), (2, 4)] {
        let beta = (-1.0f64).exp();
        let s = omega_vii(n, d, beta)?;
        homogeneous &= s.is_homogeneous(HOMOGENEITY_TOL)?;
        worst = worst.max((s.spectral_data()?.beta - beta).abs());
    }
    let spec = GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()])?;
    for n in [2, 3] {
        let p = adversarial_p(&spec, n, false);
        let s = omega_viii(&spec, n, AdaptedFamily::Pauli, p)?;
        homogeneous &= s.is_homogeneous(HOMOGENEITY_TOL)?;
        worst = worst.max((s.spectral_data()?.beta - p).abs());
        let p = adversarial_p(&spec, n, true);
        let s = omega_ix(&spec, n, AdaptedFamily::Pauli, p)?;
        homogeneous &= s.is_homogeneous(HOMOGENEITY_TOL)?;
        worst = worst.max((s.spectral_data()?.beta - p).abs());
    }
    Ok(result("adversarial strategies", homogeneous && worst < 1e-10, format!("homogeneous: {homogeneous}, max beta error {worst:.2e}")))
}

fn check_counts() -> Result<CheckResult> {
    let n = num_tests(&VerificationPlan::new(0.01, 0.01, 2.0 / 3.0)?)?;
    let plm = (gme_tests(2, 0.01, GmeKind::Plm { n: 3 })?, gme_tests(2, 0.001, GmeKind::Plm { n: 3 })?);
    let zh = (gme_tests_zh_limit(0.01)?, gme_tests_zh_limit(0.001)?);
    let single = gme_tests(199, 0.01, GmeKind::Optimal)?;
    let ok = n == 689 && plm == (14, 21) && zh == (7, 10) && single == 1;
    Ok(result("sample counts", ok, format!("N = {n}, PLM {plm:?}, ZH {zh:?}, optimal d=199: {single}")))
}

fn check_plans() -> Result<CheckResult> {
    let spec2 = GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()])?;
    let spec3 = GhzLikeSpec::new(vec![0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()])?;
    let strategies = vec![
        omega_i(3)?,
        omega_ii(3, 3)?,
        omega_iii(2, 4, 7)?,
        omega_iv(&spec3, 3, 0.5)?,
        omega_v(&spec3, 2, None, omega_v_optimal_p(&spec3))?,
        omega_v_prime(&spec2, 3, omega_v_optimal_p(&spec2))?,
        omega_vi(&spec2, 3, omega_vi_optimal_p(&spec2, 3), AdaptedFamily::Pauli)?,
        omega_viii(&spec2, 3, AdaptedFamily::Pauli, adversarial_p(&spec2, 3, false))?,
        omega_ix(&spec3, 2, AdaptedFamily::auto(3), adversarial_p(&spec3, 2, true))?,
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for s in &strategies {
        for t in &s.tests {
            worst = worst.max(t.test.plan_deviation()?);
            count += 1;
        }
    }
    Ok(result("sampling plans reproduce effects", worst < 1e-10, format!("{count} tests, max entry error {worst:.2e}")))
}

fn check_p0_overlap() -> Result<CheckResult> {
    let spec = GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()])?;
    let s = omega_iv(&spec, 3, 0.5)?;
    let p0 = canonical_projector_z(3, 2)?;
    let overlap: C64 = p0.matrix.hs_inner(&s.tests[1].test.matrix);
    let g = ghz_state(3, 2)?;
    let passes = p0.passes_target(&g)?;
    Ok(result("two-test protocol overlap", (overlap.re - 1.0).abs() < 1e-10 && passes, format!("tr(P_0 P_1) = {:.12}", overlap.re)))
}

/// Runs every check; errors inside a check are reported as failures.
pub fn run_all() -> Vec<CheckResult> {
    let checks: Vec<(&str, Box<dyn Fn() -> Result<CheckResult>>)> = vec![
        ("homogeneous GHZ strategies", Box::new(check_homogeneous_ghz)),
        ("spectral gaps of GHZ strategies", Box::new(check_ghz_gaps)),
        ("sums of canonical test projectors", Box::new(check_projector_sums)),
        ("injectivity of g mod m", Box::new(|| Ok(check_injectivity()))),
        ("admissible test counts", Box::new(check_admissible)),
        ("spectral gaps of GHZ-like strategies", Box::new(check_ghz_like)),
        ("two-test protocol overlap", Box::new(check_p0_overlap)),
        ("adversarial strategies", Box::new(check_adversarial)),
        ("sample counts", Box::new(check_counts)),
        ("sampling plans reproduce effects", Box::new(check_plans)),
    ];
    checks
        .into_iter()
        .map(|(name, f)| f().unwrap_or_else(|e| result(name, false, format!("error: {e}"))))
        .collect()
}
