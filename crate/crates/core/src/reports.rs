//! Table and figure data as CSV.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{adversarial_num_tests, gme_single_test_threshold, num_tests, Scenario, VerificationPlan};
use crate::error::{Error, Result};
use crate::measurements::pauli::min_bases;
use crate::states::GhzLikeSpec;
use crate::strategies::{
    adversarial_p, omega_i, omega_ii, omega_iii, omega_v_optimal_nu, omega_vi_optimal_nu, Strategy, HOMOGENEITY_TOL,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub strategy: String,
    pub d_range: String,
    pub n: usize,
    pub d: usize,
    pub nu: f64,
    pub homogeneous: bool,
    #[serde(rename = "N")]
    pub num_tests: u64,
    #[serde(rename = "N_MS")]
    pub settings: u64,
    /// `computed` from a built strategy, `reference` for literature values.
    pub source: String,
}

fn computed_row(s: &Strategy, d_range: &str, eps: f64, delta: f64) -> Result<Table1Row> {
    let spec = s.spectral_data()?;
    Ok(Table1Row {
        strategy: s.name.clone(),
        d_range: d_range.into(),
        n: s.parties(),
        d: s.local_dim(),
        nu: spec.nu,
        homogeneous: s.is_homogeneous(HOMOGENEITY_TOL)?,
        num_tests: num_tests(&VerificationPlan::new(eps, delta, spec.nu)?)?,
        settings: s.tests.len() as u64,
        source: "computed".into(),
    })
}

/// Comparison of GHZ strategies. The two reference rows carry the known
/// spectral gaps of the PLM and ZH strategies; the others are built here.
pub fn table1(n: usize, d_prime: usize, d_design: usize, eps: f64, delta: f64) -> Result<Vec<Table1Row>> {
    let plm_nu = 2f64.powi(n as i32 - 1) / (2f64.powi(n as i32) - 1.0);
    let reference = |strategy: &str, d_range: &str, d: usize, nu: f64, homogeneous: bool, settings: u64| -> Result<Table1Row> {
        Ok(Table1Row {
            strategy: strategy.into(),
            d_range: d_range.into(),
            n,
            d,
            nu,
            homogeneous,
            num_tests: num_tests(&VerificationPlan::new(eps, delta, nu)?)?,
            settings,
            source: "reference".into(),
        })
    };
    Ok(vec![
        reference("plm", "d=2", 2, plm_nu, true, (1u64 << n) - 1)?,
        reference("zh", "d>=2", 2, 0.5, false, 2)?,
        computed_row(&omega_i(n)?, "d=2", eps, delta)?,
        computed_row(&omega_ii(n, d_prime)?, "d odd prime", eps, delta)?,
        computed_row(&omega_iii(n, d_design, min_bases(d_design))?, "d>=3", eps, delta)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Row {
    pub d: usize,
    pub scenario: String,
    pub delta_min: f64,
}

/// Smallest significance level reachable with a single GME test, per `d`.
pub fn fig1(d_max: usize) -> Vec<Fig1Row> {
    let mut rows = Vec::new();
    for d in 2..=d_max {
        for scenario in [Scenario::Nonadversarial, Scenario::Adversarial] {
            rows.push(Fig1Row { d, scenario: scenario.as_str().into(), delta_min: gme_single_test_threshold(d, scenario) });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Row {
    pub theta: f64,
    pub n: usize,
    #[serde(rename = "N_IV")]
    pub n_iv: u64,
    #[serde(rename = "N_V'")]
    pub n_v_prime: u64,
    #[serde(rename = "N_VI")]
    pub n_vi: u64,
    #[serde(rename = "N_VIII")]
    pub n_viii: u64,
    #[serde(rename = "N_IX")]
    pub n_ix: u64,
}

/// Test counts for `cos θ|0…0> + sin θ|1…1>` on `steps` evenly spaced
/// angles in `(0, π/4]`, for each `n` in `ns`.
pub fn fig2(ns: &[usize], steps: usize, eps: f64, delta: f64) -> Result<Vec<Fig2Row>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one angle".into()));
    }
    let mut rows = Vec::new();
    for i in 1..=steps {
        let theta = std::f64::consts::FRAC_PI_4 * i as f64 / steps as f64;
        let spec = GhzLikeSpec::qubit(theta)?;
        for &n in ns {
            let count = |nu: f64| num_tests(&VerificationPlan::new(eps, delta, nu)?);
            rows.push(Fig2Row {
                theta,
                n,
                n_iv: count(0.5)?,
                n_v_prime: count(omega_v_optimal_nu(&spec))?,
                n_vi: count(omega_vi_optimal_nu(&spec, n))?,
                n_viii: adversarial_num_tests(adversarial_p(&spec, n, false), eps, delta)?,
                n_ix: adversarial_num_tests(adversarial_p(&spec, n, true), eps, delta)?,
            });
        }
    }
    Ok(rows)
}

/// Writes serialisable rows as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(())
}
