//! Scalar formulas: sample counts, fidelity estimation and GME thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative guard band applied before rounding counts up.
pub const CEIL_GUARD: f64 = 1e-12;
/// Slack allowed when a fidelity estimate lands just outside `[0, 1]`.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// `⌈x⌉`, except that values within the guard band of an integer round to it.
pub fn guarded_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= CEIL_GUARD * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn as_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x > u64::MAX as f64 {
        return Err(Error::DegenerateArgument(format!("test count {x} is not representable")));
    }
    Ok((guarded_ceil(x) as u64).max(1))
}

fn check_unit_open(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParameter(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}

/// Target infidelity `ε`, significance level `δ` and spectral gap `ν`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub nu: f64,
}

impl VerificationPlan {
    pub fn new(epsilon: f64, delta: f64, nu: f64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        check_unit_open("delta", delta)?;
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::InvalidParameter(format!("nu = {nu} must lie in (0, 1]")));
        }
        Ok(Self { epsilon, delta, nu })
    }
}

/// `N = ⌈ln δ / ln(1 - νε)⌉`.
pub fn num_tests(plan: &VerificationPlan) -> Result<u64> {
    let x = plan.nu * plan.epsilon;
    if x >= 1.0 {
        return Err(Error::DegenerateArgument(format!("nu * epsilon = {x} >= 1; a single test suffices")));
    }
    as_count(plan.delta.ln() / (-x).ln_1p())
}

/// Which strategy is used to certify genuine multipartite entanglement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GmeKind {
    /// Homogeneous strategy with `ν = d/(d+1)`.
    Optimal,
    /// Qubit strategy with `ν = 2^{n-1}/(2^n - 1)`.
    Plm { n: usize },
    /// Two-setting strategy with `ν = 1/2`.
    Zh,
}

/// GME fidelity threshold `1/d`.
pub fn gme_fidelity_threshold(d: usize) -> f64 {
    1.0 / d as f64
}

/// Tests needed to certify GME (`ε = (d-1)/d`) at significance `δ`.
pub fn gme_tests(d: usize, delta: f64, kind: GmeKind) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
    }
    check_unit_open("delta", delta)?;
    let df = d as f64;
    let denom = match kind {
        GmeKind::Optimal => 2f64.ln() - (df + 1.0).ln(),
        GmeKind::Plm { n } => {
            if d != 2 || n < 2 {
                return Err(Error::InvalidParameter("the PLM strategy is defined for qubits and n >= 2".into()));
            }
            let num = 2f64.powi(n as i32 - 2);
            let den = 2f64.powi(n as i32) - 1.0;
            (-num / den).ln_1p()
        }
        GmeKind::Zh => (df + 1.0).ln() - (2.0 * df).ln(),
    };
    as_count(delta.ln() / denom)
}

/// `d → ∞` limit of the ZH count, `⌈ln δ / ln(1/2)⌉`.
pub fn gme_tests_zh_limit(delta: f64) -> Result<u64> {
    check_unit_open("delta", delta)?;
    as_count(delta.ln() / 0.5f64.ln())
}

/// `F = (passrate - β)/ν` for a homogeneous strategy.
pub fn fidelity_from_passrate(passrate: f64, beta: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("nu = {nu} must be positive")));
    }
    let f = (passrate - beta) / nu;
    if !(-FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(&f) {
        return Err(Error::ResultOutOfRange { value: f });
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `ΔF = √[(1-F)(F + 1/ν - 1)/N]`.
pub fn fidelity_std(fidelity: f64, nu: f64, n: u64) -> f64 {
    let f = fidelity.clamp(0.0, 1.0);
    ((1.0 - f) * (f + 1.0 / nu - 1.0) / n as f64).max(0.0).sqrt()
}

/// `[(1-passrate)/(1-τ), (1-passrate)/ν]`.
pub fn infidelity_bounds(passrate: f64, nu: f64, tau: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0) || !(tau < 1.0) {
        return Err(Error::InvalidParameter(format!("need nu > 0 and tau < 1, got nu = {nu}, tau = {tau}")));
    }
    let fail = 1.0 - passrate;
    Ok((fail / (1.0 - tau), fail / nu))
}

/// High-precision approximation `⌈ln δ^{-1} / (β ε ln β^{-1})⌉` for the
/// adversarial scenario.
pub fn adversarial_num_tests(beta: f64, epsilon: f64, delta: f64) -> Result<u64> {
    check_unit_open("beta", beta)?;
    check_unit_open("epsilon", epsilon)?;
    check_unit_open("delta", delta)?;
    as_count(-delta.ln() / (beta * epsilon * -beta.ln()))
}

/// Nonadversarial (`β = 1/(d+1)`) or adversarial (`β = 2/(d+1)`) setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Nonadversarial,
    Adversarial,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Nonadversarial => "nonadversarial",
            Scenario::Adversarial => "adversarial",
        }
    }
}

/// Smallest `δ` at which one test certifies GME.
pub fn gme_single_test_threshold(d: usize, scenario: Scenario) -> f64 {
    let df = d as f64;
    match scenario {
        Scenario::Nonadversarial => 2.0 / (df + 1.0),
        Scenario::Adversarial => 4.0 * df / ((df + 1.0) * (df + 1.0)),
    }
}

/// Whether a single test certifies GME at significance `δ`.
pub fn gme_single_test_region(d: usize, delta: f64, scenario: Scenario) -> bool {
    let t = gme_single_test_threshold(d, scenario);
    delta >= t - CEIL_GUARD * t
}
