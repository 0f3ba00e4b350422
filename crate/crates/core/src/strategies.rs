//! Verification strategies: weighted collections of tests and their spectra.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigenDecomposition};
use crate::measurements::pauli::{is_odd_prime, min_bases};
use crate::measurements::projectors::{
    adapted_projector_at, canonical_projector_r, canonical_projector_xy, canonical_projector_z, design_projector_h,
    even_subsets, mub_second_test, q0_lower_bound, q0_operator, residue_strings, trivial_test,
};
use crate::measurements::{LocalBasis, TestOperator, EFFECT_TOL};
use crate::states::{ghz_like_state, ghz_state, DensityMatrix, GhzLikeSpec, StateVector};

/// Tolerance on `Σ p_l = 1` for floating weights.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Default tolerance for [`Strategy::is_homogeneous`].
pub const HOMOGENEITY_TOL: f64 = 1e-10;

/// A test probability, kept exact when it is a fixed rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Exact(Ratio<u64>),
    Real(f64),
}

impl Weight {
    pub fn exact(num: u64, den: u64) -> Self {
        Weight::Exact(Ratio::new(num, den))
    }

    pub fn value(&self) -> f64 {
        match self {
            Weight::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Weight::Real(x) => *x,
        }
    }

    /// Product with another weight; exact only if both are.
    pub fn times(&self, other: Weight) -> Weight {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a * b),
            _ => Weight::Real(self.value() * other.value()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Exact(r) => write!(f, "{r}"),
            Weight::Real(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeightedTest {
    pub weight: Weight,
    pub test: TestOperator,
}

impl Serialize for WeightedTest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let exact = matches!(self.weight, Weight::Exact(_));
        let mut st = s.serialize_struct("WeightedTest", if exact { 4 } else { 3 })?;
        st.serialize_field("p", &self.weight.value())?;
        if exact {
            st.serialize_field("p_exact", &self.weight.to_string())?;
        }
        st.serialize_field("label", &self.test.label)?;
        st.serialize_field("plan", &self.test.plan)?;
        st.end()
    }
}

/// `β`, `ν = 1 - β` and `τ` of a strategy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    pub beta: f64,
    pub nu: f64,
    pub tau: f64,
}

/// A verification strategy `Ω = Σ_l p_l E_l` for a pure target.
#[derive(Clone, Debug, Serialize)]
pub struct Strategy {
    pub name: String,
    pub params: Value,
    #[serde(skip)]
    pub target: StateVector,
    pub tests: Vec<WeightedTest>,
    #[serde(skip)]
    omega: ComplexMatrix,
}

impl Strategy {
    pub fn new(name: impl Into<String>, params: Value, target: StateVector, tests: Vec<WeightedTest>) -> Result<Self> {
        if tests.is_empty() {
            return Err(Error::InvalidParameter("a strategy needs at least one test".into()));
        }
        let dim = target.dim();
        for t in &tests {
            if t.test.matrix.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: t.test.matrix.dim() });
            }
            let w = t.weight.value();
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {w} on {}", t.test.label)));
            }
        }
        let all_exact = tests.iter().all(|t| matches!(t.weight, Weight::Exact(_)));
        let sum_ok = if all_exact {
            let total = tests.iter().fold(Ratio::from_integer(0u64), |acc, t| match t.weight {
                Weight::Exact(r) => acc + r,
                Weight::Real(_) => unreachable!(),
            });
            total == Ratio::from_integer(1)
        } else {
            (tests.iter().map(|t| t.weight.value()).sum::<f64>() - 1.0).abs() <= WEIGHT_TOL
        };
        if !sum_ok {
            return Err(Error::InvalidParameter("test probabilities do not sum to 1".into()));
        }
        let mut omega = ComplexMatrix::zeros(dim);
        for t in &tests {
            omega.add_scaled(&t.test.matrix, t.weight.value());
        }
        let img = omega.apply(target.amplitudes());
        let dev = img.iter().zip(target.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if dev > EFFECT_TOL {
            return Err(Error::InvalidParameter(format!("target does not pass with certainty (deviation {dev:e})")));
        }
        Ok(Self { name: name.into(), params, target, tests, omega })
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn parties(&self) -> usize {
        self.target.parties()
    }

    pub fn local_dim(&self) -> usize {
        self.target.local_dim()
    }

    pub fn eigen(&self) -> Result<EigenDecomposition> {
        hermitian_eig(&self.omega)
    }

    pub fn spectral_data(&self) -> Result<SpectralData> {
        let eig = self.eigen()?;
        let beta = eig.second();
        Ok(SpectralData { beta, nu: 1.0 - beta, tau: eig.min() })
    }

    /// `Ω ≈ |Ψ><Ψ| + β(1 - |Ψ><Ψ|)` entrywise within `tol`.
    pub fn is_homogeneous(&self, tol: f64) -> Result<bool> {
        let beta = self.spectral_data()?.beta;
        Ok(self.omega.max_abs_diff(&homogeneous_form(&self.target, beta)) < tol)
    }

    /// `tr(Ω σ)`.
    pub fn passing_probability(&self, sigma: &DensityMatrix) -> Result<f64> {
        if sigma.dim() != self.omega.dim() {
            return Err(Error::DimensionMismatch { expected: self.omega.dim(), actual: sigma.dim() });
        }
        Ok(self.omega.hs_inner(sigma.matrix()).re)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serialises")
    }
}

/// `|Ψ><Ψ| + β(1 - |Ψ><Ψ|)`.
pub fn homogeneous_form(target: &StateVector, beta: f64) -> ComplexMatrix {
    let proj = ComplexMatrix::projector(target.amplitudes());
    let mut out = ComplexMatrix::identity(target.dim()).scale(beta);
    out.add_scaled(&proj, 1.0 - beta);
    out
}

/// Which canonical GHZ tests feed the adaptive construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdaptedFamily {
    /// `P_Y` for qubits, `P_r` for odd prime `d`.
    Pauli,
    /// `P_h` built from `m` bases of the 2-design.
    Design { m: usize },
}

impl AdaptedFamily {
    /// Pauli tests where they exist, the smallest design otherwise.
    pub fn auto(d: usize) -> Self {
        if d == 2 || is_odd_prime(d) {
            AdaptedFamily::Pauli
        } else {
            AdaptedFamily::Design { m: min_bases(d) }
        }
    }

    /// The non-`P_0` tests of the corresponding GHZ strategy.
    pub fn ghz_tests(&self, n: usize, d: usize) -> Result<Vec<TestOperator>> {
        match *self {
            AdaptedFamily::Pauli if d == 2 => even_subsets(n).iter().map(|y| canonical_projector_xy(y, n)).collect(),
            AdaptedFamily::Pauli => {
                if !is_odd_prime(d) {
                    return Err(Error::NotOddPrime { d, hint: "; use the design family for this d" });
                }
                residue_strings(n, d, 0).iter().map(|r| canonical_projector_r(r, d)).collect()
            }
            AdaptedFamily::Design { m } => {
                check_design(d, m)?;
                residue_strings(n, m, 1).iter().map(|h| design_projector_h(h, d, m)).collect()
            }
        }
    }
}

fn check_design(d: usize, m: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("the design construction needs d >= 3, got {d}")));
    }
    let min = min_bases(d);
    if m < min {
        return Err(Error::MTooSmall { d, m, min });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least two parties, got {n}")));
    }
    Ok(())
}

fn check_open_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::POutOfRange { p, range: "(0, 1)".into() });
    }
    Ok(())
}

fn exact_pow(base: usize, exp: usize) -> u64 {
    (base as u64).pow(exp as u32)
}

fn ghz_params(n: usize, d: usize) -> Value {
    json!({ "n": n, "d": d })
}

fn like_params(spec: &GhzLikeSpec, n: usize, p: f64) -> Value {
    json!({ "n": n, "d": spec.d(), "lambdas": spec.lambdas(), "p": p })
}

fn weighted(weight: Weight, tests: Vec<TestOperator>) -> Vec<WeightedTest> {
    tests.into_iter().map(|test| WeightedTest { weight, test }).collect()
}

/// Qubit GHZ: `P_0` w.p. 1/3, every `P_Y` w.p. `1/(3·2^{n-2})`.
pub fn omega_i(n: usize) -> Result<Strategy> {
    check_n(n)?;
    let mut tests = vec![WeightedTest { weight: Weight::exact(1, 3), test: canonical_projector_z(n, 2)? }];
    tests.extend(weighted(Weight::exact(1, 3 * exact_pow(2, n - 2)), AdaptedFamily::Pauli.ghz_tests(n, 2)?));
    Strategy::new("omega1", ghz_params(n, 2), ghz_state(n, 2)?, tests)
}

/// Odd prime `d`: `P_0` w.p. `1/(d+1)`, every `P_r` w.p. `1/[(d+1)d^{n-2}]`.
pub fn omega_ii(n: usize, d: usize) -> Result<Strategy> {
    check_n(n)?;
    if !is_odd_prime(d) {
        return Err(Error::NotOddPrime { d, hint: "; use omega3 (2-design bases) for this d" });
    }
    let d64 = d as u64;
    let mut tests = vec![WeightedTest { weight: Weight::exact(1, d64 + 1), test: canonical_projector_z(n, d)? }];
    tests.extend(weighted(Weight::exact(1, (d64 + 1) * exact_pow(d, n - 2)), AdaptedFamily::Pauli.ghz_tests(n, d)?));
    Strategy::new("omega2", ghz_params(n, d), ghz_state(n, d)?, tests)
}

/// Any `d ≥ 3`: `P_0` w.p. `1/(d+1)`, every `P_h` w.p. `d/[(d+1)m^{n-1}]`.
pub fn omega_iii(n: usize, d: usize, m: usize) -> Result<Strategy> {
    check_n(n)?;
    check_design(d, m)?;
    let d64 = d as u64;
    let mut tests = vec![WeightedTest { weight: Weight::exact(1, d64 + 1), test: canonical_projector_z(n, d)? }];
    let family = AdaptedFamily::Design { m };
    tests.extend(weighted(Weight::exact(d64, (d64 + 1) * exact_pow(m, n - 1)), family.ghz_tests(n, d)?));
    Strategy::new("omega3", json!({ "n": n, "d": d, "m": m }), ghz_state(n, d)?, tests)
}

/// Optimal homogeneous GHZ strategy for the dimension: Ω_I, Ω_II or Ω_III.
pub fn optimal_ghz(n: usize, d: usize) -> Result<Strategy> {
    if d == 2 {
        omega_i(n)
    } else if is_odd_prime(d) {
        omega_ii(n, d)
    } else {
        omega_iii(n, d, min_bases(d))
    }
}

/// Two tests: `P_0` w.p. `p` and the adaptive `P_1` w.p. `1 - p`.
pub fn omega_iv(spec: &GhzLikeSpec, n: usize, p: f64) -> Result<Strategy> {
    omega_iv_with_basis(spec, n, p, &LocalBasis::Fourier)
}

/// [`omega_iv`] with a chosen basis unbiased to the standard one.
pub fn omega_iv_with_basis(spec: &GhzLikeSpec, n: usize, p: f64, basis: &LocalBasis) -> Result<Strategy> {
    check_n(n)?;
    check_open_p(p)?;
    let d = spec.d();
    let tests = vec![
        WeightedTest { weight: Weight::Real(p), test: canonical_projector_z(n, d)? },
        WeightedTest { weight: Weight::Real(1.0 - p), test: mub_second_test(spec, n, basis)? },
    ];
    Strategy::new("omega4", like_params(spec, n, p), ghz_like_state(spec, n)?, tests)
}

/// Adapted tests of `family` with the adaptive role on `party`.
pub fn adapted_tests(spec: &GhzLikeSpec, n: usize, family: AdaptedFamily, party: usize) -> Result<Vec<TestOperator>> {
    family.ghz_tests(n, spec.d())?.iter().map(|t| adapted_projector_at(t, spec, party)).collect()
}

fn one_way_strategy(name: &str, spec: &GhzLikeSpec, n: usize, p: f64, family: AdaptedFamily) -> Result<Strategy> {
    check_n(n)?;
    check_open_p(p)?;
    let adapted = adapted_tests(spec, n, family, n - 1)?;
    let share = Weight::Real((1.0 - p) / adapted.len() as f64);
    let mut tests = vec![WeightedTest { weight: Weight::Real(p), test: canonical_projector_z(n, spec.d())? }];
    tests.extend(weighted(share, adapted));
    let mut params = like_params(spec, n, p);
    params["family"] = serde_json::to_value(family).expect("family serialises");
    Strategy::new(name, params, ghz_like_state(spec, n)?, tests)
}

/// `p P_0 + (1-p) Π` with `Π` the average of adapted design tests (`d ≥ 3`).
pub fn omega_v(spec: &GhzLikeSpec, n: usize, m: Option<usize>, p: f64) -> Result<Strategy> {
    let d = spec.d();
    if d < 3 {
        return Err(Error::InvalidParameter("omega5 needs d >= 3; use omega5prime for qubits".into()));
    }
    one_way_strategy("omega5", spec, n, p, AdaptedFamily::Design { m: m.unwrap_or_else(|| min_bases(d)) })
}

/// Pauli-based variant of [`omega_v`] for qubits and odd prime `d`.
pub fn omega_v_prime(spec: &GhzLikeSpec, n: usize, p: f64) -> Result<Strategy> {
    let d = spec.d();
    if d != 2 && !is_odd_prime(d) {
        return Err(Error::NotOddPrime { d, hint: "; use omega5 (2-design bases) for this d" });
    }
    one_way_strategy("omega5prime", spec, n, p, AdaptedFamily::Pauli)
}

/// `p = λ_0²/(1+λ_0²)`, at which `ν(Ω_V) = 1/(1+λ_0²)`.
pub fn omega_v_optimal_p(spec: &GhzLikeSpec) -> f64 {
    q0_lower_bound(spec, 2, false)
}

/// `ν(Ω_V)` at the optimal `p`.
pub fn omega_v_optimal_nu(spec: &GhzLikeSpec) -> f64 {
    1.0 / (1.0 + spec.squares()[0])
}

/// `P_0` w.p. `p`; the remainder spread over all parties taking the adaptive role.
pub fn omega_vi(spec: &GhzLikeSpec, n: usize, p: f64, family: AdaptedFamily) -> Result<Strategy> {
    check_n(n)?;
    check_open_p(p)?;
    let mut tests = vec![WeightedTest { weight: Weight::Real(p), test: canonical_projector_z(n, spec.d())? }];
    for party in 0..n {
        let adapted = adapted_tests(spec, n, family, party)?;
        let share = Weight::Real((1.0 - p) / (n * adapted.len()) as f64);
        tests.extend(weighted(share, adapted));
    }
    let mut params = like_params(spec, n, p);
    params["family"] = serde_json::to_value(family).expect("family serialises");
    Strategy::new("omega6", params, ghz_like_state(spec, n)?, tests)
}

/// `p = [(n-1)λ_0² + λ_1²]/[n + (n-1)λ_0² + λ_1²]`.
pub fn omega_vi_optimal_p(spec: &GhzLikeSpec, n: usize) -> f64 {
    q0_lower_bound(spec, n, true)
}

/// `ν(Ω_VI) = n/[n + (n-1)λ_0² + λ_1²]` at the optimal `p`.
pub fn omega_vi_optimal_nu(spec: &GhzLikeSpec, n: usize) -> f64 {
    let sq = spec.squares();
    n as f64 / (n as f64 + (n as f64 - 1.0) * sq[0] + sq[1])
}

/// Mixing probability of the trivial test that lifts `β` from `1/(d+1)`.
pub fn omega_vii_trivial_p(d: usize, beta: f64) -> f64 {
    ((d as f64 + 1.0) * beta - 1.0) / d as f64
}

/// The optimal GHZ strategy mixed with the trivial test so that `β(Ω) = beta`.
pub fn omega_vii(n: usize, d: usize, beta: f64) -> Result<Strategy> {
    let lo = 1.0 / (d as f64 + 1.0);
    if !(beta >= lo - WEIGHT_TOL && beta < 1.0) {
        return Err(Error::BetaOutOfRange { beta, lo });
    }
    let base = optimal_ghz(n, d)?;
    let q = omega_vii_trivial_p(d, beta).max(0.0);
    let mut tests: Vec<WeightedTest> = base
        .tests
        .into_iter()
        .map(|t| WeightedTest { weight: t.weight.times(Weight::Real(1.0 - q)), test: t.test })
        .collect();
    if q > 0.0 {
        tests.push(WeightedTest { weight: Weight::Real(q), test: trivial_test(n, d)? });
    }
    let mut params = base.params;
    params["beta"] = json!(beta);
    params["p_trivial"] = json!(q);
    Strategy::new("omega7", params, base.target, tests)
}

/// `max{1/e, bound}`: the adversarial choice of `p` for Ω_VIII / Ω_IX.
pub fn adversarial_p(spec: &GhzLikeSpec, n: usize, two_way: bool) -> f64 {
    (-1.0f64).exp().max(q0_lower_bound(spec, n, two_way))
}

/// `p Q_0 + (1-p) Π`: homogeneous with `β = p` under one-way communication.
pub fn omega_viii(spec: &GhzLikeSpec, n: usize, family: AdaptedFamily, p: f64) -> Result<Strategy> {
    check_n(n)?;
    let q0 = q0_operator(spec, n, p, false)?;
    let adapted = adapted_tests(spec, n, family, n - 1)?;
    let share = Weight::Real((1.0 - p) / adapted.len() as f64);
    let mut tests = vec![WeightedTest { weight: Weight::Real(p), test: q0 }];
    tests.extend(weighted(share, adapted));
    let mut params = like_params(spec, n, p);
    params["family"] = serde_json::to_value(family).expect("family serialises");
    Strategy::new("omega8", params, ghz_like_state(spec, n)?, tests)
}

/// `p Q̃_0 + (1-p)(1/n) Σ_k Π_k`: homogeneous with `β = p`.
pub fn omega_ix(spec: &GhzLikeSpec, n: usize, family: AdaptedFamily, p: f64) -> Result<Strategy> {
    check_n(n)?;
    let q0 = q0_operator(spec, n, p, true)?;
    let mut tests = vec![WeightedTest { weight: Weight::Real(p), test: q0 }];
    for party in 0..n {
        let adapted = adapted_tests(spec, n, family, party)?;
        let share = Weight::Real((1.0 - p) / (n * adapted.len()) as f64);
        tests.extend(weighted(share, adapted));
    }
    let mut params = like_params(spec, n, p);
    params["family"] = serde_json::to_value(family).expect("family serialises");
    Strategy::new("omega9", params, ghz_like_state(spec, n)?, tests)
}

/// Strategy names accepted on the command line and over the C interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyName {
    Omega1,
    Omega2,
    Omega3,
    Omega4,
    Omega5,
    Omega5Prime,
    Omega6,
    Omega7,
    Omega8,
    Omega9,
}

impl StrategyName {
    pub const ALL: [StrategyName; 10] = [
        StrategyName::Omega1,
        StrategyName::Omega2,
        StrategyName::Omega3,
        StrategyName::Omega4,
        StrategyName::Omega5,
        StrategyName::Omega5Prime,
        StrategyName::Omega6,
        StrategyName::Omega7,
        StrategyName::Omega8,
        StrategyName::Omega9,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyName::Omega1 => "omega1",
            StrategyName::Omega2 => "omega2",
            StrategyName::Omega3 => "omega3",
            StrategyName::Omega4 => "omega4",
            StrategyName::Omega5 => "omega5",
            StrategyName::Omega5Prime => "omega5prime",
            StrategyName::Omega6 => "omega6",
            StrategyName::Omega7 => "omega7",
            StrategyName::Omega8 => "omega8",
            StrategyName::Omega9 => "omega9",
        }
    }

    /// Whether the target is a general GHZ-like state (needs `lambdas`).
    pub fn takes_lambdas(&self) -> bool {
        matches!(
            self,
            StrategyName::Omega4
                | StrategyName::Omega5
                | StrategyName::Omega5Prime
                | StrategyName::Omega6
                | StrategyName::Omega8
                | StrategyName::Omega9
        )
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyName::ALL
            .iter()
            .copied()
            .find(|name| name.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy '{s}' (expected omega1..omega9 or omega5prime)")))
    }
}

/// Loose parameter bundle for [`build_named`]; unset values take defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyParams {
    pub n: usize,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    /// Amplitudes `λ_j`; normalised and sorted before use.
    pub lambdas: Option<Vec<f64>>,
}

impl StrategyParams {
    pub fn new(n: usize) -> Self {
        Self { n, ..Self::default() }
    }

    /// The GHZ-like coefficients, or uniform ones of dimension `d` (default 2).
    pub fn spec(&self) -> Result<GhzLikeSpec> {
        let spec = match &self.lambdas {
            Some(l) => GhzLikeSpec::from_unnormalized(l.clone())?,
            None => GhzLikeSpec::uniform(self.d.unwrap_or(2)),
        };
        if let Some(d) = self.d {
            if d != spec.d() {
                return Err(Error::DimensionMismatch { expected: d, actual: spec.d() });
            }
        }
        Ok(spec)
    }

    fn family(&self, d: usize) -> AdaptedFamily {
        match self.m {
            Some(m) => AdaptedFamily::Design { m },
            None => AdaptedFamily::auto(d),
        }
    }
}

/// Builds a named strategy. Unset `p` takes the optimal value for the
/// family (`1/2` for Ω_IV, `max{1/e, bound}` for Ω_VIII/Ω_IX); unset `β`
/// for Ω_VII is `1/e`.
pub fn build_named(name: StrategyName, params: &StrategyParams) -> Result<Strategy> {
    let n = params.n;
    let d = params.d.unwrap_or_else(|| params.lambdas.as_ref().map_or(2, Vec::len));
    match name {
        StrategyName::Omega1 => {
            if d != 2 {
                return Err(Error::InvalidParameter(format!("omega1 is the qubit strategy, got d = {d}")));
            }
            omega_i(n)
        }
        StrategyName::Omega2 => omega_ii(n, d),
        StrategyName::Omega3 => omega_iii(n, d, params.m.unwrap_or_else(|| min_bases(d))),
        StrategyName::Omega4 => {
            let spec = params.spec()?;
            omega_iv(&spec, n, params.p.unwrap_or(0.5))
        }
        StrategyName::Omega5 => {
            let spec = params.spec()?;
            omega_v(&spec, n, params.m, params.p.unwrap_or_else(|| omega_v_optimal_p(&spec)))
        }
        StrategyName::Omega5Prime => {
            let spec = params.spec()?;
            omega_v_prime(&spec, n, params.p.unwrap_or_else(|| omega_v_optimal_p(&spec)))
        }
        StrategyName::Omega6 => {
            let spec = params.spec()?;
            let p = params.p.unwrap_or_else(|| omega_vi_optimal_p(&spec, n));
            omega_vi(&spec, n, p, params.family(spec.d()))
        }
        StrategyName::Omega7 => omega_vii(n, d, params.beta.unwrap_or((-1.0f64).exp())),
        StrategyName::Omega8 => {
            let spec = params.spec()?;
            let p = params.p.unwrap_or_else(|| adversarial_p(&spec, n, false));
            omega_viii(&spec, n, params.family(spec.d()), p)
        }
        StrategyName::Omega9 => {
            let spec = params.spec()?;
            let p = params.p.unwrap_or_else(|| adversarial_p(&spec, n, true));
            omega_ix(&spec, n, params.family(spec.d()), p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(sq: &[f64]) -> GhzLikeSpec {
        GhzLikeSpec::new(sq.iter().map(|x| x.sqrt()).collect()).unwrap()
    }

    #[test]
    fn omega_i_shape() {
        let s = omega_i(4).unwrap();
        assert_eq!(s.tests.len(), 9);
        let s3 = omega_i(3).unwrap();
        let g = ghz_state(3, 2).unwrap();
        let expect = homogeneous_form(&g, 1.0 / 3.0);
        assert!(s3.omega().max_abs_diff(&expect) < 1e-12);
        assert!((s3.spectral_data().unwrap().nu - 2.0 / 3.0).abs() < 1e-12);
        assert!(s3.is_homogeneous(HOMOGENEITY_TOL).unwrap());
    }

    #[test]
    fn omega_ii_and_iii_small() {
        let s = omega_ii(2, 3).unwrap();
        assert_eq!(s.tests.len(), 4);
        assert!(s.omega().max_abs_diff(&homogeneous_form(&ghz_state(2, 3).unwrap(), 0.25)) < 1e-12);
        let t = omega_iii(2, 3, 3).unwrap();
        assert_eq!(t.tests.len(), 4);
        assert!(t.omega().max_abs_diff(&homogeneous_form(&ghz_state(2, 3).unwrap(), 0.25)) < 1e-12);
        assert!(matches!(omega_ii(2, 9), Err(Error::NotOddPrime { .. })));
        assert!(matches!(omega_ii(2, 4), Err(Error::NotOddPrime { .. })));
        assert!(matches!(omega_iii(2, 4, 6), Err(Error::MTooSmall { min: 7, .. })));
    }

    #[test]
    fn exact_weights_sum_to_one() {
        let s = omega_ii(3, 5).unwrap();
        assert!(s.tests.iter().all(|t| matches!(t.weight, Weight::Exact(_))));
        assert_eq!(s.tests[1].weight, Weight::exact(1, 30));
    }

    #[test]
    fn single_p0_not_homogeneous() {
        let g = ghz_state(3, 2).unwrap();
        let s = Strategy::new(
            "p0",
            Value::Null,
            g,
            vec![WeightedTest { weight: Weight::exact(1, 1), test: canonical_projector_z(3, 2).unwrap() }],
        )
        .unwrap();
        assert!(!s.is_homogeneous(HOMOGENEITY_TOL).unwrap());
        assert!(s.omega().max_abs_diff(&canonical_projector_z(3, 2).unwrap().matrix) == 0.0);
    }

    #[test]
    fn omega_iv_spectrum() {
        let sp = spec(&[0.7, 0.3]);
        let half = omega_iv(&sp, 3, 0.5).unwrap();
        assert!((half.spectral_data().unwrap().nu - 0.5).abs() < 1e-10);
        let s = omega_iv(&sp, 3, 0.7).unwrap();
        assert!((s.spectral_data().unwrap().beta - 0.7).abs() < 1e-10);
        assert!(!s.is_homogeneous(HOMOGENEITY_TOL).unwrap());
        assert!(matches!(omega_iv(&sp, 3, 1.0), Err(Error::POutOfRange { .. })));
    }

    #[test]
    fn omega_v_prime_uniform_is_omega_ii() {
        let uni = GhzLikeSpec::uniform(3);
        let v = omega_v_prime(&uni, 2, omega_v_optimal_p(&uni)).unwrap();
        let ii = omega_ii(2, 3).unwrap();
        assert!(v.omega().max_abs_diff(ii.omega()) < 1e-12);
    }

    #[test]
    fn omega_v_optimal_gap() {
        let sp = spec(&[0.5, 0.3, 0.2]);
        let s = omega_v(&sp, 2, None, omega_v_optimal_p(&sp)).unwrap();
        assert!((s.spectral_data().unwrap().nu - 1.0 / 1.5).abs() < 1e-9);
        assert!(omega_v(&spec(&[0.7, 0.3]), 2, None, 0.4).is_err());
    }

    #[test]
    fn omega_vi_gap_example() {
        let sp = spec(&[0.7, 0.3]);
        let p = omega_vi_optimal_p(&sp, 3);
        assert!((p - 17.0 / 47.0).abs() < 1e-15);
        let s = omega_vi(&sp, 3, p, AdaptedFamily::Pauli).unwrap();
        assert!((s.spectral_data().unwrap().nu - 30.0 / 47.0).abs() < 1e-9);
    }

    #[test]
    fn omega_vii_beta() {
        let s = omega_vii(3, 3, (-1.0f64).exp()).unwrap();
        assert!((s.spectral_data().unwrap().beta - (-1.0f64).exp()).abs() < 1e-10);
        assert!(s.is_homogeneous(HOMOGENEITY_TOL).unwrap());
        let base = omega_vii(2, 3, 0.25).unwrap();
        assert_eq!(base.tests.len(), 4);
        assert!(matches!(omega_vii(2, 3, 0.2), Err(Error::BetaOutOfRange { .. })));
        let e = std::f64::consts::E;
        assert!((omega_vii_trivial_p(3, 1.0 / e) - (4.0 - e) / (3.0 * e)).abs() < 1e-15);
    }

    #[test]
    fn omega_viii_ix_homogeneous() {
        let sp = spec(&[0.7, 0.3]);
        for n in [2, 3] {
            let p = adversarial_p(&sp, n, false);
            let s = omega_viii(&sp, n, AdaptedFamily::Pauli, p).unwrap();
            assert!(s.is_homogeneous(HOMOGENEITY_TOL).unwrap());
            assert!((s.spectral_data().unwrap().beta - p).abs() < 1e-10);
            let p2 = adversarial_p(&sp, n, true);
            let t = omega_ix(&sp, n, AdaptedFamily::Pauli, p2).unwrap();
            assert!(t.is_homogeneous(HOMOGENEITY_TOL).unwrap());
            assert!((t.spectral_data().unwrap().beta - p2).abs() < 1e-10);
        }
    }

    #[test]
    fn names_round_trip() {
        for name in StrategyName::ALL {
            assert_eq!(name.as_str().parse::<StrategyName>().unwrap(), name);
        }
        assert!("omega10".parse::<StrategyName>().is_err());
    }

    #[test]
    fn build_named_defaults() {
        let mut params = StrategyParams::new(3);
        params.lambdas = Some(vec![0.7f64.sqrt(), 0.3f64.sqrt()]);
        for name in StrategyName::ALL {
            let mut p = params.clone();
            if !name.takes_lambdas() {
                p.lambdas = None;
                p.d = Some(if matches!(name, StrategyName::Omega2 | StrategyName::Omega3) { 3 } else { 2 });
            }
            if name == StrategyName::Omega5 {
                p.lambdas = Some(vec![0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()]);
            }
            let s = build_named(name, &p).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name.as_str());
        }
    }

    #[test]
    fn json_shape() {
        let s = omega_i(2).unwrap();
        let v: Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["name"], "omega1");
        assert_eq!(v["tests"][0]["p_exact"], "1/3");
        assert!(v["tests"][0]["plan"]["stages"].is_array());
    }
}
