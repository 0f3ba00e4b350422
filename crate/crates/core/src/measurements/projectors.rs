//! Canonical test projectors for GHZ states and their adaptive variants for
//! GHZ-like states.

use crate::error::{Error, Result};
use crate::linalg::{checked_pow, kron_all, ComplexMatrix, C64, ONE};
use crate::measurements::pauli::{is_odd_prime, pauli_ops, qubit_y, xw_power, xz_power};
use crate::measurements::plan::{AdaptiveRule, AdaptiveStage, LocalBasis, PassRule, SamplingPlan, Stage};
use crate::measurements::TestOperator;
use crate::states::{diagonal_index, digits, ghz_state, GhzLikeSpec};

const BOUND_TOL: f64 = 1e-12;

fn standard_stages(n: usize) -> Vec<Stage> {
    (0..n).map(|party| Stage { party, basis: LocalBasis::Standard }).collect()
}

fn fmt_labels(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `(1/d) Σ_l (⊗_k A_k)^l` for local operators with `A_k^d = 1`.
fn cyclic_average(locals: &[ComplexMatrix], d: usize) -> Result<ComplexMatrix> {
    let dim = checked_pow(d, locals.len())?;
    let mut out = ComplexMatrix::zeros(dim);
    let mut powers: Vec<ComplexMatrix> = locals.iter().map(|a| ComplexMatrix::identity(a.dim())).collect();
    for _ in 0..d {
        out.add_scaled(&kron_all(&powers)?, 1.0 / d as f64);
        powers = powers.iter().zip(locals).map(|(p, a)| p * a).collect();
    }
    Ok(out)
}

/// `P_0 = Σ_j (|j><j|)^{⊗n}`: pass iff all standard-basis outcomes coincide.
pub fn canonical_projector_z(n: usize, d: usize) -> Result<TestOperator> {
    let dim = checked_pow(d, n)?;
    let mut m = ComplexMatrix::zeros(dim);
    for j in 0..d {
        let i = diagonal_index(j, d, n);
        m[(i, i)] = ONE;
    }
    let plan = SamplingPlan::new(n, d, standard_stages(n), None, PassRule::AllEqual)?;
    Ok(TestOperator::new("P_0", m, plan))
}

/// Subsets of `{0..n}` with even cardinality, in binary-counting order.
pub fn even_subsets(n: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|mask| mask.count_ones() % 2 == 0)
        .map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).collect())
        .collect()
}

/// `P_Y = ½[1 + (-1)^t Π_{k∈Y} Y_k Π_{k∉Y} X_k]`, `t = |Y|/2`, for qubits.
pub fn canonical_projector_xy(yset: &[usize], n: usize) -> Result<TestOperator> {
    if yset.len() % 2 == 1 {
        return Err(Error::OddYSet(yset.len()));
    }
    if yset.iter().any(|&k| k >= n) {
        return Err(Error::InvalidParameter(format!("party index out of range in Y set {yset:?}")));
    }
    let t = yset.len() / 2;
    let (x, _) = pauli_ops(2);
    let y = qubit_y();
    let locals: Vec<ComplexMatrix> = (0..n).map(|k| if yset.contains(&k) { y.clone() } else { x.clone() }).collect();
    let string = kron_all(&locals)?;
    let sign = if t.is_multiple_of(2) { 0.5 } else { -0.5 };
    let mut m = ComplexMatrix::identity(string.dim()).scale(0.5);
    m.add_scaled(&string, sign);

    let stages = (0..n)
        .map(|party| Stage {
            party,
            basis: if yset.contains(&party) { LocalBasis::QubitY } else { LocalBasis::ShiftPhase { r: 0 } },
        })
        .collect();
    let plan = SamplingPlan::new(n, 2, stages, None, PassRule::ResidueSum { modulus: 2, target: t % 2 })?;
    Ok(TestOperator::new(format!("P_Y{{{}}}", fmt_labels(yset)), m, plan))
}

/// Strings in `{offset, …, offset+modulus-1}^n` whose sum is `0 mod modulus`,
/// lexicographic.
pub fn residue_strings(n: usize, modulus: usize, offset: usize) -> Vec<Vec<usize>> {
    let total = checked_pow(modulus, n).unwrap_or(0);
    (0..total)
        .map(|i| digits(i, modulus, n).into_iter().map(|v| v + offset).collect::<Vec<_>>())
        .filter(|s| s.iter().sum::<usize>() % modulus == 0)
        .collect()
}

/// `P_r = (1/d) Σ_l (Π_k X_k Z_k^{r_k})^l` for odd prime `d`, `Σ r_k ≡ 0`.
pub fn canonical_projector_r(r: &[usize], d: usize) -> Result<TestOperator> {
    if !is_odd_prime(d) {
        return Err(Error::NotOddPrime { d, hint: "" });
    }
    let sum: usize = r.iter().sum();
    if !sum.is_multiple_of(d) {
        return Err(Error::BadResidue { sum: sum % d, modulus: d });
    }
    let n = r.len();
    let locals: Vec<ComplexMatrix> = r.iter().map(|&rk| xz_power(d, rk % d)).collect();
    let m = cyclic_average(&locals, d)?;
    let stages = r.iter().enumerate().map(|(party, &rk)| Stage { party, basis: LocalBasis::ShiftPhase { r: rk % d } }).collect();
    let plan = SamplingPlan::new(n, d, stages, None, PassRule::ResidueSum { modulus: d, target: 0 })?;
    Ok(TestOperator::new(format!("P_r({})", fmt_labels(r)), m, plan))
}

/// `P_h = (1/d) Σ_l (Π_k X_k W_k^{h_k})^l` with `h_k ∈ {1..m}`, `Σ h_k ≡ 0 mod m`.
pub fn design_projector_h(h: &[usize], d: usize, m: usize) -> Result<TestOperator> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("design projectors need d >= 3, got {d}")));
    }
    if h.iter().any(|&hk| hk == 0 || hk > m) {
        return Err(Error::InvalidParameter(format!("h labels must lie in 1..={m}")));
    }
    let sum: usize = h.iter().sum();
    if !sum.is_multiple_of(m) {
        return Err(Error::BadResidue { sum: sum % m, modulus: m });
    }
    let n = h.len();
    let locals: Vec<ComplexMatrix> = h.iter().map(|&hk| xw_power(d, m, hk)).collect();
    let mat = cyclic_average(&locals, d)?;
    let stages = h.iter().enumerate().map(|(party, &hk)| Stage { party, basis: LocalBasis::Design { h: hk, m } }).collect();
    let plan = SamplingPlan::new(n, d, stages, None, PassRule::ResidueSum { modulus: d, target: 0 })?;
    Ok(TestOperator::new(format!("P_h({})", fmt_labels(h)), mat, plan))
}

/// `(1^{⊗(n-1)} ⊗ M) P (1^{⊗(n-1)} ⊗ M)` with the last party adapting.
pub fn adapted_projector(base: &TestOperator, spec: &GhzLikeSpec) -> Result<TestOperator> {
    adapted_projector_at(base, spec, base.parties() - 1)
}

/// Adapted projector with `M = √d diag(λ)` acting on `party`, which measures
/// last and adapts to the others' broadcast outcomes.
pub fn adapted_projector_at(base: &TestOperator, spec: &GhzLikeSpec, party: usize) -> Result<TestOperator> {
    let (n, d) = (base.parties(), base.local_dim());
    if spec.d() != d {
        return Err(Error::InvalidSpec(format!("spec has d = {}, test has d = {d}", spec.d())));
    }
    if party >= n {
        return Err(Error::InvalidParameter(format!("party {party} out of range")));
    }
    let (modulus, target) = match (&base.plan.pass_rule, &base.plan.adaptive) {
        (PassRule::ResidueSum { modulus, target }, None) if base.plan.stages.len() == n => (*modulus, *target),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a residue-sum test (P_Y, P_r or P_h)",
                base.label
            )))
        }
    };
    let filter = spec.m_diagonal();
    let mat = ComplexMatrix::from_fn(base.matrix.dim(), |i, j| {
        let (a, b) = (digits(i, d, n)[party], digits(j, d, n)[party]);
        base.matrix[(i, j)] * (filter[a] * filter[b])
    });
    let mut stages = base.plan.stages.clone();
    let pos = stages.iter().position(|s| s.party == party).expect("every party staged");
    let basis = stages.remove(pos).basis;
    let adaptive = AdaptiveStage {
        party,
        rule: AdaptiveRule::ResidueComplement { basis, modulus, target },
        filter: Some(filter),
    };
    let plan = SamplingPlan::new(n, d, stages, Some(adaptive), PassRule::AdaptiveAccept)?;
    let label = base.label.replacen("P_", "P'_", 1);
    let label = if party == n - 1 { label } else { format!("{label}@{party}") };
    Ok(TestOperator::new(label, mat, plan))
}

/// Maximum deviation `||u_g[j]|² - 1/d|` over the basis.
pub fn unbiasedness_deviation(kets: &[Vec<C64>]) -> f64 {
    let d = kets.len() as f64;
    kets.iter().flatten().map(|z| (z.norm_sqr() - 1.0 / d).abs()).fold(0.0, f64::max)
}

/// Second test of the two-test protocol for `|ξ>`: the first `n-1` parties
/// measure `basis`, the last projects onto `M|v_g>`.
pub fn mub_second_test(spec: &GhzLikeSpec, n: usize, basis: &LocalBasis) -> Result<TestOperator> {
    let d = spec.d();
    let kets = basis.kets(d)?;
    let dev = unbiasedness_deviation(&kets);
    if dev > 1e-10 {
        return Err(Error::NotUnbiased(dev));
    }
    let ghz = ghz_state(n, d)?;
    let dim = ghz.dim();
    let filter = spec.m_diagonal();
    let scale = (d as f64).powi(n as i32 - 1);
    let identity = ComplexMatrix::identity(d);
    let mut tilde = ComplexMatrix::zeros(dim);
    for g in 0..checked_pow(d, n - 1)? {
        let gs = digits(g, d, n - 1);
        let mut factors: Vec<ComplexMatrix> = gs.iter().map(|&gk| ComplexMatrix::projector(&kets[gk])).collect();
        factors.push(identity.clone());
        let w = kron_all(&factors)?.apply(ghz.amplitudes());
        tilde.add_scaled(&ComplexMatrix::projector(&w), scale);
    }
    let mat = ComplexMatrix::from_fn(dim, |i, j| tilde[(i, j)] * (filter[i % d] * filter[j % d]));
    let stages = (0..n - 1).map(|party| Stage { party, basis: basis.clone() }).collect();
    let adaptive = AdaptiveStage { party: n - 1, rule: AdaptiveRule::ConditionalGhz, filter: Some(filter) };
    let plan = SamplingPlan::new(n, d, stages, Some(adaptive), PassRule::AdaptiveAccept)?;
    Ok(TestOperator::new("P_1", mat, plan))
}

/// Smallest admissible `p` for `Q_0` (one-way) or `Q̃_0` (two-way).
pub fn q0_lower_bound(spec: &GhzLikeSpec, n: usize, two_way: bool) -> f64 {
    let sq = spec.squares();
    if two_way {
        let a = (n as f64 - 1.0) * sq[0] + sq[1];
        a / (n as f64 + a)
    } else {
        sq[0] / (1.0 + sq[0])
    }
}

/// `Q_0 = P_0 + Σ_{j∈B} [1 - (1/p - 1) λ_{j_n}²] |j><j|` (one-way) or `Q̃_0`
/// with the penalty averaged over all parties (two-way). `B` is the set of
/// non-constant strings.
pub fn q0_operator(spec: &GhzLikeSpec, n: usize, p: f64, two_way: bool) -> Result<TestOperator> {
    let lo = q0_lower_bound(spec, n, two_way);
    if !(p >= lo - BOUND_TOL && p < 1.0) {
        return Err(Error::POutOfRange { p, range: format!("[{lo}, 1)") });
    }
    let d = spec.d();
    let sq = spec.squares();
    let (scale, parties): (f64, Vec<usize>) = if two_way {
        ((1.0 / p - 1.0) / n as f64, (0..n).collect())
    } else {
        (1.0 / p - 1.0, vec![n - 1])
    };
    let dim = checked_pow(d, n)?;
    let mut diag = vec![0.0; dim];
    for (i, slot) in diag.iter_mut().enumerate() {
        let js = digits(i, d, n);
        if js.windows(2).all(|w| w[0] == w[1]) {
            *slot = 1.0;
        } else {
            let c = 1.0 - scale * parties.iter().map(|&k| sq[js[k]]).sum::<f64>();
            if !(-BOUND_TOL..=1.0).contains(&c) {
                return Err(Error::POutOfRange { p, range: format!("[{lo}, 1)") });
            }
            *slot = c.max(0.0);
        }
    }
    let rule = PassRule::MismatchPenalty { scale, parties, weights: sq };
    let plan = SamplingPlan::new(n, d, standard_stages(n), None, rule)?;
    let label = if two_way { "Q~_0" } else { "Q_0" };
    Ok(TestOperator::new(label, ComplexMatrix::from_real_diag(&diag), plan))
}

/// The trivial test: every state passes.
pub fn trivial_test(n: usize, d: usize) -> Result<TestOperator> {
    let dim = checked_pow(d, n)?;
    let plan = SamplingPlan::new(n, d, vec![], None, PassRule::Always)?;
    Ok(TestOperator::new("1", ComplexMatrix::identity(dim), plan))
}
