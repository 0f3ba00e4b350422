//! Seeded Monte-Carlo execution of strategies against preparation sources.
//!
//! Each trial draws a test by its probability, then measures the parties one
//! stage at a time with exact Born probabilities, collapsing the state onto
//! the unmeasured parties after every stage. Randomness comes from a ChaCha
//! stream per trial, with a fixed word offset per stage, so records do not
//! depend on thread scheduling.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{fidelity_from_passrate, fidelity_std};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::measurements::plan::{ADAPTIVE_ACCEPT, ADAPTIVE_REJECT};
use crate::measurements::TestOperator;
use crate::states::{DensityMatrix, StateVector};
use crate::strategies::{Strategy, HOMOGENEITY_TOL};

/// Words reserved per stage inside a trial's stream.
const STAGE_SHIFT: u32 = 16;

/// Declarative description of what the source emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// The strategy's own target state.
    Target,
    /// `(1-w)|ψ><ψ| + w·1/D` with `ψ` the target.
    Depolarized { w: f64 },
    /// A JSON file holding one density matrix (used for every trial) or
    /// `{"states": [...]}` (trial `i` uses entry `i mod len`).
    File { path: String },
}

impl std::str::FromStr for SourceSpec {
    type Err = Error;

    /// Parses `target`, `depolarized:w` or `file:path`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "target" {
            return Ok(SourceSpec::Target);
        }
        if let Some(w) = s.strip_prefix("depolarized:") {
            let w: f64 = w.parse().map_err(|_| Error::InvalidParameter(format!("bad depolarizing weight '{w}'")))?;
            return Ok(SourceSpec::Depolarized { w });
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(SourceSpec::File { path: path.into() });
        }
        Err(Error::InvalidParameter(format!("unknown source '{s}' (expected target, depolarized:w or file:path)")))
    }
}

impl SourceSpec {
    pub fn resolve(&self, target: &StateVector) -> Result<Source> {
        match self {
            SourceSpec::Target => Ok(Source::Fixed(target.density())),
            SourceSpec::Depolarized { w } => Ok(Source::Fixed(DensityMatrix::depolarized(target, *w)?)),
            SourceSpec::File { path } => {
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
                let value: Value =
                    serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("{path}: {e}")))?;
                Source::from_json(&value)
            }
        }
    }
}

/// States handed to successive trials; each trial receives an independent copy.
#[derive(Clone, Debug)]
pub enum Source {
    Fixed(DensityMatrix),
    IidList(Vec<DensityMatrix>),
}

impl Source {
    pub fn state(&self, trial: u64) -> &DensityMatrix {
        match self {
            Source::Fixed(rho) => rho,
            Source::IidList(list) => &list[(trial % list.len() as u64) as usize],
        }
    }

    pub fn dim(&self) -> usize {
        self.state(0).dim()
    }

    /// A matrix is an array of rows whose entries are numbers or `[re, im]`.
    /// `{"states": [m0, m1, ...]}` gives an iid list.
    pub fn from_json(value: &Value) -> Result<Self> {
        match value.get("states") {
            Some(states) => {
                let arr = states
                    .as_array()
                    .filter(|a| !a.is_empty())
                    .ok_or_else(|| Error::InvalidParameter("\"states\" must be a non-empty array".into()))?;
                let list = arr.iter().map(parse_density).collect::<Result<Vec<_>>>()?;
                let dim = list[0].dim();
                if let Some(bad) = list.iter().find(|r| r.dim() != dim) {
                    return Err(Error::DimensionMismatch { expected: dim, actual: bad.dim() });
                }
                Ok(Source::IidList(list))
            }
            None => Ok(Source::Fixed(parse_density(value)?)),
        }
    }
}

fn parse_density(value: &Value) -> Result<DensityMatrix> {
    let bad = || Error::InvalidParameter("density matrix must be an array of rows of numbers or [re, im] pairs".into());
    let rows = value.as_array().ok_or_else(bad)?;
    let parsed: Vec<Vec<C64>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|e| match e {
                    Value::Number(x) => x.as_f64().map(|re| C64::new(re, 0.0)).ok_or_else(bad),
                    Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
                        (Some(re), Some(im)) => Ok(C64::new(re, im)),
                        _ => Err(bad()),
                    },
                    _ => Err(bad()),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    DensityMatrix::new(ComplexMatrix::from_rows(&parsed)?)
}

/// One simulated test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Index into the strategy's test list.
    pub test: usize,
    /// Per-party outcome; `None` for parties that did not measure. The
    /// adaptive party reports 0 for accept and 1 for reject.
    pub outcomes: Vec<Option<usize>>,
    /// Uniform draw deciding a probabilistic pass, when one was needed.
    pub coin: Option<f64>,
    pub passed: bool,
    pub substream: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub strategy: String,
    pub seed: u64,
    pub trials: u64,
    pub passes: u64,
    pub pass_rate: f64,
    /// `accept` iff every trial passed.
    pub decision: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_std: Option<f64>,
}

/// Square matrix on `parties` remaining subsystems, row-major.
#[derive(Clone, Debug)]
struct Partial {
    parties: Vec<usize>,
    dim: usize,
    data: Vec<C64>,
}

impl Partial {
    fn from_density(rho: &DensityMatrix, n: usize) -> Self {
        let m = rho.matrix();
        Partial { parties: (0..n).collect(), dim: m.dim(), data: m.as_slice().to_vec() }
    }

    fn position(&self, party: usize) -> usize {
        self.parties.iter().position(|&p| p == party).expect("party not yet measured")
    }

    fn stride(&self, d: usize, pos: usize) -> usize {
        d.pow((self.parties.len() - 1 - pos) as u32)
    }

    /// Reduced state of a single remaining party.
    fn marginal(&self, d: usize, party: usize) -> ComplexMatrix {
        let stride = self.stride(d, self.position(party));
        let rest = self.dim / d;
        let mut out = ComplexMatrix::zeros(d);
        for a in 0..rest {
            let base = (a / stride) * stride * d + a % stride;
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += self.data[(base + i * stride) * self.dim + base + j * stride];
                }
            }
        }
        out
    }

    /// `<k|_party ρ |k>_party` on the other parties, unnormalised.
    fn project(&self, d: usize, party: usize, ket: &[C64]) -> Partial {
        let pos = self.position(party);
        let stride = self.stride(d, pos);
        let rest = self.dim / d;
        let full = |a: usize, i: usize| (a / stride) * stride * d + i * stride + a % stride;
        let mut data = vec![ZERO; rest * rest];
        for a in 0..rest {
            for b in 0..rest {
                let mut acc = ZERO;
                for (i, ki) in ket.iter().enumerate() {
                    let row = full(a, i) * self.dim;
                    for (j, kj) in ket.iter().enumerate() {
                        acc += ki.conj() * kj * self.data[row + full(b, j)];
                    }
                }
                data[a * rest + b] = acc;
            }
        }
        let mut parties = self.parties.clone();
        parties.remove(pos);
        Partial { parties, dim: rest, data }
    }

    fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }
}

fn ket_probability(sigma: &ComplexMatrix, ket: &[C64]) -> f64 {
    sigma.expectation(ket).re.max(0.0)
}

/// Index of the first cumulative weight exceeding `u`.
fn pick(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w / total;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

struct StageRng(ChaCha8Rng);

impl StageRng {
    fn new(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        StageRng(rng)
    }

    fn uniform(&mut self, stage: usize) -> f64 {
        self.0.set_word_pos((stage as u128) << STAGE_SHIFT);
        self.0.gen::<f64>()
    }
}

/// Samples one trial of `test` on `rho`. Stage 0 of the stream is reserved
/// for choosing the test.
fn sample_test(test: &TestOperator, rho: &DensityMatrix, rng: &mut StageRng) -> Result<(Vec<Option<usize>>, Option<f64>, bool)> {
    let plan = &test.plan;
    let (n, d) = (plan.parties, plan.local_dim);
    let stage_kets = plan.stage_kets()?;
    let mut state = Partial::from_density(rho, n);
    let mut outcomes: Vec<Option<usize>> = vec![None; n];
    let mut stage_outs = Vec::with_capacity(plan.stages.len());

    for (s, (stage, kets)) in plan.stages.iter().zip(&stage_kets).enumerate() {
        let sigma = state.marginal(d, stage.party);
        let probs: Vec<f64> = kets.iter().map(|k| ket_probability(&sigma, k)).collect();
        let o = pick(&probs, rng.uniform(s + 1));
        state = state.project(d, stage.party, &kets[o]);
        let tr = state.trace();
        if tr > 0.0 {
            state.scale(1.0 / tr);
        }
        outcomes[stage.party] = Some(o);
        stage_outs.push(o);
    }

    let mut next = plan.stages.len() + 1;
    if let Some(adaptive) = &plan.adaptive {
        let ket = plan.adaptive_ket(adaptive, &stage_kets, &stage_outs)?;
        let p_accept = ket_probability(&state.marginal(d, adaptive.party), &ket).min(1.0);
        let accepted = rng.uniform(next) < p_accept;
        outcomes[adaptive.party] = Some(if accepted { ADAPTIVE_ACCEPT } else { ADAPTIVE_REJECT });
        next += 1;
    }

    let p_pass = plan.pass_probability(&outcomes);
    if p_pass > 0.0 && p_pass < 1.0 {
        let coin = rng.uniform(next);
        Ok((outcomes, Some(coin), coin < p_pass))
    } else {
        Ok((outcomes, None, p_pass >= 1.0))
    }
}

/// Runs `trials` independent tests; records come back in trial order.
pub fn run(strategy: &Strategy, source: &Source, trials: u64, seed: u64) -> Result<(RunSummary, Vec<TrialRecord>)> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let dim = strategy.omega().dim();
    if source.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: source.dim() });
    }
    let weights: Vec<f64> = strategy.tests.iter().map(|t| t.weight.value()).collect();
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = StageRng::new(seed, trial);
            let test = pick(&weights, rng.uniform(0));
            let (outcomes, coin, passed) = sample_test(&strategy.tests[test].test, source.state(trial), &mut rng)?;
            Ok(TrialRecord { trial, test, outcomes, coin, passed, substream: trial })
        })
        .collect::<Result<Vec<_>>>()?;

    let passes = records.iter().filter(|r| r.passed).count() as u64;
    let pass_rate = passes as f64 / trials as f64;
    let (fidelity, fidelity_std) = if strategy.is_homogeneous(HOMOGENEITY_TOL)? {
        let sd = strategy.spectral_data()?;
        match fidelity_from_passrate(pass_rate, sd.beta, sd.nu) {
            Ok(f) => (Some(f), Some(self::fidelity_std(f, sd.nu, trials))),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    let summary = RunSummary {
        strategy: strategy.name.clone(),
        seed,
        trials,
        passes,
        pass_rate,
        decision: if passes == trials { "accept" } else { "reject" }.into(),
        fidelity,
        fidelity_std,
    };
    Ok((summary, records))
}

/// Whether a record is consistent with its test's pass rule and coin.
pub fn recheck(strategy: &Strategy, record: &TrialRecord) -> bool {
    let Some(wt) = strategy.tests.get(record.test) else {
        return false;
    };
    let plan = &wt.test.plan;
    if record.outcomes.len() != plan.parties {
        return false;
    }
    let p = plan.pass_probability(&record.outcomes);
    match record.coin {
        Some(c) => p > 0.0 && p < 1.0 && record.passed == (c < p),
        None => (p == 0.0 || p == 1.0) && record.passed == (p == 1.0),
    }
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(mut out: W, records: &[TrialRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Exact pass probability of `test` on `rho`, summing every outcome branch
/// of the staged protocol.
pub fn exact_pass_probability(test: &TestOperator, rho: &DensityMatrix) -> Result<f64> {
    let plan = &test.plan;
    if rho.dim() != test.matrix.dim() {
        return Err(Error::DimensionMismatch { expected: test.matrix.dim(), actual: rho.dim() });
    }
    let stage_kets = plan.stage_kets()?;
    let mut outcomes = vec![None; plan.parties];
    let mut outs = Vec::new();
    branch(test, &stage_kets, Partial::from_density(rho, plan.parties), 0, &mut outcomes, &mut outs)
}

fn branch(
    test: &TestOperator,
    stage_kets: &[Vec<Vec<C64>>],
    state: Partial,
    s: usize,
    outcomes: &mut Vec<Option<usize>>,
    outs: &mut Vec<usize>,
) -> Result<f64> {
    let plan = &test.plan;
    let d = plan.local_dim;
    if s == plan.stages.len() {
        // `state` carries the probability of the branch as its trace
        let mut total = 0.0;
        match &plan.adaptive {
            Some(a) => {
                let ket = plan.adaptive_ket(a, stage_kets, outs)?;
                let p_acc = ket_probability(&state.marginal(d, a.party), &ket);
                let p_rej = (state.trace() - p_acc).max(0.0);
                for (o, p) in [(ADAPTIVE_ACCEPT, p_acc), (ADAPTIVE_REJECT, p_rej)] {
                    outcomes[a.party] = Some(o);
                    total += p * plan.pass_probability(outcomes);
                }
                outcomes[a.party] = None;
            }
            None => total = state.trace() * plan.pass_probability(outcomes),
        }
        return Ok(total);
    }
    let party = plan.stages[s].party;
    let mut total = 0.0;
    for (o, ket) in stage_kets[s].iter().enumerate() {
        let next = state.project(d, party, ket);
        if next.trace() <= 0.0 {
            continue;
        }
        outcomes[party] = Some(o);
        outs.push(o);
        total += branch(test, stage_kets, next, s + 1, outcomes, outs)?;
        outs.pop();
    }
    outcomes[party] = None;
    Ok(total)
}

/// Reconstructs the top-left `n_probe × n_probe` block of the effect
/// realised by the test's sampling plan, from exact pass probabilities of
/// basis states and of the superpositions `(|i> + |j>)/√2`, `(|i> + i|j>)/√2`.
pub fn empirical_effect(test: &TestOperator, n_probe: usize) -> Result<ComplexMatrix> {
    let dim = test.matrix.dim();
    let k = n_probe.min(dim);
    let (n, d) = (test.parties(), test.local_dim());
    let probe = |amps: Vec<C64>| -> Result<f64> {
        let psi = StateVector::new(d, n, amps)?;
        exact_pass_probability(test, &psi.density())
    };
    let basis = |i: usize| {
        let mut v = vec![ZERO; dim];
        v[i] = C64::new(1.0, 0.0);
        v
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut diag = vec![0.0; k];
    for (i, slot) in diag.iter_mut().enumerate() {
        *slot = probe(basis(i))?;
    }
    let mut out = ComplexMatrix::zeros(k);
    for i in 0..k {
        out[(i, i)] = C64::new(diag[i], 0.0);
        for j in i + 1..k {
            let mut plus = vec![ZERO; dim];
            plus[i] = C64::new(h, 0.0);
            plus[j] = C64::new(h, 0.0);
            let mut plus_i = vec![ZERO; dim];
            plus_i[i] = C64::new(h, 0.0);
            plus_i[j] = C64::new(0.0, h);
            let mean = 0.5 * (diag[i] + diag[j]);
            let re = probe(plus)? - mean;
            let im = mean - probe(plus_i)?;
            out[(i, j)] = C64::new(re, im);
            out[(j, i)] = C64::new(re, -im);
        }
    }
    Ok(out)
}

/// State of the adaptive party after the other stages returned `stage_outcomes`,
/// with the probability of those outcomes.
pub fn conditional_adaptive_state(
    test: &TestOperator,
    rho: &DensityMatrix,
    stage_outcomes: &[usize],
) -> Result<(f64, ComplexMatrix)> {
    let plan = &test.plan;
    let adaptive = plan
        .adaptive
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no adaptive stage", test.label)))?;
    if stage_outcomes.len() != plan.stages.len() {
        return Err(Error::DimensionMismatch { expected: plan.stages.len(), actual: stage_outcomes.len() });
    }
    let kets = plan.stage_kets()?;
    let mut state = Partial::from_density(rho, plan.parties);
    for ((stage, ks), &o) in plan.stages.iter().zip(&kets).zip(stage_outcomes) {
        state = state.project(plan.local_dim, stage.party, &ks[o]);
    }
    let prob = state.trace();
    let mut sigma = state.marginal(plan.local_dim, adaptive.party);
    if prob > 0.0 {
        sigma = sigma.scale(1.0 / prob);
    }
    Ok((prob, sigma))
}

/// Fidelity estimate and its standard deviation from a simulated run.
pub fn estimate_fidelity_run(strategy: &Strategy, source: &Source, trials: u64, seed: u64) -> Result<(f64, f64)> {
    if !strategy.is_homogeneous(HOMOGENEITY_TOL)? {
        return Err(Error::NotHomogeneous);
    }
    let sd = strategy.spectral_data()?;
    let (summary, _) = run(strategy, source, trials, seed)?;
    let f = fidelity_from_passrate(summary.pass_rate, sd.beta, sd.nu)?;
    Ok((f, fidelity_std(f, sd.nu, trials)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::projectors::{canonical_projector_z, q0_operator};
    use crate::states::{ghz_state, GhzLikeSpec};
    use crate::strategies::{omega_i, omega_iv};

    #[test]
    fn source_parsing() {
        assert_eq!("target".parse::<SourceSpec>().unwrap(), SourceSpec::Target);
        assert_eq!("depolarized:0.2".parse::<SourceSpec>().unwrap(), SourceSpec::Depolarized { w: 0.2 });
        assert!("noise".parse::<SourceSpec>().is_err());
        let v: Value = serde_json::from_str("[[0.5, 0], [0, [0.5, 0]]]").unwrap();
        assert!(matches!(Source::from_json(&v).unwrap(), Source::Fixed(_)));
        let l: Value = serde_json::from_str(r#"{"states": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}"#).unwrap();
        assert!(matches!(Source::from_json(&l).unwrap(), Source::IidList(ref v) if v.len() == 2));
    }

    #[test]
    fn target_always_passes() {
        let s = omega_i(3).unwrap();
        let src = SourceSpec::Target.resolve(&s.target).unwrap();
        let (sum, recs) = run(&s, &src, 2000, 7).unwrap();
        assert_eq!(sum.passes, 2000);
        assert_eq!(sum.decision, "accept");
        assert!(recs.iter().all(|r| recheck(&s, r)));
    }

    #[test]
    fn deterministic_records() {
        let s = omega_iv(&GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()]).unwrap(), 3, 0.5).unwrap();
        let src = SourceSpec::Depolarized { w: 0.3 }.resolve(&s.target).unwrap();
        let a = run(&s, &src, 500, 11).unwrap().1;
        let b = run(&s, &src, 500, 11).unwrap().1;
        assert_eq!(a, b);
        let c = run(&s, &src, 500, 12).unwrap().1;
        assert_ne!(a, c);
    }

    #[test]
    fn exact_probability_matches_trace() {
        let g = ghz_state(3, 2).unwrap();
        let rho = DensityMatrix::depolarized(&g, 0.4).unwrap();
        let s = omega_i(3).unwrap();
        for t in &s.tests {
            let expect = t.test.matrix.hs_inner(rho.matrix()).re;
            assert!((exact_pass_probability(&t.test, &rho).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_effect_examples() {
        let p0 = canonical_projector_z(2, 2).unwrap();
        assert!(empirical_effect(&p0, 4).unwrap().max_abs_diff(&p0.matrix) < 1e-12);
        let spec = GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()]).unwrap();
        let q = q0_operator(&spec, 2, 0.5, false).unwrap();
        assert!(empirical_effect(&q, 4).unwrap().max_abs_diff(&q.matrix) < 1e-12);
    }

    #[test]
    fn fidelity_run_rejects_inhomogeneous() {
        let s = omega_iv(&GhzLikeSpec::new(vec![0.7f64.sqrt(), 0.3f64.sqrt()]).unwrap(), 2, 0.7).unwrap();
        let src = SourceSpec::Target.resolve(&s.target).unwrap();
        assert!(matches!(estimate_fidelity_run(&s, &src, 10, 1), Err(Error::NotHomogeneous)));
    }
}
