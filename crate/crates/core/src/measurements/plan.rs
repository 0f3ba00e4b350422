//! Operational description of a test: which party measures which basis, in
//! what order, and how the outcomes decide pass/fail.
//!
//! A [`SamplingPlan`] is what a lab (or the simulator) actually executes. The
//! effect it induces is recovered by [`SamplingPlan::branch_sum_effect`],
//! which sums outcome projectors over every branch of the plan, weighted by
//! the pass rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{checked_pow, kron_all, kron_vec, ComplexMatrix, C64, ONE, ZERO};

/// A local orthonormal basis with a fixed outcome labelling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalBasis {
    /// Computational basis; outcome `j` is `|j>`.
    Standard,
    /// Eigenbasis of `X Z^r`; outcome `o` has eigenvalue `ω^o`. For `d = 2`
    /// only `r = 0` (the Pauli X basis) is meaningful.
    ShiftPhase { r: usize },
    /// Qubit Pauli Y basis; outcome 0 is eigenvalue +1, outcome 1 is -1.
    QubitY,
    /// Basis `B_h` of the weighted 2-design; outcome `t` is `|ψ_{ht}>`, the
    /// eigenvector of `X W^h` with eigenvalue `ω^{-t}`.
    Design { h: usize, m: usize },
    /// Fourier basis `Σ_j ω^{gj}|j>/√d`; outcome `g`.
    Fourier,
    /// Explicit kets, each a list of `[re, im]` amplitudes.
    Custom { kets: Vec<Vec<[f64; 2]>> },
}

fn root_of_unity(k: i64, order: usize) -> C64 {
    let order = order as i64;
    let k = k.rem_euclid(order);
    C64::from_polar(1.0, 2.0 * PI * k as f64 / order as f64)
}

impl LocalBasis {
    /// The `d` kets of this basis, indexed by outcome.
    pub fn kets(&self, d: usize) -> Result<Vec<Vec<C64>>> {
        let norm = 1.0 / (d as f64).sqrt();
        let di = d as i64;
        let kets = match self {
            LocalBasis::Standard => (0..d)
                .map(|o| (0..d).map(|j| if j == o { ONE } else { ZERO }).collect())
                .collect(),
            LocalBasis::ShiftPhase { r } => {
                if d.is_multiple_of(2) && *r != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "XZ^{r} eigenbasis with outcome phases ω^o needs odd d, got {d}"
                    )));
                }
                let r = *r as i64;
                // c_j = ω^{r j(j-1)/2 - o j}
                (0..di)
                    .map(|o| (0..di).map(|j| root_of_unity(r * j * (j - 1) / 2 - o * j, d) * norm).collect())
                    .collect()
            }
            LocalBasis::QubitY => {
                if d != 2 {
                    return Err(Error::InvalidParameter("Pauli Y basis needs d = 2".into()));
                }
                vec![
                    vec![C64::new(norm, 0.0), C64::new(0.0, norm)],
                    vec![C64::new(norm, 0.0), C64::new(0.0, -norm)],
                ]
            }
            LocalBasis::Design { h, m } => crate::measurements::pauli::design_kets(d, *m, *h),
            LocalBasis::Fourier => (0..di)
                .map(|g| (0..di).map(|j| root_of_unity(g * j, d) * norm).collect())
                .collect(),
            LocalBasis::Custom { kets } => {
                if kets.len() != d || kets.iter().any(|k| k.len() != d) {
                    return Err(Error::DimensionMismatch { expected: d, actual: kets.len() });
                }
                kets.iter()
                    .map(|k| k.iter().map(|[re, im]| C64::new(*re, *im)).collect())
                    .collect()
            }
        };
        Ok(kets)
    }

    /// Short label, e.g. `X`, `Y`, `Z`, `XZ2`, `B3`.
    pub fn label(&self, d: usize) -> String {
        match self {
            LocalBasis::Standard => "Z".into(),
            LocalBasis::ShiftPhase { r: 0 } => "X".into(),
            LocalBasis::ShiftPhase { r: 1 } => "XZ".into(),
            LocalBasis::ShiftPhase { r } => format!("XZ{r}"),
            LocalBasis::QubitY => "Y".into(),
            LocalBasis::Design { h, .. } => format!("B{h}"),
            LocalBasis::Fourier => "F".into(),
            LocalBasis::Custom { .. } => format!("U{d}"),
        }
    }
}

/// A non-adaptive local measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub party: usize,
    pub basis: LocalBasis,
}

/// How the adaptive party picks its accepting ket from the broadcast outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdaptiveRule {
    /// Accept on the basis ket whose outcome `o*` completes
    /// `Σ_k o_k ≡ target (mod modulus)`.
    ResidueComplement { basis: LocalBasis, modulus: usize, target: usize },
    /// Accept on the conditional state of the GHZ state given the other
    /// parties' outcomes: `|v_g> ∝ (⊗_k <b_{g_k}|) |G>`.
    ConditionalGhz,
}

/// Binary measurement `{F|φ><φ|F, 1 - F|φ><φ|F}` on one party, chosen after
/// every non-adaptive stage has been measured. `filter` is the diagonal of
/// `F` (the operator `M = √d diag(λ)`), or absent for `F = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveStage {
    pub party: usize,
    pub rule: AdaptiveRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<Vec<f64>>,
}

/// Outcome of the adaptive party: accepting ket.
pub const ADAPTIVE_ACCEPT: usize = 0;
/// Outcome of the adaptive party: orthogonal complement.
pub const ADAPTIVE_REJECT: usize = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PassRule {
    /// Trivial test.
    Always,
    /// All outcomes coincide.
    AllEqual,
    /// `Σ_k o_k ≡ target (mod modulus)`.
    ResidueSum { modulus: usize, target: usize },
    /// The adaptive party obtained its accepting outcome.
    AdaptiveAccept,
    /// Pass with certainty when all outcomes coincide; otherwise pass with
    /// probability `1 - scale · Σ_{k ∈ parties} weights[o_k]`.
    MismatchPenalty { scale: f64, parties: Vec<usize>, weights: Vec<f64> },
    /// Pass iff the outcome tuple (over measured parties, in stage order) is listed.
    OutcomeSet { accepted: Vec<Vec<usize>> },
}

impl PassRule {
    /// Probability of passing given per-party outcomes (`None` = not
    /// measured). `adaptive_party` is needed only by `AdaptiveAccept`.
    pub fn pass_probability(
        &self,
        outcomes: &[Option<usize>],
        stage_parties: &[usize],
        adaptive_party: Option<usize>,
    ) -> f64 {
        match self {
            PassRule::Always => 1.0,
            PassRule::AllEqual => {
                let mut it = outcomes.iter().flatten();
                let first = it.next();
                bool_prob(first.is_none_or(|f| it.all(|o| o == f)))
            }
            PassRule::ResidueSum { modulus, target } => {
                let s: usize = outcomes.iter().flatten().sum();
                bool_prob(s % modulus == target % modulus)
            }
            PassRule::AdaptiveAccept => {
                bool_prob(adaptive_party.and_then(|k| outcomes[k]) == Some(ADAPTIVE_ACCEPT))
            }
            PassRule::MismatchPenalty { scale, parties, weights } => {
                let vals: Vec<usize> = outcomes.iter().flatten().copied().collect();
                if vals.windows(2).all(|w| w[0] == w[1]) {
                    1.0
                } else {
                    let pen: f64 = parties.iter().map(|&k| weights[outcomes[k].expect("measured")]).sum();
                    (1.0 - scale * pen).clamp(0.0, 1.0)
                }
            }
            PassRule::OutcomeSet { accepted } => {
                let tuple: Vec<usize> = stage_parties.iter().map(|&k| outcomes[k].expect("measured")).collect();
                bool_prob(accepted.contains(&tuple))
            }
        }
    }
}

fn bool_prob(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Staged local-measurement protocol realising one test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub parties: usize,
    pub local_dim: usize,
    pub stages: Vec<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<AdaptiveStage>,
    pub pass_rule: PassRule,
}

impl SamplingPlan {
    pub fn new(
        parties: usize,
        local_dim: usize,
        stages: Vec<Stage>,
        adaptive: Option<AdaptiveStage>,
        pass_rule: PassRule,
    ) -> Result<Self> {
        let plan = Self { parties, local_dim, stages, adaptive, pass_rule };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.parties];
        let adaptive_party = self.adaptive.as_ref().map(|a| a.party);
        for p in self.stages.iter().map(|s| s.party).chain(adaptive_party) {
            if p >= self.parties || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("party {p} out of range or measured twice")));
            }
        }
        for s in &self.stages {
            s.basis.kets(self.local_dim)?;
        }
        if matches!(self.pass_rule, PassRule::AdaptiveAccept) != self.adaptive.is_some() {
            return Err(Error::InvalidParameter(
                "adaptive stage and AdaptiveAccept pass rule must come together".into(),
            ));
        }
        if let Some(a) = &self.adaptive {
            if let Some(f) = &a.filter {
                if f.len() != self.local_dim {
                    return Err(Error::DimensionMismatch { expected: self.local_dim, actual: f.len() });
                }
            }
            if let AdaptiveRule::ResidueComplement { basis, .. } = &a.rule {
                basis.kets(self.local_dim)?;
            }
        }
        Ok(())
    }

    /// Pass probability for a full outcome record; the adaptive party (if
    /// any) reports [`ADAPTIVE_ACCEPT`] or [`ADAPTIVE_REJECT`].
    pub fn pass_probability(&self, outcomes: &[Option<usize>]) -> f64 {
        self.pass_rule.pass_probability(outcomes, &self.stage_parties(), self.adaptive.as_ref().map(|a| a.party))
    }

    pub fn stage_parties(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.party).collect()
    }

    /// Resolved kets of every stage, in stage order.
    pub fn stage_kets(&self) -> Result<Vec<Vec<Vec<C64>>>> {
        self.stages.iter().map(|s| s.basis.kets(self.local_dim)).collect()
    }

    /// Accepting ket of the adaptive party given the non-adaptive outcomes.
    pub fn adaptive_ket(
        &self,
        adaptive: &AdaptiveStage,
        stage_kets: &[Vec<Vec<C64>>],
        stage_outcomes: &[usize],
    ) -> Result<Vec<C64>> {
        let d = self.local_dim;
        let mut ket = match &adaptive.rule {
            AdaptiveRule::ResidueComplement { basis, modulus, target } => {
                let s: usize = stage_outcomes.iter().sum();
                let o = (target % modulus + modulus - s % modulus) % modulus;
                basis.kets(d)?.swap_remove(o)
            }
            AdaptiveRule::ConditionalGhz => {
                // (⊗_k <b_{g_k}|) Σ_j |j..j>, normalised.
                let mut v: Vec<C64> = (0..d)
                    .map(|j| stage_kets.iter().zip(stage_outcomes).map(|(kets, &g)| kets[g][j].conj()).product())
                    .collect();
                let norm = crate::linalg::vec_norm(&v);
                if norm == 0.0 {
                    return Err(Error::InvalidParameter("conditional GHZ state vanishes".into()));
                }
                v.iter_mut().for_each(|z| *z /= norm);
                v
            }
        };
        if let Some(f) = &adaptive.filter {
            ket.iter_mut().zip(f).for_each(|(z, s)| *z *= s);
        }
        Ok(ket)
    }

    /// Effect operator induced by the plan, summed analytically over every
    /// outcome branch.
    pub fn branch_sum_effect(&self) -> Result<ComplexMatrix> {
        let (n, d) = (self.parties, self.local_dim);
        let dim = checked_pow(d, n)?;
        let stage_kets = self.stage_kets()?;
        let stage_parties = self.stage_parties();
        let branches = checked_pow(d, self.stages.len()).unwrap_or(usize::MAX);
        let identity = ComplexMatrix::identity(d);
        let mut effect = ComplexMatrix::zeros(dim);

        for b in 0..branches {
            let outs = crate::states::digits(b, d, self.stages.len());
            let mut per_party: Vec<Option<usize>> = vec![None; n];
            let mut factors: Vec<Option<Vec<C64>>> = vec![None; n];
            for ((&party, kets), &o) in stage_parties.iter().zip(&stage_kets).zip(&outs) {
                per_party[party] = Some(o);
                factors[party] = Some(kets[o].clone());
            }
            let weight = match &self.adaptive {
                Some(a) => {
                    factors[a.party] = Some(self.adaptive_ket(a, &stage_kets, &outs)?);
                    1.0
                }
                None => self.pass_probability(&per_party),
            };
            if weight == 0.0 {
                continue;
            }
            if factors.iter().all(Option::is_some) {
                let ket = factors
                    .iter()
                    .flatten()
                    .skip(1)
                    .fold(factors[0].clone().expect("present"), |acc, f| kron_vec(&acc, f));
                let proj = ComplexMatrix::projector(&ket);
                effect.add_scaled(&proj, weight);
            } else {
                let mats: Vec<ComplexMatrix> = factors
                    .iter()
                    .map(|f| f.as_ref().map_or_else(|| identity.clone(), |k| ComplexMatrix::projector(k)))
                    .collect();
                effect.add_scaled(&kron_all(&mats)?, weight);
            }
        }
        Ok(effect)
    }
}
