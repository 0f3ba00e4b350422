//! Test operators and the local measurements that realise them.

pub mod admissible;
pub mod pauli;
pub mod plan;
pub mod projectors;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::states::StateVector;

pub use plan::{AdaptiveRule, AdaptiveStage, LocalBasis, PassRule, SamplingPlan, Stage};

/// Tolerance for `0 ≤ E ≤ 1` and `E|ψ> = |ψ>` checks.
pub const EFFECT_TOL: f64 = 1e-10;

/// A two-outcome test: its pass effect `E` and the local protocol realising it.
#[derive(Clone, Debug, Serialize)]
pub struct TestOperator {
    pub label: String,
    #[serde(skip)]
    pub matrix: ComplexMatrix,
    pub plan: SamplingPlan,
}

impl TestOperator {
    pub fn new(label: impl Into<String>, matrix: ComplexMatrix, plan: SamplingPlan) -> Self {
        Self { label: label.into(), matrix, plan }
    }

    pub fn parties(&self) -> usize {
        self.plan.parties
    }

    pub fn local_dim(&self) -> usize {
        self.plan.local_dim
    }

    /// Checks `0 ≤ E ≤ 1`.
    pub fn is_effect(&self) -> Result<bool> {
        let eig = hermitian_eig(&self.matrix)?;
        Ok(eig.min() >= -EFFECT_TOL && eig.max() <= 1.0 + EFFECT_TOL)
    }

    /// `‖E|ψ> - |ψ>‖_∞`.
    pub fn target_deviation(&self, target: &StateVector) -> Result<f64> {
        if target.dim() != self.matrix.dim() {
            return Err(Error::DimensionMismatch { expected: self.matrix.dim(), actual: target.dim() });
        }
        let img = self.matrix.apply(target.amplitudes());
        Ok(img.iter().zip(target.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn passes_target(&self, target: &StateVector) -> Result<bool> {
        Ok(self.target_deviation(target)? <= EFFECT_TOL)
    }

    /// `‖branch_sum(plan) - E‖_max`.
    pub fn plan_deviation(&self) -> Result<f64> {
        Ok(self.plan.branch_sum_effect()?.max_abs_diff(&self.matrix))
    }
}
