//! Target states and density matrices.
//!
//! Basis convention used throughout the crate: for `n` parties of local
//! dimension `d`, the computational basis index of `|j_0 j_1 ... j_{n-1}>` is
//! `sum_k j_k d^(n-1-k)`, i.e. party 0 is the most significant digit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, checked_pow, ComplexMatrix, C64, ZERO};

const NORM_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

/// Base-`d` digits of `index`, most significant (party 0) first.
pub fn digits(mut index: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn index_of(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &j| acc * d + j)
}

/// Index of `|j>^{⊗n}`.
pub fn diagonal_index(j: usize, d: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, _| acc * d + j)
}

/// Normalised pure state of `parties` qudits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    local_dim: usize,
    parties: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(local_dim: usize, parties: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = checked_pow(local_dim, parties)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: amplitudes.len() });
        }
        let norm = crate::linalg::vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self { local_dim, parties, amplitudes })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::projector(&self.amplitudes))
    }
}

/// Schmidt coefficients `λ_0 ≥ λ_1 ≥ … ≥ 0` of a GHZ-like state, stored as
/// amplitudes (not squared).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzLikeSpec {
    lambdas: Vec<f64>,
}

impl GhzLikeSpec {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::InvalidSpec("need at least two coefficients".into()));
        }
        if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidSpec("coefficients must be finite and non-negative".into()));
        }
        if lambdas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpec("coefficients must be in decreasing order".into()));
        }
        if lambdas[0] >= 1.0 {
            return Err(Error::InvalidSpec("λ_0 must be strictly below 1".into()));
        }
        let norm2: f64 = lambdas.iter().map(|l| l * l).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidSpec(format!("sum of squares is {norm2}, expected 1")));
        }
        Ok(Self { lambdas })
    }

    /// Uniform coefficients `1/√d`; the GHZ state itself.
    pub fn uniform(d: usize) -> Self {
        Self { lambdas: vec![1.0 / (d as f64).sqrt(); d] }
    }

    /// `(cos θ, sin θ)`; valid for `0 < θ ≤ π/4`.
    pub fn qubit(theta: f64) -> Result<Self> {
        Self::new(vec![theta.cos(), theta.sin()])
    }

    /// Normalises and sorts arbitrary non-negative weights.
    pub fn from_unnormalized(mut raw: Vec<f64>) -> Result<Self> {
        raw.sort_by(|a, b| b.total_cmp(a));
        let norm = raw.iter().map(|l| l * l).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidSpec("all coefficients zero".into()));
        }
        Self::new(raw.into_iter().map(|l| l / norm).collect())
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn squares(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| l * l).collect()
    }

    pub fn d(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / (self.d() as f64).sqrt();
        self.lambdas.iter().all(|l| (l - u).abs() < 1e-15)
    }

    /// Diagonal of `M = √d · diag(λ)`.
    pub fn m_diagonal(&self) -> Vec<f64> {
        let s = (self.d() as f64).sqrt();
        self.lambdas.iter().map(|l| s * l).collect()
    }
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_hermitian(DENSITY_TOL) {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        if (m.trace().re - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace {} != 1", m.trace().re)));
        }
        if !m.is_psd(DENSITY_TOL) {
            return Err(Error::InvalidParameter("density matrix is not positive semidefinite".into()));
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `(1-w)|ψ><ψ| + w·1/D`.
    pub fn depolarized(psi: &StateVector, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("depolarizing weight {w} outside [0,1]")));
        }
        let dim = psi.dim();
        let mut m = ComplexMatrix::projector(psi.amplitudes()).scale(1.0 - w);
        m.add_scaled(&ComplexMatrix::identity(dim), w / dim as f64);
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// `|G_n^d> = (1/√d) Σ_j |j>^{⊗n}`.
pub fn ghz_state(n: usize, d: usize) -> Result<StateVector> {
    ghz_like_state(&GhzLikeSpec::uniform(check_local(d)?), n)
}

/// `|ξ> = Σ_j λ_j |j>^{⊗n}`.
pub fn ghz_like_state(spec: &GhzLikeSpec, n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least two parties, got {n}")));
    }
    let d = spec.d();
    let dim = checked_pow(d, n)?;
    check_dim(dim)?;
    let mut amps = vec![ZERO; dim];
    for (j, &l) in spec.lambdas().iter().enumerate() {
        amps[diagonal_index(j, d, n)] = C64::new(l, 0.0);
    }
    Ok(StateVector { local_dim: d, parties: n, amplitudes: amps })
}

fn check_local(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("local dimension must be at least 2, got {d}")));
    }
    Ok(d)
}

/// `<ψ|σ|ψ>`.
pub fn fidelity(sigma: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if sigma.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), actual: sigma.dim() });
    }
    Ok(sigma.matrix().expectation(psi.amplitudes()).re.clamp(0.0, 1.0))
}

/// Reduced state of any single party of `|ξ>`: `diag(λ_0², …, λ_{d-1}²)`.
pub fn reduced_single_party(spec: &GhzLikeSpec) -> DensityMatrix {
    DensityMatrix(ComplexMatrix::from_real_diag(&spec.squares()))
}

/// Declarative description of a target state, as exchanged in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StateSpec {
    Ghz { n: usize, d: usize },
    GhzLike {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        lambdas: Vec<f64>,
    },
}

impl StateSpec {
    pub fn build(&self) -> Result<StateVector> {
        match self {
            StateSpec::Ghz { n, d } => ghz_state(*n, *d),
            StateSpec::GhzLike { n, d, lambdas } => {
                let spec = GhzLikeSpec::new(lambdas.clone())?;
                if let Some(d) = d {
                    if *d != spec.d() {
                        return Err(Error::DimensionMismatch { expected: *d, actual: spec.d() });
                    }
                }
                ghz_like_state(&spec, *n)
            }
        }
    }
}
