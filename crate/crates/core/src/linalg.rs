//! Dense complex linear algebra.
//!
//! Everything here works on small square matrices (at most a few thousand
//! rows), stored row-major. The Hermitian eigensolver is a cyclic complex
//! Jacobi iteration, which is slow asymptotically but accurate to machine
//! precision on the operator sizes the rest of the crate produces.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest Hilbert-space dimension accepted unless overridden.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Name of the environment variable consulted by [`dim_cap`].
pub const DIM_CAP_ENV: &str = "GHZV_DIM_CAP";

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

static DIM_CAP_OVERRIDE: AtomicUsize = AtomicUsize::new(0);

/// Current dimension cap: an explicit [`set_dim_cap`] wins, then
/// `GHZV_DIM_CAP`, then [`DEFAULT_DIM_CAP`].
pub fn dim_cap() -> usize {
    match DIM_CAP_OVERRIDE.load(Ordering::Relaxed) {
        0 => std::env::var(DIM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_DIM_CAP),
        cap => cap,
    }
}

/// Overrides the dimension cap for the whole process. Passing 0 restores the
/// environment/default behaviour.
pub fn set_dim_cap(cap: usize) {
    DIM_CAP_OVERRIDE.store(cap, Ordering::Relaxed);
}

pub fn check_dim(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(Error::CapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// `base^exp`, failing with `CapExceeded` instead of overflowing.
pub fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc = 1usize;
    for _ in 0..exp {
        // saturates on overflow, which is over any cap anyway
        acc = acc.saturating_mul(base);
    }
    check_dim(acc)?;
    Ok(acc)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim.min(16) {
            for j in 0..self.dim.min(16) {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails on non-square input or
    /// non-finite entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        let m = Self { dim, data };
        if !m.is_finite() {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        Ok(m)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    /// `|v><v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        inner(v, &self.apply(v))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Hilbert-Schmidt inner product `tr(A^dagger B)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `A^2 = A` and `A = A^dagger`, entrywise within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).max_abs_diff(self) <= tol
    }

    /// Smallest eigenvalue at least `-tol`. Non-Hermitian input is never PSD.
    pub fn is_psd(&self, tol: f64) -> bool {
        match hermitian_eig(self) {
            Ok(eig) => eig.min() >= -tol,
            Err(_) => false,
        }
    }

    /// Rank of a Hermitian matrix: eigenvalues with modulus above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(hermitian_eig(self)?.values.iter().filter(|v| v.abs() > tol).count())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Kronecker product `a ⊗ b`; entry `((i*db + k), (j*db + l)) = a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (da, db) = (a.dim, b.dim);
    let dim = da.checked_mul(db).ok_or(Error::CapExceeded { dim: usize::MAX, cap: dim_cap() })?;
    check_dim(dim)?;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty Kronecker product".into()))?
        .clone();
    iter.try_fold(first, |acc, f| kron(&acc, f))
}

/// Tensor product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted
/// descending and column `i` of `vectors` belongs to `values[i]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        (0..self.vectors.dim()).map(|r| self.vectors[(r, i)]).collect()
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// Second entry of the descending spectrum, multiplicities kept.
    pub fn second(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(self.values[0])
    }

    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.dim();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj()).sum()
        })
    }

    /// Groups the sorted spectrum into `(value, multiplicity)` clusters whose
    /// members differ by at most `tol` from the cluster head.
    pub fn grouped(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((head, count)) if (*head - v).abs() <= tol => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Full eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.dim;
    let scale = a.max_abs().max(1.0);
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }

    // Work on the exactly Hermitian part.
    let mut w = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let tol = JACOBI_OFF_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&w);
        if off < tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        // Fix the phase: the largest component becomes real positive.
        let mut pivot = 0;
        let mut best = -1.0;
        for r in 0..n {
            let m = v[(r, k)].norm();
            if m > best + 1e-12 {
                best = m;
                pivot = r;
            }
        }
        let phase = if best > 0.0 { v[(pivot, k)].conj() / best } else { ONE };
        for r in 0..n {
            vectors[(r, col)] = v[(r, k)] * phase;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// One complex Jacobi rotation zeroing `w[p,q]`; accumulates into `v`.
fn rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = w[(p, q)];
    let r = z.norm();
    if r < 1e-300 {
        return;
    }
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    // Too small to move the diagonal in floating point.
    if r < 1e-18 * (app.abs() + aqq.abs()) {
        w[(p, q)] = ZERO;
        w[(q, p)] = ZERO;
        return;
    }
    let phase = z / r; // e^{i phi}
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U restricted to (p,q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = w.dim;
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = wkp * upp + wkq * uqp;
        w[(k, q)] = wkp * upq + wkq * uqq;
    }
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = upp.conj() * wpk + uqp.conj() * wqk;
        w[(q, k)] = upq.conj() * wpk + uqq.conj() * wqk;
    }
    w[(p, q)] = ZERO;
    w[(q, p)] = ZERO;
    w[(p, p)] = C64::new(w[(p, p)].re, 0.0);
    w[(q, q)] = C64::new(w[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// Spectral norm of a Hermitian matrix: the largest |eigenvalue|.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(a)?;
    Ok(eig.max().abs().max(eig.min().abs()))
}

/// `E' <= E` in the PSD order: smallest eigenvalue of `E - E'` at least `-tol`.
pub fn psd_le(smaller: &ComplexMatrix, larger: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(hermitian_eig(&(larger - smaller))?.min() >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_zz_is_diagonal() {
        let zz = kron(&pauli_z(), &pauli_z()).unwrap();
        assert_eq!(zz, ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_identity_gives_blocks() {
        let a = ComplexMatrix::from_fn(2, |i, j| C64::new((i * 2 + j) as f64, 1.0));
        let k = kron(&ComplexMatrix::identity(3), &a).unwrap();
        for blk in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(k[(blk * 2 + i, blk * 2 + j)], a[(i, j)]);
                }
            }
        }
        assert_eq!(k[(0, 2)], ZERO);
        assert_eq!(k[(5, 0)], ZERO);
    }

    #[test]
    fn kron_of_qutrit_shifts_maps_basis_images() {
        let x3 = ComplexMatrix::from_fn(3, |i, j| if i == (j + 1) % 3 { ONE } else { ZERO });
        let xx = kron(&x3, &x3).unwrap();
        // |j,k> -> |j+1, k+1>, enumerated by hand
        let images = [(0, 4), (1, 5), (2, 3), (3, 7), (4, 8), (5, 6), (6, 1), (7, 2), (8, 0)];
        for (src, dst) in images {
            for row in 0..9 {
                let expect = if row == dst { ONE } else { ZERO };
                assert_eq!(xx[(row, src)], expect, "column {src}");
            }
        }
    }

    #[test]
    fn kron_respects_cap() {
        set_dim_cap(0);
        let big = ComplexMatrix::identity(64);
        assert_eq!(kron(&big, &big).unwrap().dim(), 4096);
        let bigger = ComplexMatrix::identity(65);
        assert!(matches!(kron(&big, &bigger), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn eig_of_pauli_x() {
        let eig = hermitian_eig(&pauli_x()).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_of_diagonal_sorts_descending() {
        let eig = hermitian_eig(&ComplexMatrix::from_real_diag(&[0.2, 0.2, 0.9])).unwrap();
        assert_eq!(eig.values, vec![0.9, 0.2, 0.2]);
        assert_eq!(eig.grouped(1e-9), vec![(0.9, 1), (0.2, 2)]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, |i, j| if i < j { ONE } else { ZERO });
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::from_real_diag(&[0.3, -0.8])).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn predicates_on_explicit_matrices() {
        let half = ComplexMatrix::from_fn(2, |_, _| C64::new(0.5, 0.0));
        assert!(half.is_projector(1e-12));
        assert!(half.is_psd(1e-12));
        assert!(!pauli_z().is_psd(1e-12));
        assert!(pauli_z().is_hermitian(0.0));
        let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        assert!(y.is_hermitian(0.0));
        assert!(!y.is_projector(1e-12));
    }

    #[test]
    fn from_rows_rejects_nan() {
        let r = ComplexMatrix::from_rows(&[vec![C64::new(f64::NAN, 0.0)]]);
        assert!(r.is_err());
    }

    fn hermitian_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        (1..=max_dim).prop_flat_map(|n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
                let m = ComplexMatrix::from_fn(n, |i, j| C64::new(raw[i * n + j].0, raw[i * n + j].1));
                (&m + &m.adjoint()).scale(0.5)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eig_reconstructs_random_hermitian(a in hermitian_strategy(64)) {
            let eig = hermitian_eig(&a).unwrap();
            prop_assert!(eig.reconstruct().max_abs_diff(&a) < 1e-10);
            let v = &eig.vectors;
            prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(a.dim())) < 1e-10);
            for w in eig.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            for i in 0..a.dim() {
                let vi = eig.vector(i);
                let av = a.apply(&vi);
                for (x, y) in av.iter().zip(&vi) {
                    prop_assert!((x - y * eig.values[i]).norm() < 1e-10);
                }
            }
            let norm = operator_norm(&a).unwrap();
            let expect = eig.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
            prop_assert_eq!(norm, expect);
        }

        #[test]
        fn kron_trace_is_multiplicative(a in hermitian_strategy(6), b in hermitian_strategy(6)) {
            let k = kron(&a, &b).unwrap();
            prop_assert!((k.trace() - a.trace() * b.trace()).norm() < 1e-10);
        }
    }
}
