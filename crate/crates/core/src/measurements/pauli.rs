//! Local operators: qudit Pauli shift/phase, the diagonal `W`, and the
//! weighted 2-design bases built from them.

use std::f64::consts::PI;

use crate::linalg::{kron, ComplexMatrix, C64, I, ONE, ZERO};

pub fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

pub fn is_odd_prime(d: usize) -> bool {
    d > 2 && is_prime(d)
}

/// `⌈3(d-1)²/4⌉`, the smallest number of non-standard bases for which the
/// design construction is a 2-design.
pub fn min_bases(d: usize) -> usize {
    (3 * (d - 1) * (d - 1)).div_ceil(4)
}

fn omega(d: usize, k: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k.rem_euclid(d as i64) as f64 / d as f64)
}

/// Shift `X|j> = |j+1>` and phase `Z|j> = ω^j |j>`, `ω = e^{2πi/d}`.
pub fn pauli_ops(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    assert!(d >= 2, "local dimension must be at least 2");
    let x = ComplexMatrix::from_fn(d, |i, j| if i == (j + 1) % d { ONE } else { ZERO });
    let z = ComplexMatrix::from_diag(&(0..d as i64).map(|j| omega(d, j)).collect::<Vec<_>>());
    (x, z)
}

/// Qubit `Y = iXZ`.
pub fn qubit_y() -> ComplexMatrix {
    let (x, z) = pauli_ops(2);
    (&x * &z).scale_c(I)
}

/// `X Z^r`.
pub fn xz_power(d: usize, r: usize) -> ComplexMatrix {
    let (x, z) = pauli_ops(d);
    &x * &z.pow(r)
}

/// `W = diag(μ^0, μ^1, …, μ^{d-2}, μ^{-(d-1)(d-2)/2})`, `μ = e^{2πi/m}`.
pub fn w_operator(d: usize, m: usize) -> ComplexMatrix {
    let mut diag: Vec<C64> = (0..d as i64 - 1).map(|j| omega(m, j)).collect();
    let last = -((d as i64 - 1) * (d as i64 - 2) / 2);
    diag.push(omega(m, last));
    ComplexMatrix::from_diag(&diag)
}

/// `X W^h`.
pub fn xw_power(d: usize, m: usize, h: usize) -> ComplexMatrix {
    let (x, _) = pauli_ops(d);
    &x * &w_operator(d, m).pow(h % m)
}

/// Kets `|ψ_{ht}> = d^{-1/2} Σ_j exp(2πi[tj/d + h·C(j,2)/m]) |j>`, indexed by `t`.
pub fn design_kets(d: usize, m: usize, h: usize) -> Vec<Vec<C64>> {
    let norm = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|t| {
            (0..d)
                .map(|j| {
                    let binom = (j * j.saturating_sub(1) / 2) as f64;
                    let theta = 2.0 * PI * ((t * j) as f64 / d as f64 + (h as f64 * binom) / m as f64);
                    C64::from_polar(norm, theta)
                })
                .collect()
        })
        .collect()
}

/// Weighted set `{B_h, w_h}_{h=0..m}`: the standard basis with weight
/// `1/(d+1)` and `m` design bases with weight `d/[m(d+1)]` each.
#[derive(Clone, Debug)]
pub struct DesignBasisSet {
    pub d: usize,
    pub m: usize,
    /// `bases[0]` is the standard basis, `bases[h]` for `h ≥ 1` is `B_h`.
    pub bases: Vec<Vec<Vec<C64>>>,
}

impl DesignBasisSet {
    pub fn w0(&self) -> f64 {
        1.0 / (self.d as f64 + 1.0)
    }

    pub fn wh(&self) -> f64 {
        self.d as f64 / (self.m as f64 * (self.d as f64 + 1.0))
    }

    pub fn weight(&self, h: usize) -> f64 {
        if h == 0 {
            self.w0()
        } else {
            self.wh()
        }
    }

    /// Whether `m` reaches the threshold guaranteeing the 2-design property.
    pub fn meets_design_threshold(&self) -> bool {
        self.m >= min_bases(self.d)
    }

    /// Largest deviation between the normalised second moment
    /// `(1/d) Σ_{h,t} w_h (|ψ_{ht}><ψ_{ht}|)^{⊗2}` and the Haar value
    /// `2Π_sym/[d(d+1)]`.
    pub fn two_design_deviation(&self) -> f64 {
        let d = self.d;
        let mut moment = ComplexMatrix::zeros(d * d);
        for (h, basis) in self.bases.iter().enumerate() {
            for ket in basis {
                let p = ComplexMatrix::projector(ket);
                let pp = kron(&p, &p).expect("d^2 is small");
                moment.add_scaled(&pp, self.weight(h) / d as f64);
            }
        }
        let swap = ComplexMatrix::from_fn(d * d, |r, c| {
            let (a, b) = (r / d, r % d);
            if c == b * d + a {
                ONE
            } else {
                ZERO
            }
        });
        let sym = (&ComplexMatrix::identity(d * d) + &swap).scale(1.0 / (d * (d + 1)) as f64);
        moment.max_abs_diff(&sym)
    }
}

/// Builds the weighted basis set for `d ≥ 3`. Any `m ≥ 1` is accepted; check
/// [`DesignBasisSet::meets_design_threshold`] before relying on the 2-design
/// property.
pub fn design_basis(d: usize, m: usize) -> DesignBasisSet {
    assert!(d >= 3 && m >= 1, "design bases need d >= 3 and m >= 1");
    let mut bases = vec![crate::measurements::plan::LocalBasis::Standard.kets(d).expect("standard basis")];
    bases.extend((1..=m).map(|h| design_kets(d, m, h)));
    DesignBasisSet { d, m, bases }
}

/// `g(j,l,d) = (ĵ-j)(ĵ+j-1)/2` with `ĵ = j + l` reduced into `[0, d)`.
pub fn g_value(j: usize, l: usize, d: usize) -> i64 {
    let (j, l, d) = (j as i64, l as i64, d as i64);
    let jh = if j + l < d { j + l } else { j + l - d };
    (jh - j) * (jh + j - 1) / 2
}

/// Whether `j ↦ g(j,l,d) mod m` is injective on `{0, …, d-1}`.
pub fn gm_injectivity(d: usize, m: usize, l: usize) -> bool {
    let mut seen = vec![false; m];
    (0..d).all(|j| {
        let v = g_value(j, l, d).rem_euclid(m as i64) as usize;
        !std::mem::replace(&mut seen[v], true)
    })
}

/// Solutions `j ∈ Z_d` of `l(l-1)/2 + jl - s ≡ 0 (mod d)`; the residue
/// equation behind the Pauli-sum identity.
pub fn pauli_residue_solutions(d: usize, l: usize, s: usize) -> Vec<usize> {
    let (di, li, si) = (d as i64, l as i64, s as i64);
    (0..d)
        .filter(|&j| (li * (li - 1) / 2 + j as i64 * li - si).rem_euclid(di) == 0)
        .collect()
}

/// Whether every `s` has exactly one solution for this `l`.
pub fn pauli_residue_is_bijective(d: usize, l: usize) -> bool {
    (0..d).all(|s| pauli_residue_solutions(d, l, s).len() == 1)
}
