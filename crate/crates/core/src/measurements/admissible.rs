//! Brute-force search for admissible Pauli-type tests of GHZ states.
//!
//! Each party either idles or measures one of a fixed menu of local bases.
//! The canonical test for a setting accepts every joint outcome that the
//! target state can produce. A test is admissible when no other candidate
//! with strictly smaller trace sits below it in the operator order.

use crate::error::{Error, Result};
use crate::linalg::{checked_pow, hermitian_eig, kron_all, psd_le, ComplexMatrix, C64};
use crate::measurements::pauli::is_odd_prime;
use crate::measurements::plan::{LocalBasis, PassRule, SamplingPlan, Stage};
use crate::measurements::TestOperator;
use crate::states::digits;

const OVERLAP_TOL: f64 = 1e-12;
const ORDER_TOL: f64 = 1e-10;

/// A local setting per party; `None` means the party does not measure.
pub type Setting = Vec<Option<LocalBasis>>;

#[derive(Clone, Debug)]
pub struct AdmissibleTest {
    pub setting: Setting,
    pub test: TestOperator,
}

impl AdmissibleTest {
    pub fn setting_label(&self) -> String {
        let d = self.test.local_dim();
        self.setting.iter().map(|b| b.as_ref().map_or_else(|| "I".to_string(), |b| b.label(d))).collect::<Vec<_>>().join(" ")
    }
}

/// Local measurement menu: `Z, X, Y` for qubits, `Z, XZ^r` for odd primes.
pub fn local_menu(d: usize) -> Result<Vec<LocalBasis>> {
    if d == 2 {
        Ok(vec![LocalBasis::Standard, LocalBasis::ShiftPhase { r: 0 }, LocalBasis::QubitY])
    } else if is_odd_prime(d) {
        let mut menu = vec![LocalBasis::Standard];
        menu.extend((0..d).map(|r| LocalBasis::ShiftPhase { r }));
        Ok(menu)
    } else {
        Err(Error::InvalidParameter(format!("no Pauli measurement menu for d = {d}")))
    }
}

/// Canonical test for a setting: accept the outcomes the GHZ state can yield.
pub fn canonical_test(setting: &[Option<LocalBasis>], d: usize) -> Result<TestOperator> {
    let n = setting.len();
    let dim = checked_pow(d, n)?;
    let stages: Vec<Stage> = setting
        .iter()
        .enumerate()
        .filter_map(|(party, b)| b.clone().map(|basis| Stage { party, basis }))
        .collect();
    let kets: Vec<Vec<Vec<C64>>> = stages.iter().map(|s| s.basis.kets(d)).collect::<Result<_>>()?;
    let complete = stages.len() == n;
    let identity = ComplexMatrix::identity(d);

    let mut matrix = ComplexMatrix::zeros(dim);
    let mut accepted = Vec::new();
    for b in 0..checked_pow(d, stages.len())? {
        let outs = digits(b, d, stages.len());
        let chosen: Vec<&Vec<C64>> = kets.iter().zip(&outs).map(|(k, &o)| &k[o]).collect();
        // <G| (⊗ |k><k| ⊗ 1) |G>, up to the 1/d normalisation
        let overlap = if complete {
            let amp: C64 = (0..d).map(|a| chosen.iter().map(|k| k[a].conj()).product::<C64>()).sum();
            amp.norm_sqr()
        } else {
            (0..d).map(|a| chosen.iter().map(|k| k[a].norm_sqr()).product::<f64>()).sum()
        };
        if overlap <= OVERLAP_TOL {
            continue;
        }
        let mut it = chosen.iter();
        let factors: Vec<ComplexMatrix> = setting
            .iter()
            .map(|s| match s {
                Some(_) => ComplexMatrix::projector(it.next().expect("one ket per stage")),
                None => identity.clone(),
            })
            .collect();
        matrix += &kron_all(&factors)?;
        accepted.push(outs);
    }
    let label = setting.iter().map(|b| b.as_ref().map_or_else(|| "I".to_string(), |b| b.label(d))).collect::<Vec<_>>().join("");
    let plan = SamplingPlan::new(n, d, stages, None, PassRule::OutcomeSet { accepted })?;
    Ok(TestOperator::new(label, matrix, plan))
}

/// All settings over the local menu, optionally letting parties idle.
pub fn all_settings(n: usize, d: usize, include_incomplete: bool) -> Result<Vec<Setting>> {
    let mut menu: Vec<Option<LocalBasis>> = local_menu(d)?.into_iter().map(Some).collect();
    if include_incomplete {
        menu.insert(0, None);
    }
    let count = checked_pow(menu.len(), n)?;
    Ok((0..count).map(|i| digits(i, menu.len(), n).into_iter().map(|c| menu[c].clone()).collect()).collect())
}

/// Admissible canonical tests, deduplicated by operator, in order of trace.
pub fn enumerate_admissible(n: usize, d: usize, include_incomplete: bool) -> Result<Vec<AdmissibleTest>> {
    let mut candidates: Vec<AdmissibleTest> = Vec::new();
    for setting in all_settings(n, d, include_incomplete)? {
        let test = canonical_test(&setting, d)?;
        if candidates.iter().all(|c| c.test.matrix.max_abs_diff(&test.matrix) > ORDER_TOL) {
            candidates.push(AdmissibleTest { setting, test });
        }
    }
    let traces: Vec<f64> = candidates.iter().map(|c| c.test.matrix.trace().re).collect();
    let mut keep = Vec::new();
    for (i, cand) in candidates.iter().enumerate() {
        let mut dominated = false;
        for (j, other) in candidates.iter().enumerate() {
            if traces[j] < traces[i] - ORDER_TOL && below_diagonal_ok(&other.test.matrix, &cand.test.matrix)
                && psd_le(&other.test.matrix, &cand.test.matrix, ORDER_TOL)? {
                    dominated = true;
                    break;
                }
        }
        if !dominated {
            keep.push(i);
        }
    }
    let mut out: Vec<AdmissibleTest> = keep.into_iter().map(|i| candidates[i].clone()).collect();
    out.sort_by(|a, b| a.test.matrix.trace().re.total_cmp(&b.test.matrix.trace().re));
    Ok(out)
}

/// Qubit search over all settings, idle parties included.
pub fn enumerate_admissible_qubit(n: usize) -> Result<Vec<AdmissibleTest>> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!("qubit admissibility search supports 2 <= n <= 4, got {n}")));
    }
    enumerate_admissible(n, 2, true)
}

/// Cheap necessary condition for `small ≤ large`: diagonal dominance.
fn below_diagonal_ok(small: &ComplexMatrix, large: &ComplexMatrix) -> bool {
    small.diagonal().iter().zip(large.diagonal()).all(|(a, b)| a.re <= b.re + ORDER_TOL)
}

/// Gram matrix `G_ij = tr(E_i E_j)`.
pub fn gram_matrix(tests: &[TestOperator]) -> ComplexMatrix {
    ComplexMatrix::from_fn(tests.len(), |i, j| C64::new(tests[i].matrix.hs_inner(&tests[j].matrix).re, 0.0))
}

/// Smallest eigenvalue of the Gram matrix; positive iff the tests are
/// linearly independent.
pub fn gram_min_eigenvalue(tests: &[TestOperator]) -> Result<f64> {
    Ok(hermitian_eig(&gram_matrix(tests))?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::projectors::{canonical_projector_r, canonical_projector_xy, canonical_projector_z};

    #[test]
    fn menu_sizes() {
        assert_eq!(local_menu(2).unwrap().len(), 3);
        assert_eq!(local_menu(5).unwrap().len(), 6);
        assert!(local_menu(4).is_err());
    }

    #[test]
    fn canonical_matches_named_projectors() {
        let zz = canonical_test(&[Some(LocalBasis::Standard), Some(LocalBasis::Standard)], 2).unwrap();
        assert!(zz.matrix.max_abs_diff(&canonical_projector_z(2, 2).unwrap().matrix) < 1e-14);
        let yy = canonical_test(&[Some(LocalBasis::QubitY), Some(LocalBasis::QubitY)], 2).unwrap();
        assert!(yy.matrix.max_abs_diff(&canonical_projector_xy(&[0, 1], 2).unwrap().matrix) < 1e-14);
        let r = [Some(LocalBasis::ShiftPhase { r: 1 }), Some(LocalBasis::ShiftPhase { r: 2 })];
        let t = canonical_test(&r, 3).unwrap();
        assert!(t.matrix.max_abs_diff(&canonical_projector_r(&[1, 2], 3).unwrap().matrix) < 1e-14);
        assert!(t.plan_deviation().unwrap() < 1e-14);
    }

    #[test]
    fn idle_party_gives_identity_factor() {
        let t = canonical_test(&[Some(LocalBasis::Standard), None, Some(LocalBasis::Standard)], 2).unwrap();
        assert_eq!(t.matrix.trace().re, 4.0);
        assert!(t.plan_deviation().unwrap() < 1e-14);
    }

    #[test]
    fn qubit_two_party_count() {
        let found = enumerate_admissible_qubit(2).unwrap();
        assert_eq!(found.len(), 3);
        assert!(gram_min_eigenvalue(&found.iter().map(|a| a.test.clone()).collect::<Vec<_>>()).unwrap() > 1e-9);
    }
}
