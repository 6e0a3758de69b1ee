//! Fidelity witness `W = F·1 − |Ψ⁻⟩⟨Ψ⁻|` for hybrid number-polarization
//! entanglement.
//!
//! `F` is the larger of two separability thresholds for the macroscopic
//! singlet conditioned on a sector set:
//!
//! * number-separable (block-diagonal) states reach at most `max_N p̃_N`;
//! * polarization-separable (per-sector product) states reach at most
//!   `Σ_N p̃_N / (N+1)`.
//!
//! A state with fidelity above `F` has `⟨W⟩ < 0` and is certified. The test
//! is only sufficient, so the other outcome is "inconclusive".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{condition, fidelity_to_pure, Mixture, PureState};
use crate::sectors::SectorSet;
use crate::states::{mbs_singlet, SectorDistribution, SqueezingParams};

/// Upper end of the crossover scan.
pub const CROSSOVER_SCAN_MAX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HybridEntangled,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub r: f64,
    pub subspace: SectorSet,
    pub fidelity: f64,
    pub bound_number: f64,
    pub bound_polarization: f64,
    pub threshold: f64,
    pub witness_value: f64,
    pub conditioning_probability: f64,
    pub tail_weight: f64,
    pub verdict: Verdict,
}

/// Supremum of the singlet fidelity over number-separable states, `max_N p̃_N`.
pub fn bound_number(r: f64, subspace: &SectorSet) -> Result<f64> {
    let dist = SectorDistribution::new(r, subspace)?;
    Ok(dist.renormalized(dist.argmax()))
}

/// The sector whose singlet sets [`bound_number`].
pub fn dominant_number_sector(r: f64, subspace: &SectorSet) -> Result<u32> {
    Ok(SectorDistribution::new(r, subspace)?.argmax())
}

/// Supremum over polarization-separable states, `Σ_N p̃_N / (N+1)`.
///
/// Closed forms: `1/cosh²(r)` on the full space and `2/(cosh(2r) + 3)` on
/// `N ≥ 1`.
pub fn bound_polarization(r: f64, subspace: &SectorSet) -> Result<f64> {
    Ok(SectorDistribution::new(r, subspace)?.renormalized_over_dim())
}

pub fn threshold(r: f64, subspace: &SectorSet) -> Result<f64> {
    Ok(bound_number(r, subspace)?.max(bound_polarization(r, subspace)?))
}

/// The singlet reference conditioned on `subspace`.
#[derive(Debug, Clone)]
pub struct Reference {
    /// Truncated amplitudes, normalized by the analytic subspace weight so
    /// that overlaps equal overlaps with the untruncated conditioned singlet.
    pub state: PureState,
    /// Conditioned weight beyond the cutoff.
    pub tail_weight: f64,
}

pub fn conditioned_reference(r: f64, subspace: &SectorSet, n_max: u32) -> Result<Reference> {
    let dist = SectorDistribution::new(r, subspace)?;
    let weight = dist.absolute_weight();
    if !(weight > 0.0) {
        return Err(Error::EmptySubspace(subspace.to_string()));
    }
    let restricted = mbs_singlet(SqueezingParams::real(r)?, n_max)?.restrict_to(subspace);
    let kept = restricted.norm_sqr() / weight;
    let state = restricted.scaled(num_complex::Complex64::new(1.0 / weight.sqrt(), 0.0));
    Ok(Reference { state, tail_weight: (1.0 - kept).max(0.0) })
}

/// Conditions `state` and the reference on `subspace` and compares the
/// fidelity with the separability threshold.
pub fn evaluate_witness<M: Mixture + ?Sized>(state: &M, r: f64, subspace: &SectorSet) -> Result<WitnessReport> {
    let (conditioned, probability) = condition(state, subspace)?;
    let reference = conditioned_reference(r, subspace, state.n_max())?;
    let fidelity = fidelity_to_pure(&conditioned, &reference.state)?;
    let bound_number = bound_number(r, subspace)?;
    let bound_polarization = bound_polarization(r, subspace)?;
    let threshold = bound_number.max(bound_polarization);
    let witness_value = threshold - fidelity;
    Ok(WitnessReport {
        r,
        subspace: subspace.clone(),
        fidelity,
        bound_number,
        bound_polarization,
        threshold,
        witness_value,
        conditioning_probability: probability,
        tail_weight: reference.tail_weight,
        verdict: if witness_value < 0.0 { Verdict::HybridEntangled } else { Verdict::Inconclusive },
    })
}

/// Squeezing at which the sector setting [`bound_number`] first changes.
pub fn crossover_squeezing(subspace: &SectorSet) -> Result<f64> {
    if subspace.len().is_some_and(|n| n < 2) {
        return Err(Error::NoCrossover { max_r: CROSSOVER_SCAN_MAX });
    }
    const STEPS: u32 = 3000;
    let mut lo = 0.0;
    let mut current = dominant_number_sector(lo, subspace)?;
    for i in 1..=STEPS {
        let hi = CROSSOVER_SCAN_MAX * f64::from(i) / f64::from(STEPS);
        let next = dominant_number_sector(hi, subspace)?;
        if next != current {
            return Ok(bisect_tie(subspace, current, next, lo, hi));
        }
        lo = hi;
        current = next;
    }
    Err(Error::NoCrossover { max_r: CROSSOVER_SCAN_MAX })
}

/// Root of `p̃_a(r) − p̃_b(r)` in `[lo, hi]`, to 1e-10 (or machine precision).
fn bisect_tie(subspace: &SectorSet, a: u32, b: u32, mut lo: f64, mut hi: f64) -> f64 {
    let gap = |r: f64| {
        let dist = SectorDistribution::new(r, subspace).expect("validated subspace");
        dist.relative(a) - dist.relative(b)
    };
    let lo_sign = gap(lo) >= 0.0;
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (gap(mid) >= 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Mode;
    use crate::states::{blind_mixture, sector_probability, sector_singlet, tmsv, Sign};
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    /// Brute-force renormalized sector probabilities by direct summation to N = 400.
    fn brute_renormalized(r: f64, subspace: &SectorSet) -> Vec<(u32, f64)> {
        let members = subspace.members_up_to(400);
        let z: f64 = members.iter().map(|&n| sector_probability(r, n)).sum();
        members.iter().map(|&n| (n, sector_probability(r, n) / z)).collect()
    }

    #[test]
    fn bounds_match_brute_force() {
        for &r in &[0.1, 0.5, 0.9, 1.3, 2.0] {
            for spec in ["full", "nonvacuum", "1-4,6", "2,5-"] {
                let s: SectorSet = spec.parse().unwrap();
                let probs = brute_renormalized(r, &s);
                let num = probs.iter().map(|p| p.1).fold(0.0, f64::max);
                let pol: f64 = probs.iter().map(|&(n, p)| p / (n + 1) as f64).sum();
                assert_abs_diff_eq!(bound_number(r, &s).unwrap(), num, epsilon = 1e-12);
                assert_abs_diff_eq!(bound_polarization(r, &s).unwrap(), pol, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_limits() {
        assert_eq!(bound_number(0.0, &SectorSet::full()).unwrap(), 1.0);
        assert_eq!(bound_polarization(0.0, &SectorSet::full()).unwrap(), 1.0);
        // r → 0 limit on N ≥ 1: all weight on N = 1
        assert_eq!(bound_number(0.0, &SectorSet::nonvacuum()).unwrap(), 1.0);
        assert_eq!(bound_polarization(0.0, &SectorSet::nonvacuum()).unwrap(), 0.5);
    }

    #[test]
    fn empty_subspace_is_error() {
        let empty = SectorSet::from_sectors([]);
        assert!(bound_number(0.5, &empty).is_err());
        assert!(bound_polarization(0.5, &empty).is_err());
    }

    #[test]
    fn closed_forms() {
        let r: f64 = 0.5;
        assert_abs_diff_eq!(
            bound_polarization(r, &SectorSet::full()).unwrap(),
            1.0 / r.cosh().powi(2),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            bound_polarization(r, &SectorSet::nonvacuum()).unwrap(),
            2.0 / ((2.0 * r).cosh() + 3.0),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(bound_polarization(r, &SectorSet::nonvacuum()).unwrap(), 0.44023, epsilon = 1e-5);
        assert_abs_diff_eq!(bound_number(r, &SectorSet::nonvacuum()).unwrap(), 0.69243, epsilon = 1e-5);
    }

    #[test]
    fn crossover_one_to_two() {
        let r = crossover_squeezing(&SectorSet::nonvacuum()).unwrap();
        // 2x = 3x² with x = tanh²(r)
        assert_abs_diff_eq!(r, (2.0f64 / 3.0).sqrt().atanh(), epsilon = 1e-9);
        assert!(crossover_squeezing(&SectorSet::from_sectors([1])).is_err());
    }

    #[test]
    fn polarization_dominates_at_high_squeezing() {
        let nv = SectorSet::nonvacuum();
        let pol = bound_polarization(1.5, &nv).unwrap();
        let num = bound_number(1.5, &nv).unwrap();
        assert_abs_diff_eq!(pol, 0.1531, epsilon = 1e-4);
        assert_abs_diff_eq!(num, 0.0761, epsilon = 1e-4);
    }

    #[test]
    fn singlet_is_detected() {
        let s = mbs_singlet(SqueezingParams::real(0.5).unwrap(), 10).unwrap();
        let report = evaluate_witness(&s, 0.5, &SectorSet::nonvacuum()).unwrap();
        assert_abs_diff_eq!(report.fidelity, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(report.threshold, 0.69243, epsilon = 1e-5);
        assert_abs_diff_eq!(report.witness_value, -0.3076, epsilon = 1e-3);
        assert_eq!(report.verdict, Verdict::HybridEntangled);
        assert_eq!(report.threshold, report.bound_number.max(report.bound_polarization));
    }

    #[test]
    fn tmsv_product_saturates_polarization_bound() {
        let r = 0.6;
        let p = SqueezingParams::real(r).unwrap();
        let s = tmsv(p, (Mode::AH, Mode::BV), Sign::Plus, 24).unwrap().normalized().unwrap();
        let report = evaluate_witness(&s, r, &SectorSet::full()).unwrap();
        assert_abs_diff_eq!(report.fidelity, report.bound_polarization, epsilon = 1e-9);
        assert!(report.witness_value >= -1e-9);
    }

    #[test]
    fn blind_mixture_is_not_detected() {
        let w = BTreeMap::from([(1, 0.5), (2, 0.3), (3, 0.2)]);
        let mix = blind_mixture(&w, 6).unwrap();
        let report = evaluate_witness(&mix, 0.5, &SectorSet::nonvacuum()).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        let expected: f64 =
            w.iter().map(|(&n, &wn)| wn * sector_probability(0.5, n)).sum::<f64>() / (1.0 - sector_probability(0.5, 0));
        assert_abs_diff_eq!(report.fidelity, expected, epsilon = 1e-12);
    }

    #[test]
    fn zero_weight_state_is_error() {
        let s = sector_singlet(2, 3).unwrap();
        assert!(matches!(evaluate_witness(&s, 0.5, &SectorSet::from_sectors([1])), Err(Error::EmptySubspace(_))));
    }
}
