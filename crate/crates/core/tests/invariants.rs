//! Physical identities of the singlet, the separability bounds and the
//! witness, checked over parameter grids.

use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use hybrid_witness::channels::dephase_sectors;
use hybrid_witness::fock::{condition, fidelity_to_pure, Branch, Mode};
use hybrid_witness::oracles::{oracle_polarization_sup, ProductAnsatz};
use hybrid_witness::states::{blind_mixture, mbs_singlet, sector_amplitude, sector_probabilities, sector_singlet};
use hybrid_witness::stokes::total_spin_squared;
use hybrid_witness::witness::{bound_polarization, evaluate_witness};
use hybrid_witness::{PureState, SectorSet, SqueezingParams, StateEnsemble};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mbs(r: f64, n_max: u32) -> PureState {
    mbs_singlet(SqueezingParams::real(r).unwrap(), n_max).unwrap()
}

fn complete_sectors(n_max: u32) -> SectorSet {
    SectorSet::from_sectors(0..=n_max)
}

#[test]
fn singlet_decomposes_into_sector_singlets() {
    let n_max = 8;
    for r in [0.2, 0.7, 1.3] {
        let mut sum = PureState::zero(n_max);
        for n in 0..=n_max {
            let term = sector_singlet(n, n_max).unwrap();
            sum = sum.add_scaled(&term, Complex64::new(sector_amplitude(r, n), 0.0)).unwrap();
        }
        let restricted = mbs(r, n_max).restrict_to(&complete_sectors(n_max));
        let diff = restricted.add_scaled(&sum, Complex64::new(-1.0, 0.0)).unwrap();
        assert!(diff.norm() < 1e-12, "r = {r}: {}", diff.norm());
    }
}

#[test]
fn mean_photons_are_symmetric() {
    for r in [0.3, 0.9, 1.4] {
        let s = mbs(r, 10);
        let first = s.mean_photons(Mode::AH);
        for m in Mode::ALL {
            assert_abs_diff_eq!(s.mean_photons(m), first, epsilon = 1e-10);
        }
    }
}

#[test]
fn sector_probabilities_are_singlet_overlaps() {
    let n_max = 12;
    for r in [0.4, 1.0] {
        let state = mbs(r, n_max);
        let weights = sector_probabilities(SqueezingParams::real(r).unwrap(), &SectorSet::full(), false).unwrap();
        for n in 0..=n_max {
            let overlap = sector_singlet(n, n_max).unwrap().inner_product(&state).unwrap().norm_sqr();
            assert_abs_diff_eq!(weights.weights[&n], overlap, epsilon = 1e-12);
        }
    }
}

#[test]
fn total_spin_vanishes_on_complete_sectors() {
    for r in [0.3, 0.5, 1.0] {
        let s = mbs(r, 10).restrict_to(&complete_sectors(10));
        assert!(total_spin_squared(&s).unwrap() < 1e-10);
    }
    // partial sectors beyond the cutoff carry a small residue
    for r in [0.2, 0.35, 0.5] {
        let s2 = total_spin_squared(&mbs(r, 10).normalized().unwrap()).unwrap();
        assert!(s2 < 1e-6, "r = {r}: S² = {s2}");
    }
}

#[test]
fn polarization_bound_strictly_decreases() {
    let nonvacuum = SectorSet::nonvacuum();
    let mut previous = bound_polarization(1e-3, &nonvacuum).unwrap();
    for i in 2..=3000 {
        let r = f64::from(i) * 1e-3;
        let current = bound_polarization(r, &nonvacuum).unwrap();
        assert!(current < previous, "not decreasing at r = {r}");
        previous = current;
    }
}

fn random_weights(rng: &mut ChaCha8Rng, count: u32) -> BTreeMap<u32, f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().enumerate().map(|(n, w)| (n as u32, w / total)).collect()
}

fn mix(a: &StateEnsemble, b: &StateEnsemble, lambda: f64) -> StateEnsemble {
    let scaled = |e: &StateEnsemble, f: f64| -> Vec<Branch> {
        e.branches().iter().map(|br| Branch { weight: br.weight * f, state: br.state.clone() }).collect()
    };
    let mut branches = scaled(a, lambda);
    branches.extend(scaled(b, 1.0 - lambda));
    StateEnsemble::new(branches, 0.0).unwrap()
}

#[test]
fn separable_constructions_are_never_detected() {
    let n_max = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let nonvacuum = SectorSet::nonvacuum();
    for trial in 0..20 {
        let r = 0.2 + 1.3 * rng.random::<f64>();
        let blind = blind_mixture(&random_weights(&mut rng, n_max + 1), n_max).unwrap();
        let sectors: Vec<u32> = (0..=n_max).collect();
        let product = ProductAnsatz::random(&sectors, &mut rng).to_state(n_max).unwrap();
        let optimal = ProductAnsatz::optimal(r, &sectors).to_state(n_max).unwrap().normalized().unwrap();
        let product_mix = mix(&product.into(), &optimal.clone().into(), 0.5);
        let combined = mix(&blind, &product_mix, rng.random());
        for (label, state) in [("blind", &blind), ("product", &product_mix), ("combined", &combined)] {
            let value = evaluate_witness(state, r, &nonvacuum).unwrap().witness_value;
            assert!(value >= -1e-9, "trial {trial} {label}: {value}");
        }
        let value = evaluate_witness(&optimal, r, &nonvacuum).unwrap().witness_value;
        assert!(value >= -1e-9, "trial {trial} optimal: {value}");
    }
}

#[test]
fn nested_conditioning_composes() {
    let state = mbs(0.8, 10);
    let outer = SectorSet::nonvacuum();
    let inner: SectorSet = "2-4".parse().unwrap();
    let (first, p1) = condition(&state, &outer).unwrap();
    let (second, p2) = condition(&first, &inner).unwrap();
    let (direct, p) = condition(&state, &inner).unwrap();
    assert_abs_diff_eq!(p1 * p2, p, epsilon = 1e-10);
    let target = direct.branches()[0].state.clone();
    assert_abs_diff_eq!(fidelity_to_pure(&second, &target).unwrap(), 1.0, epsilon = 1e-10);
    let a = evaluate_witness(&first, 0.8, &inner).unwrap();
    let b = evaluate_witness(&state, 0.8, &inner).unwrap();
    assert_abs_diff_eq!(a.fidelity, b.fidelity, epsilon = 1e-10);
}

#[test]
fn reference_squeezing_is_best_at_the_true_value() {
    let nonvacuum = SectorSet::nonvacuum();
    for r in [0.5, 0.8] {
        let state = mbs(r, 12);
        let best = (10..=150)
            .map(|i| f64::from(i) * 0.01)
            .map(|rp| (rp, evaluate_witness(&state, rp, &nonvacuum).unwrap().fidelity))
            .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert_abs_diff_eq!(best.0, r, epsilon = 1e-9);
    }
}

#[test]
fn dephased_singlet_is_number_separable() {
    for r in [0.3, 0.6, 1.0, 1.4] {
        let dephased = dephase_sectors(&mbs(r, 10).normalized().unwrap(), 1.0).unwrap();
        let value = evaluate_witness(&dephased, r, &SectorSet::nonvacuum()).unwrap().witness_value;
        assert!(value >= -1e-9, "r = {r}: {value}");
    }
}

#[test]
fn polarization_oracle_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let r = 0.1 + 1.9 * rng.random::<f64>();
        let result = oracle_polarization_sup(r, &SectorSet::nonvacuum(), 6, 4, 9).unwrap();
        assert!(result.achieved <= bound_polarization(r, &SectorSet::nonvacuum()).unwrap() + 1e-9);
        assert!(result.is_sound());
    }
}
