//! Randomized algebraic properties of the Fock-space primitives, Stokes
//! operators and channels.

use std::collections::BTreeMap;

use hybrid_witness::channels::{dephase_sectors, photon_loss, white_noise_mix};
use hybrid_witness::fock::{fidelity_to_pure, partial_trace, project_subspace, Ladder, Mixture, Mode, Party};
use hybrid_witness::oracles::{oracle_polarization_sup, sector_product_max};
use hybrid_witness::stokes::{apply_stokes, Axis};
use hybrid_witness::{OccupationQuad, PureState, SectorSet};
use num_complex::Complex64;
use proptest::prelude::*;

const N_MAX: u32 = 3;

fn quad(max: u32) -> impl Strategy<Value = OccupationQuad> {
    [0..=max, 0..=max, 0..=max, 0..=max].prop_map(|[a, b, c, d]| OccupationQuad::new(a, b, c, d))
}

/// Random sparse state with every occupation at most `max`, not normalized.
fn sparse_state(max: u32, n_max: u32) -> impl Strategy<Value = PureState> {
    prop::collection::vec((quad(max), -1.0..1.0f64, -1.0..1.0f64), 1..8).prop_map(move |entries| {
        let amps: BTreeMap<_, _> = entries.into_iter().map(|(q, re, im)| (q, Complex64::new(re, im))).collect();
        PureState::from_amplitudes(n_max, amps).unwrap()
    })
}

fn unit_state(max: u32, n_max: u32) -> impl Strategy<Value = PureState> {
    sparse_state(max, n_max).prop_filter("non-zero", |s| s.norm_sqr() > 1e-6).prop_map(|s| s.normalized().unwrap())
}

fn mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

fn axis() -> impl Strategy<Value = Axis> {
    prop::sample::select(Axis::ALL.to_vec())
}

fn party() -> impl Strategy<Value = Party> {
    prop::sample::select(vec![Party::Alice, Party::Bob])
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn states_close(a: &PureState, b: &PureState, tol: f64) -> bool {
    let diff = a.add_scaled(b, Complex64::new(-1.0, 0.0)).unwrap();
    diff.norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ladder_adjointness(phi in sparse_state(N_MAX - 1, N_MAX), psi in sparse_state(N_MAX - 1, N_MAX), m in mode()) {
        let raised = psi.ladder(m, Ladder::Raise);
        prop_assert_eq!(raised.leakage(), 0.0);
        let lhs = phi.inner_product(&raised).unwrap();
        let rhs = phi.ladder(m, Ladder::Lower).inner_product(&psi).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn canonical_commutator(psi in sparse_state(N_MAX - 1, N_MAX), m in mode()) {
        let lower_raise = psi.ladder(m, Ladder::Raise).ladder(m, Ladder::Lower);
        let raise_lower = psi.ladder(m, Ladder::Lower).ladder(m, Ladder::Raise);
        let commutator = lower_raise.add_scaled(&raise_lower, Complex64::new(-1.0, 0.0)).unwrap();
        prop_assert!(states_close(&commutator, &psi, 1e-12));
    }

    #[test]
    fn partial_trace_invariants(psi in unit_state(N_MAX, N_MAX), keep in party()) {
        let rho = partial_trace(&psi, keep);
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.eigenvalues().iter().all(|&e| e > -1e-10));
    }

    #[test]
    fn projection_accounts_for_all_weight(psi in unit_state(2, 2), sectors in prop::collection::btree_set(0u32..3, 1..3)) {
        let set = SectorSet::from_sectors(sectors.iter().copied());
        let discarded: f64 = psi
            .iter()
            .filter(|(q, _)| !q.sector().is_some_and(|n| set.contains(n)))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        match project_subspace(&psi, &set) {
            Ok((projected, p)) => {
                prop_assert!((p + discarded - 1.0).abs() < 1e-10);
                prop_assert!((projected.norm_sqr() - 1.0).abs() < 1e-12);
            }
            Err(_) => prop_assert!(discarded > 1.0 - 1e-10),
        }
    }

    #[test]
    fn stokes_is_hermitian(phi in sparse_state(N_MAX, N_MAX), psi in sparse_state(N_MAX, N_MAX), ax in axis(), p in party()) {
        // one spare level so that no application leaks
        let phi = phi.with_cutoff(N_MAX + 1).unwrap();
        let psi = psi.with_cutoff(N_MAX + 1).unwrap();
        let lhs = phi.inner_product(&apply_stokes(&psi, ax, p)).unwrap();
        let rhs = apply_stokes(&phi, ax, p).inner_product(&psi).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn stokes_commutes_with_total_number(psi in sparse_state(N_MAX, N_MAX), ax in axis(), p in party()) {
        let psi = psi.with_cutoff(N_MAX + 1).unwrap();
        let after = apply_stokes(&psi, ax, p).apply_number(&Mode::ALL);
        let before = apply_stokes(&psi.apply_number(&Mode::ALL), ax, p);
        prop_assert!(states_close(&after, &before, 1e-12));
    }

    #[test]
    fn loss_composes(psi in unit_state(2, 2), target in unit_state(2, 2), e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64) {
        let twice = photon_loss(&photon_loss(&psi, e1, 0.0).unwrap(), e2, 0.0).unwrap();
        let once = photon_loss(&psi, e1 * e2, 0.0).unwrap();
        let f2 = fidelity_to_pure(&twice, &target).unwrap();
        let f1 = fidelity_to_pure(&once, &target).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-9, "{f1} vs {f2}");
    }

    #[test]
    fn channels_preserve_trace(psi in unit_state(2, 2), eta in 0.0..=1.0f64, v in 0.0..=1.0f64, s in 0.0..=1.0f64) {
        let lossy = photon_loss(&psi, eta, 1e-10).unwrap();
        prop_assert!((lossy.total_weight() + lossy.discarded() - 1.0).abs() < 1e-9);
        let dephased = dephase_sectors(&psi, s).unwrap();
        prop_assert!((dephased.total_weight() + dephased.discarded() - 1.0).abs() < 1e-9);
        let noisy = white_noise_mix(&psi, v, &SectorSet::full()).unwrap();
        prop_assert!((noisy.total_weight() + noisy.discarded() - 1.0).abs() < 1e-9);
        for (_, branch) in noisy.weighted_branches() {
            prop_assert!((branch.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracles_are_deterministic(seed in any::<u64>(), r in 0.1..1.5f64) {
        let a = oracle_polarization_sup(r, &SectorSet::nonvacuum(), 4, 4, seed).unwrap();
        let b = oracle_polarization_sup(r, &SectorSet::nonvacuum(), 4, 4, seed).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let c = sector_product_max(3, 4, seed).unwrap();
        let d = sector_product_max(3, 4, seed).unwrap();
        prop_assert_eq!(format!("{c:?}"), format!("{d:?}"));
    }
}
