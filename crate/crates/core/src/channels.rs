//! Noise models: photon loss, white-noise admixture, cross-sector dephasing,
//! and the noise level at which the witness stops certifying.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{condition, Branch, Mixture, Mode, OccupationQuad, PureState, StateEnsemble, EMPTY_WEIGHT};
use crate::sectors::SectorSet;
use crate::states::{mbs_singlet, SqueezingParams};
use crate::witness::{evaluate_witness, WitnessReport};

/// Branches lighter than this are dropped into `discarded`.
pub const DEFAULT_BRANCH_PRUNE: f64 = 1e-10;
/// Grid points checked for monotonicity before bisecting.
pub const SCAN_POINTS: u32 = 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Per-mode transmissivity in mode order `(A_H, A_V, B_H, B_V)`.
    pub loss_eta: [f64; 4],
    pub visibility: f64,
    pub dephase_strength: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { loss_eta: [1.0; 4], visibility: 1.0, dephase_strength: 0.0 }
    }
}

fn unit_interval(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!("{name} = {value} outside [0, 1]")));
    }
    Ok(())
}

impl NoiseSpec {
    pub fn uniform_loss(eta: f64) -> Self {
        Self { loss_eta: [eta; 4], ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for eta in self.loss_eta {
            unit_interval("loss_eta", eta)?;
        }
        unit_interval("visibility", self.visibility)?;
        unit_interval("dephase_strength", self.dephase_strength)
    }

    /// Loss, then dephasing, then white noise on `subspace`.
    pub fn apply<M: Mixture + ?Sized>(&self, state: &M, subspace: &SectorSet) -> Result<StateEnsemble> {
        self.validate()?;
        let lossy = photon_loss_per_mode(state, self.loss_eta, DEFAULT_BRANCH_PRUNE)?;
        let dephased = dephase_sectors(&lossy, self.dephase_strength)?;
        white_noise_mix(&dephased, self.visibility, subspace)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Branch `k` of single-mode loss: `|n⟩ → √C(n,k) η^((n−k)/2) (1−η)^(k/2) |n−k⟩`.
fn loss_branch(state: &PureState, mode: Mode, eta: f64, lost: u32) -> PureState {
    let (keep, drop) = (eta.sqrt(), (1.0 - eta).sqrt());
    let mut out = BTreeMap::new();
    for (q, a) in state.iter() {
        let n = q.get(mode);
        if n < lost {
            continue;
        }
        let factor = binomial(n, lost).sqrt() * keep.powi((n - lost) as i32) * drop.powi(lost as i32);
        if factor != 0.0 {
            *out.entry(q.with(mode, n - lost)).or_insert(Complex64::new(0.0, 0.0)) += a * factor;
        }
    }
    PureState::from_parts(state.n_max(), out, 0.0)
}

fn normalized_branches<M: Mixture + ?Sized>(state: &M) -> Result<Vec<(f64, PureState)>> {
    state.weighted_branches().into_iter().map(|(w, s)| Ok((w, s.normalized()?))).collect()
}

fn total_discarded<M: Mixture + ?Sized>(state: &M) -> f64 {
    1.0 - state.weighted_branches().iter().map(|(w, _)| w).sum::<f64>()
}

/// Independent loss on every mode with transmissivity `eta`.
pub fn photon_loss<M: Mixture + ?Sized>(state: &M, eta: f64, prune: f64) -> Result<StateEnsemble> {
    photon_loss_per_mode(state, [eta; 4], prune)
}

pub fn photon_loss_per_mode<M: Mixture + ?Sized>(state: &M, eta: [f64; 4], prune: f64) -> Result<StateEnsemble> {
    for e in eta {
        unit_interval("loss eta", e)?;
    }
    let mut branches = normalized_branches(state)?;
    let mut discarded = total_discarded(state).max(0.0);
    for (mode, &e) in Mode::ALL.iter().zip(&eta) {
        if e == 1.0 {
            continue;
        }
        let mut next = Vec::with_capacity(branches.len());
        for (w, s) in &branches {
            let max_n = s.iter().map(|(q, _)| q.get(*mode)).max().unwrap_or(0);
            for lost in 0..=max_n {
                let image = loss_branch(s, *mode, e, lost);
                let p = w * image.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                if p < prune {
                    discarded += p;
                } else {
                    next.push((p, image.normalized()?));
                }
            }
        }
        branches = next;
    }
    Ok(StateEnsemble::new_unchecked(
        branches.into_iter().map(|(weight, state)| Branch { weight, state }).collect(),
        discarded,
    ))
}

/// Basis states `|n, m, m, n⟩` of the complete sectors `N = n + m ≤ n_max` in `subspace`.
pub fn correlated_support(subspace: &SectorSet, n_max: u32) -> Vec<OccupationQuad> {
    subspace
        .members_up_to(n_max)
        .into_iter()
        .flat_map(|big_n| (0..=big_n).map(move |n| OccupationQuad::new(n, big_n - n, big_n - n, n)))
        .collect()
}

/// `v ρ + (1 − v) 𝟙/D` with the identity taken on [`correlated_support`].
pub fn white_noise_mix<M: Mixture + ?Sized>(state: &M, visibility: f64, subspace: &SectorSet) -> Result<StateEnsemble> {
    unit_interval("visibility", visibility)?;
    let n_max = state.n_max();
    let support = correlated_support(subspace, n_max);
    if support.is_empty() {
        return Err(Error::EmptySubspace(subspace.to_string()));
    }
    let mut branches = Vec::new();
    let mut discarded = 0.0;
    if visibility > 0.0 {
        discarded = visibility * total_discarded(state).max(0.0);
        for (w, s) in normalized_branches(state)? {
            branches.push(Branch { weight: visibility * w, state: s });
        }
    }
    if visibility < 1.0 {
        let w = (1.0 - visibility) / support.len() as f64;
        for q in support {
            branches.push(Branch { weight: w, state: PureState::basis(q, n_max)? });
        }
    }
    Ok(StateEnsemble::new_unchecked(branches, discarded))
}

/// `(1 − s) ρ + s Σ_B P_B ρ P_B` over blocks `B` of fixed local photon
/// numbers `(N_A, N_B)`; at `s = 1` every cross-sector coherence is gone.
pub fn dephase_sectors<M: Mixture + ?Sized>(state: &M, strength: f64) -> Result<StateEnsemble> {
    unit_interval("dephase strength", strength)?;
    let mut branches = Vec::new();
    let mut discarded = total_discarded(state).max(0.0);
    for (w, s) in normalized_branches(state)? {
        if strength < 1.0 {
            branches.push(Branch { weight: w * (1.0 - strength), state: s.clone() });
        }
        if strength > 0.0 {
            for block in s.local_number_blocks().into_values() {
                let p = block.norm_sqr();
                // too small to renormalize: book it as pruned
                if p < EMPTY_WEIGHT {
                    discarded += w * strength * p;
                } else {
                    branches.push(Branch { weight: w * strength * p, state: block.normalized()? });
                }
            }
        }
    }
    Ok(StateEnsemble::new_unchecked(branches, discarded))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseParameter {
    /// Uniform per-mode transmissivity; clean at 1.
    Loss,
    /// White-noise visibility; clean at 1.
    Visibility,
}

impl std::str::FromStr for NoiseParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loss" => Ok(Self::Loss),
            "visibility" => Ok(Self::Visibility),
            _ => Err(Error::InvalidParameter(format!("unknown noise parameter {s:?}"))),
        }
    }
}

/// Singlet at squeezing `r` after noise of strength `value`.
///
/// Loss acts on the whole state and conditioning happens afterwards. White
/// noise is admixed to the singlet already conditioned on `subspace`, so the
/// fidelity stays affine in the visibility.
pub fn noisy_singlet(
    parameter: NoiseParameter,
    value: f64,
    r: f64,
    subspace: &SectorSet,
    n_max: u32,
) -> Result<StateEnsemble> {
    let clean = mbs_singlet(SqueezingParams::real(r)?, n_max)?.normalized()?;
    match parameter {
        NoiseParameter::Loss => photon_loss(&clean, value, DEFAULT_BRANCH_PRUNE),
        NoiseParameter::Visibility => white_noise_mix(&condition(&clean, subspace)?.0, value, subspace),
    }
}

/// Witness report for the noisy singlet; the same `r` is used for the reference.
pub fn noisy_report(
    parameter: NoiseParameter,
    value: f64,
    r: f64,
    subspace: &SectorSet,
    n_max: u32,
) -> Result<WitnessReport> {
    evaluate_witness(&noisy_singlet(parameter, value, r, subspace, n_max)?, r, subspace)
}

/// Noise level where the witness value of the noisy singlet crosses zero.
///
/// Fidelity is first checked to be non-increasing on a grid from the clean
/// end (1) to the noisy end (0); the crossing is then bisected to `tolerance`.
pub fn robustness_threshold(
    parameter: NoiseParameter,
    r: f64,
    subspace: &SectorSet,
    n_max: u32,
    tolerance: f64,
) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter("bisection tolerance must be positive".into()));
    }
    let eval = |p: f64| -> Result<Option<WitnessReport>> {
        match noisy_report(parameter, p, r, subspace, n_max) {
            Ok(report) => Ok(Some(report)),
            // nothing left in the subspace: nothing to certify
            Err(Error::EmptySubspace(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let violated = |report: &Option<WitnessReport>| report.as_ref().is_some_and(|r| r.witness_value < 0.0);

    let clean = eval(1.0)?;
    if !violated(&clean) {
        return Err(Error::NoSignChange);
    }
    let mut previous = clean.as_ref().map(|r| r.fidelity);
    let mut bracket = None;
    for i in (0..SCAN_POINTS - 1).rev() {
        let p = f64::from(i) / f64::from(SCAN_POINTS - 1);
        let report = eval(p)?;
        let fidelity = report.as_ref().map(|r| r.fidelity);
        if let (Some(prev), Some(cur)) = (previous, fidelity) {
            if cur > prev + 1e-12 {
                return Err(Error::NonMonotone { at: p });
            }
        }
        previous = fidelity;
        if bracket.is_none() && !violated(&report) {
            bracket = Some((p, p + 1.0 / f64::from(SCAN_POINTS - 1)));
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoSignChange)?;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if violated(&eval(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
