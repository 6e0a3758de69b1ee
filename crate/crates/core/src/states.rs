//! Constructors for the macroscopic singlet and the states built around it.
//!
//! The macroscopic singlet at squeezing `r` (phase 0) is
//!
//! ```text
//! |Ψ⁻⟩ = Σ_{n,m} (−1)^m tanh(r)^{n+m} / cosh²(r) |n, m, m, n⟩
//!      = Σ_N tanh(r)^N √(N+1) / cosh²(r) |ψ_N⟩
//! ```
//!
//! with `|ψ_N⟩` the singlet of two spin-N/2 systems in the sector of `N`
//! local photons. Sector probabilities are `p_N = (N+1) x^N (1−x)²` with
//! `x = tanh²(r)` and `1 − x = 1/cosh²(r)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Branch, Mode, OccupationQuad, Party, PureState, StateEnsemble, EMPTY_WEIGHT};
use crate::sectors::SectorSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingParams {
    pub r: f64,
    pub theta: f64,
}

impl SqueezingParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing r = {r} must be finite and ≥ 0")));
        }
        if !(0.0..std::f64::consts::TAU).contains(&theta) {
            return Err(Error::InvalidParameter(format!("squeezing phase {theta} outside [0, 2π)")));
        }
        Ok(Self { r, theta })
    }

    pub fn real(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn parity(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Analytic sector distribution of the macroscopic singlet restricted to a sector set.
///
/// Weights are kept relative to the smallest member `k` of the set,
/// `q_N = (N+1) x^(N−k)`, so that renormalized quantities stay finite in the
/// `r → 0` limit where every non-vacuum weight vanishes.
#[derive(Debug, Clone)]
pub(crate) struct SectorDistribution {
    pub x: f64,
    pub one_minus_x: f64,
    pub min_sector: u32,
    /// `Σ_{N ∈ set} q_N`.
    pub normalizer: f64,
    sectors: SectorSet,
}

impl SectorDistribution {
    pub fn new(r: f64, sectors: &SectorSet) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing r = {r} must be finite and ≥ 0")));
        }
        let min_sector = sectors.min().ok_or_else(|| Error::EmptySubspace(sectors.to_string()))?;
        let t = r.tanh();
        let c = r.cosh();
        let mut dist =
            Self { x: t * t, one_minus_x: 1.0 / (c * c), min_sector, normalizer: 0.0, sectors: sectors.clone() };
        let mut z: f64 = sectors.finite_members().map(|n| dist.relative(n)).sum();
        if let Some(j) = sectors.open_from() {
            z += dist.relative_tail(j);
        }
        dist.normalizer = z;
        Ok(dist)
    }

    fn rel_pow(&self, n: u32) -> f64 {
        self.x.powi((n - self.min_sector) as i32)
    }

    /// `q_N = (N+1) x^(N−k)`.
    pub fn relative(&self, n: u32) -> f64 {
        (n + 1) as f64 * self.rel_pow(n)
    }

    /// `Σ_{N ≥ j} q_N = x^(j−k) (1 + j(1−x)) / (1−x)²`.
    fn relative_tail(&self, j: u32) -> f64 {
        self.rel_pow(j) * (1.0 + j as f64 * self.one_minus_x) / (self.one_minus_x * self.one_minus_x)
    }

    /// `Σ_{N ≥ j} q_N/(N+1) = x^(j−k) / (1−x)`.
    fn relative_tail_over_dim(&self, j: u32) -> f64 {
        self.rel_pow(j) / self.one_minus_x
    }

    /// Renormalized probability `p̃_N`; zero outside the set.
    pub fn renormalized(&self, n: u32) -> f64 {
        if self.sectors.contains(n) {
            self.relative(n) / self.normalizer
        } else {
            0.0
        }
    }

    /// Absolute weight of the set, `Σ_{N ∈ set} p_N`.
    pub fn absolute_weight(&self) -> f64 {
        self.one_minus_x * self.one_minus_x * self.x.powi(self.min_sector as i32) * self.normalizer
    }

    /// `Σ_{N ∈ set} p̃_N / (N+1)`.
    pub fn renormalized_over_dim(&self) -> f64 {
        let mut acc: f64 = self.sectors.finite_members().map(|n| self.rel_pow(n)).sum();
        if let Some(j) = self.sectors.open_from() {
            acc += self.relative_tail_over_dim(j);
        }
        acc / self.normalizer
    }

    /// Sector maximizing `p̃_N` (smallest one on ties).
    pub fn argmax(&self) -> u32 {
        let mut candidates: Vec<u32> = self.sectors.finite_members().collect();
        if let Some(j) = self.sectors.open_from() {
            // (N+1) x^N increases while N ≤ (2x − 1)/(1 − x)
            let turn = (2.0 * self.x - 1.0) / self.one_minus_x;
            let peak = if turn >= 0.0 { (turn.floor() as u64 + 1).min(u32::MAX as u64 - 2) as u32 } else { 0 };
            candidates.push(j);
            for n in [peak.saturating_sub(1), peak, peak + 1] {
                if n >= j {
                    candidates.push(n);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut best = candidates[0];
        for &n in &candidates[1..] {
            if self.relative(n) > self.relative(best) {
                best = n;
            }
        }
        best
    }
}

/// `p_N = (N+1) tanh(r)^{2N} / cosh⁴(r)`.
pub fn sector_probability(r: f64, n: u32) -> f64 {
    let t = r.tanh();
    let c = r.cosh();
    (n + 1) as f64 * (t * t).powi(n as i32) / (c * c * c * c)
}

/// Expansion coefficient `f_N = tanh(r)^N √(N+1) / cosh²(r)` of the singlet on `|ψ_N⟩`.
pub fn sector_amplitude(r: f64, n: u32) -> f64 {
    let c = r.cosh();
    r.tanh().powi(n as i32) * ((n + 1) as f64).sqrt() / (c * c)
}

/// Macroscopic singlet with every `|n, m, m, n⟩`, `n, m ≤ n_max`; the rest of
/// the infinite expansion is recorded as leakage.
pub fn mbs_singlet(params: SqueezingParams, n_max: u32) -> Result<PureState> {
    if params.theta != 0.0 {
        return Err(Error::InvalidParameter("only θ = 0 is supported for the macroscopic singlet".into()));
    }
    let t = params.r.tanh();
    let c = params.r.cosh();
    let mut amplitudes = BTreeMap::new();
    for n in 0..=n_max {
        for m in 0..=n_max {
            let amp = parity(m) * t.powi((n + m) as i32) / (c * c);
            if amp != 0.0 {
                amplitudes.insert(OccupationQuad::new(n, m, m, n), real(amp));
            }
        }
    }
    // per-mode geometric tail y = x^(n_max+1): kept weight is (1 − y)²
    let y = (t * t).powi(n_max as i32 + 1);
    Ok(PureState::from_parts(n_max, amplitudes, 2.0 * y - y * y))
}

/// `|ψ_N⟩ = (N+1)^(−1/2) Σ_n (−1)^(N−n) |n, N−n, N−n, n⟩`.
pub fn sector_singlet(sector: u32, n_max: u32) -> Result<PureState> {
    if sector > n_max {
        return Err(Error::SectorTooLarge { sector, n_max });
    }
    let norm = 1.0 / ((sector + 1) as f64).sqrt();
    PureState::from_amplitudes(
        n_max,
        (0..=sector).map(|n| (OccupationQuad::new(n, sector - n, sector - n, n), real(parity(sector - n) * norm))),
    )
}

/// Two-mode squeezed vacuum `Σ_n sign^n tanh(r)^n / cosh(r) |n⟩|n⟩` on one
/// Alice mode and one Bob mode, vacuum elsewhere.
pub fn tmsv(params: SqueezingParams, modes: (Mode, Mode), sign: Sign, n_max: u32) -> Result<PureState> {
    let (alice, bob) = match (modes.0.party(), modes.1.party()) {
        (Party::Alice, Party::Bob) => (modes.0, modes.1),
        (Party::Bob, Party::Alice) => (modes.1, modes.0),
        _ => return Err(Error::InvalidParameter("TMSV modes must span Alice and Bob".into())),
    };
    let t = params.r.tanh();
    let c = params.r.cosh();
    let amplitudes = (0..=n_max).filter_map(|n| {
        let amp = sign.value().powi(n as i32) * t.powi(n as i32) / c;
        (amp != 0.0).then(|| (OccupationQuad::VACUUM.with(alice, n).with(bob, n), real(amp)))
    });
    let amplitudes = amplitudes.collect();
    Ok(PureState::from_parts(n_max, amplitudes, (t * t).powi(n_max as i32 + 1)))
}

/// Sector probabilities of the singlet over a sector set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorWeights {
    pub r: f64,
    pub subspace: SectorSet,
    pub renormalized: bool,
    pub weights: BTreeMap<u32, f64>,
    /// Analytic weight of members beyond the last enumerated sector.
    pub tail: f64,
}

impl SectorWeights {
    pub fn total(&self) -> f64 {
        self.weights.values().sum::<f64>() + self.tail
    }
}

/// `p_N` (or `p̃_N` when `renormalize`) for every member of `subspace`; open
/// sets are enumerated until the remaining tail drops below 1e-17.
pub fn sector_probabilities(params: SqueezingParams, subspace: &SectorSet, renormalize: bool) -> Result<SectorWeights> {
    let dist = SectorDistribution::new(params.r, subspace)?;
    let absolute = dist.absolute_weight();
    if !(absolute > 0.0) {
        return Err(Error::EmptySubspace(subspace.to_string()));
    }
    let scale = if renormalize { 1.0 } else { absolute };
    let mut weights = BTreeMap::new();
    for n in subspace.finite_members() {
        weights.insert(n, dist.renormalized(n) * scale);
    }
    let mut tail = 0.0;
    if let Some(j) = subspace.open_from() {
        let mut remaining = dist.relative_tail(j) / dist.normalizer * scale;
        let mut n = j;
        while remaining > 1e-17 && n < j + 100_000 {
            let w = dist.renormalized(n) * scale;
            weights.insert(n, w);
            n += 1;
            remaining = dist.relative_tail(n) / dist.normalizer * scale;
        }
        tail = remaining;
    }
    Ok(SectorWeights { r: params.r, subspace: subspace.clone(), renormalized: renormalize, weights, tail })
}

/// Classical mixture `Σ_N w_N |ψ_N⟩⟨ψ_N|` of sector singlets.
pub fn blind_mixture(weights: &BTreeMap<u32, f64>, n_max: u32) -> Result<StateEnsemble> {
    let total: f64 = weights.values().sum();
    if weights.values().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "mixture weights must be non-negative and sum to 1 (got {total})"
        )));
    }
    let branches = weights
        .iter()
        .filter(|(_, w)| **w > 0.0)
        .map(|(&n, &w)| Ok(Branch { weight: w, state: sector_singlet(n, n_max)? }))
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::new(branches, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExemplarKind {
    /// `α|2002⟩ + β|0110⟩`
    CrossLayer,
    /// `α|2001⟩ + β|0120⟩`
    BeamSplitter,
}

pub fn exemplar_state(kind: ExemplarKind, alpha: Complex64, beta: Complex64, n_max: u32) -> Result<PureState> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let (first, second) = match kind {
        ExemplarKind::CrossLayer => (OccupationQuad::new(2, 0, 0, 2), OccupationQuad::new(0, 1, 1, 0)),
        ExemplarKind::BeamSplitter => (OccupationQuad::new(2, 0, 0, 1), OccupationQuad::new(0, 1, 2, 0)),
    };
    PureState::from_amplitudes(n_max, [(first, alpha), (second, beta)])
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Output amplitudes for `p` photons in input port 1 and `q` in port 2 of one
/// polarization, as `((n_A, n_B), amplitude)`.
fn splitter_terms(p: u32, q: u32, t: f64) -> Vec<((u32, u32), f64)> {
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    let mut terms: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let input_norm = (factorial(p) * factorial(q)).sqrt();
    for i in 0..=p {
        // a₁† → √t a_A† + √(1−t) a_B†
        let from_one = binomial(p, i) * st.powi(i as i32) * sr.powi((p - i) as i32);
        for j in 0..=q {
            // a₂† → √(1−t) a_A† − √t a_B†
            let from_two = binomial(q, j) * sr.powi(j as i32) * (-st).powi((q - j) as i32);
            let (na, nb) = (i + j, p - i + q - j);
            let amp = from_one * from_two * (factorial(na) * factorial(nb)).sqrt() / input_norm;
            *terms.entry((na, nb)).or_insert(0.0) += amp;
        }
    }
    terms.into_iter().collect()
}

/// Mixes Alice's port (input 1) with Bob's port (input 2) on a beam splitter
/// of transmissivity `t`, polarization by polarization:
/// `a_A ← √t a₁ + √(1−t) a₂`, `a_B ← √(1−t) a₁ − √t a₂`.
pub fn beam_splitter_interfere(input: &PureState, transmissivity: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::InvalidParameter(format!("transmissivity {transmissivity} outside [0, 1]")));
    }
    let n_max = input.n_max();
    let mut out: BTreeMap<OccupationQuad, Complex64> = BTreeMap::new();
    let mut leaked = 0.0;
    for (quad, amp) in input.iter() {
        let h_terms = splitter_terms(quad.a_h, quad.b_h, transmissivity);
        let v_terms = splitter_terms(quad.a_v, quad.b_v, transmissivity);
        for &((ah, bh), ch) in &h_terms {
            for &((av, bv), cv) in &v_terms {
                let image = amp * (ch * cv);
                let target = OccupationQuad::new(ah, av, bh, bv);
                if target.within(n_max) {
                    *out.entry(target).or_insert(Complex64::new(0.0, 0.0)) += image;
                } else {
                    leaked += image.norm_sqr();
                }
            }
        }
    }
    Ok(PureState::from_parts(n_max, out, input.leakage() + leaked))
}

/// Keeps only the listed components and renormalizes.
pub fn postselect_pair(state: &PureState, kept: &[OccupationQuad]) -> Result<(PureState, f64)> {
    let projected = state.restrict_to_quads(kept);
    let probability = projected.norm_sqr();
    if probability < EMPTY_WEIGHT {
        return Err(Error::EmptySubspace(format!("{} post-selected components", kept.len())));
    }
    Ok((projected.normalized()?, probability))
}

/// Squeezing reproducing a per-mode TMSV mean photon number: `r = asinh(√n̄)`.
pub fn estimate_squeezing(mean_photons_per_mode: f64) -> Result<f64> {
    if !(mean_photons_per_mode >= 0.0 && mean_photons_per_mode.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean photon number {mean_photons_per_mode} must be ≥ 0")));
    }
    Ok(mean_photons_per_mode.sqrt().asinh())
}
