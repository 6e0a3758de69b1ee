//! Sparse four-mode Fock-space algebra.
//!
//! States are maps from [`OccupationQuad`] to complex amplitudes with a
//! per-mode cutoff `n_max`. Operators that would push a mode past the cutoff
//! drop the affected amplitudes and add their squared modulus to the state's
//! `leakage` instead of failing. Mixed states are kept as ensembles of pure
//! branches.
//!
//! Mode order is `(A_H, A_V, B_H, B_V)`; Alice holds the first two modes and
//! Bob the last two.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sectors::SectorSet;

pub const DEFAULT_N_MAX: u32 = 10;
/// Amplitudes with modulus below this are dropped into `leakage`.
pub const DEFAULT_PRUNE: f64 = 1e-15;
/// Projection weight below which a subspace counts as empty.
pub const EMPTY_WEIGHT: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    AH,
    AV,
    BH,
    BV,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::AH, Mode::AV, Mode::BH, Mode::BV];

    fn index(self) -> usize {
        self as usize
    }

    pub fn party(self) -> Party {
        match self {
            Mode::AH | Mode::AV => Party::Alice,
            Mode::BH | Mode::BV => Party::Bob,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AH" => Ok(Mode::AH),
            "AV" => Ok(Mode::AV),
            "BH" => Ok(Mode::BH),
            "BV" => Ok(Mode::BV),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn modes(self) -> (Mode, Mode) {
        match self {
            Party::Alice => (Mode::AH, Mode::AV),
            Party::Bob => (Mode::BH, Mode::BV),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Four-mode Fock basis label `|n_AH, n_AV, n_BH, n_BV⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OccupationQuad {
    pub a_h: u32,
    pub a_v: u32,
    pub b_h: u32,
    pub b_v: u32,
}

impl OccupationQuad {
    pub const VACUUM: OccupationQuad = OccupationQuad { a_h: 0, a_v: 0, b_h: 0, b_v: 0 };

    pub const fn new(a_h: u32, a_v: u32, b_h: u32, b_v: u32) -> Self {
        Self { a_h, a_v, b_h, b_v }
    }

    pub fn get(&self, mode: Mode) -> u32 {
        self.counts()[mode.index()]
    }

    pub fn with(mut self, mode: Mode, count: u32) -> Self {
        match mode {
            Mode::AH => self.a_h = count,
            Mode::AV => self.a_v = count,
            Mode::BH => self.b_h = count,
            Mode::BV => self.b_v = count,
        }
        self
    }

    pub fn counts(&self) -> [u32; 4] {
        [self.a_h, self.a_v, self.b_h, self.b_v]
    }

    pub fn alice_total(&self) -> u32 {
        self.a_h + self.a_v
    }

    pub fn bob_total(&self) -> u32 {
        self.b_h + self.b_v
    }

    pub fn total(&self) -> u32 {
        self.alice_total() + self.bob_total()
    }

    /// Local pair `(n_H, n_V)` held by `party`.
    pub fn local(&self, party: Party) -> (u32, u32) {
        match party {
            Party::Alice => (self.a_h, self.a_v),
            Party::Bob => (self.b_h, self.b_v),
        }
    }

    /// The common local photon number when both parties hold the same number.
    pub fn sector(&self) -> Option<u32> {
        (self.alice_total() == self.bob_total()).then(|| self.alice_total())
    }

    pub fn within(&self, n_max: u32) -> bool {
        self.counts().iter().all(|&n| n <= n_max)
    }
}

impl fmt::Display for OccupationQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{},{}⟩", self.a_h, self.a_v, self.b_h, self.b_v)
    }
}

/// Sparse pure state over the truncated four-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: BTreeMap<OccupationQuad, Complex64>,
    n_max: u32,
    leakage: f64,
}

impl PureState {
    /// The zero vector.
    pub fn zero(n_max: u32) -> Self {
        Self { amplitudes: BTreeMap::new(), n_max, leakage: 0.0 }
    }

    pub fn vacuum(n_max: u32) -> Self {
        Self::basis(OccupationQuad::VACUUM, n_max).expect("vacuum is always within cutoff")
    }

    pub fn basis(quad: OccupationQuad, n_max: u32) -> Result<Self> {
        Self::from_amplitudes(n_max, [(quad, Complex64::new(1.0, 0.0))])
    }

    pub fn from_amplitudes<I>(n_max: u32, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationQuad, Complex64)>,
    {
        let mut state = Self::zero(n_max);
        for (quad, amp) in amplitudes {
            if !quad.within(n_max) {
                return Err(Error::OutOfCutoff { quad: quad.to_string(), n_max });
            }
            *state.amplitudes.entry(quad).or_insert(ZERO) += amp;
        }
        state.prune(DEFAULT_PRUNE);
        Ok(state)
    }

    pub(crate) fn from_parts(n_max: u32, amplitudes: BTreeMap<OccupationQuad, Complex64>, leakage: f64) -> Self {
        let mut state = Self { amplitudes, n_max, leakage };
        state.prune(DEFAULT_PRUNE);
        state
    }

    /// Drops amplitudes with modulus below `threshold`, moving their weight into leakage.
    pub fn prune(&mut self, threshold: f64) {
        let mut dropped = 0.0;
        self.amplitudes.retain(|_, a| {
            let keep = a.norm() >= threshold;
            if !keep {
                dropped += a.norm_sqr();
            }
            keep
        });
        self.leakage += dropped;
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn amplitude(&self, quad: &OccupationQuad) -> Complex64 {
        self.amplitudes.get(quad).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationQuad, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescaled to unit norm; leakage scales with the amplitudes.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm * norm < EMPTY_WEIGHT {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let amplitudes = self.amplitudes.iter().map(|(q, a)| (*q, a * factor)).collect();
        Self::from_parts(self.n_max, amplitudes, self.leakage * factor.norm_sqr())
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &PureState, factor: Complex64) -> Result<Self> {
        check_cutoff(self.n_max, other.n_max)?;
        let mut amplitudes = self.amplitudes.clone();
        for (q, a) in &other.amplitudes {
            *amplitudes.entry(*q).or_insert(ZERO) += factor * a;
        }
        Ok(Self::from_parts(self.n_max, amplitudes, self.leakage + other.leakage * factor.norm_sqr()))
    }

    /// Same amplitudes under a different cutoff. Shrinking fails if support would be lost.
    pub fn with_cutoff(&self, n_max: u32) -> Result<Self> {
        if let Some(q) = self.amplitudes.keys().find(|q| !q.within(n_max)) {
            return Err(Error::OutOfCutoff { quad: q.to_string(), n_max });
        }
        Ok(Self { amplitudes: self.amplitudes.clone(), n_max, leakage: self.leakage })
    }

    /// Applies `a†` (raise) or `a` (lower) on `mode`.
    pub fn ladder(&self, mode: Mode, direction: Ladder) -> Self {
        let mut out = BTreeMap::new();
        let mut leaked = 0.0;
        for (quad, amp) in &self.amplitudes {
            let n = quad.get(mode);
            match direction {
                Ladder::Raise => {
                    let image = amp * ((n + 1) as f64).sqrt();
                    if n + 1 > self.n_max {
                        leaked += image.norm_sqr();
                    } else {
                        *out.entry(quad.with(mode, n + 1)).or_insert(ZERO) += image;
                    }
                }
                Ladder::Lower => {
                    if n > 0 {
                        *out.entry(quad.with(mode, n - 1)).or_insert(ZERO) += amp * (n as f64).sqrt();
                    }
                }
            }
        }
        Self::from_parts(self.n_max, out, self.leakage + leaked)
    }

    /// Multiplies every amplitude by the photon count summed over `modes`.
    pub fn apply_number(&self, modes: &[Mode]) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(q, a)| (*q, a * modes.iter().map(|&m| q.get(m) as f64).sum::<f64>()))
            .collect();
        Self::from_parts(self.n_max, amplitudes, self.leakage)
    }

    pub fn mean_photons(&self, mode: Mode) -> f64 {
        self.amplitudes.iter().map(|(q, a)| q.get(mode) as f64 * a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        check_cutoff(self.n_max, other.n_max)?;
        let (small, large, conj_small) =
            if self.len() <= other.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = ZERO;
        for (q, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(q) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Product with a state living on disjoint modes.
    pub fn tensor_disjoint(&self, other: &PureState) -> Result<Self> {
        check_cutoff(self.n_max, other.n_max)?;
        let occupied = |s: &PureState| -> [bool; 4] {
            let mut used = [false; 4];
            for q in s.amplitudes.keys() {
                for (u, n) in used.iter_mut().zip(q.counts()) {
                    *u |= n > 0;
                }
            }
            used
        };
        let (lhs, rhs) = (occupied(self), occupied(other));
        if lhs.iter().zip(rhs).any(|(a, b)| *a && b) {
            return Err(Error::InvalidParameter("tensor factors share an occupied mode".into()));
        }
        let mut out = BTreeMap::new();
        for (p, a) in &self.amplitudes {
            for (q, b) in &other.amplitudes {
                let c = [p.a_h + q.a_h, p.a_v + q.a_v, p.b_h + q.b_h, p.b_v + q.b_v];
                *out.entry(OccupationQuad::new(c[0], c[1], c[2], c[3])).or_insert(ZERO) += a * b;
            }
        }
        let leakage = self.leakage * other.norm_sqr() + other.leakage * self.norm_sqr() + self.leakage * other.leakage;
        Ok(Self::from_parts(self.n_max, out, leakage))
    }

    /// Keeps only components with `n_A = n_B = N` for some `N` in `sectors` (unnormalized).
    pub fn restrict_to(&self, sectors: &SectorSet) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .filter(|(q, _)| q.sector().is_some_and(|n| sectors.contains(n)))
            .map(|(q, a)| (*q, *a))
            .collect();
        Self { amplitudes, n_max: self.n_max, leakage: 0.0 }
    }

    /// Keeps only the listed basis components (unnormalized).
    pub fn restrict_to_quads(&self, kept: &[OccupationQuad]) -> Self {
        let amplitudes = kept.iter().filter_map(|q| self.amplitudes.get(q).map(|a| (*q, *a))).collect();
        Self { amplitudes, n_max: self.n_max, leakage: 0.0 }
    }

    /// Splits the state into blocks of fixed local photon numbers `(N_A, N_B)`.
    pub fn local_number_blocks(&self) -> BTreeMap<(u32, u32), PureState> {
        let mut blocks: BTreeMap<(u32, u32), PureState> = BTreeMap::new();
        for (q, a) in &self.amplitudes {
            blocks
                .entry((q.alice_total(), q.bob_total()))
                .or_insert_with(|| PureState::zero(self.n_max))
                .amplitudes
                .insert(*q, *a);
        }
        blocks
    }
}

fn check_cutoff(lhs: u32, rhs: u32) -> Result<()> {
    if lhs != rhs {
        return Err(Error::CutoffMismatch { lhs, rhs });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PureStateWire {
    n_max: u32,
    leakage: f64,
    amplitudes: Vec<(u32, u32, u32, u32, f64, f64)>,
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PureStateWire {
            n_max: self.n_max,
            leakage: self.leakage,
            amplitudes: self.amplitudes.iter().map(|(q, a)| (q.a_h, q.a_v, q.b_h, q.b_v, a.re, a.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = PureStateWire::deserialize(deserializer)?;
        if !(wire.leakage >= 0.0) {
            return Err(D::Error::custom("leakage must be non-negative"));
        }
        let mut amplitudes = BTreeMap::new();
        for (ah, av, bh, bv, re, im) in wire.amplitudes {
            let quad = OccupationQuad::new(ah, av, bh, bv);
            if !quad.within(wire.n_max) {
                return Err(D::Error::custom(format!("{quad} exceeds n_max = {}", wire.n_max)));
            }
            if amplitudes.insert(quad, Complex64::new(re, im)).is_some() {
                return Err(D::Error::custom(format!("duplicate record for {quad}")));
            }
        }
        Ok(PureState::from_parts(wire.n_max, amplitudes, wire.leakage))
    }
}

/// One weighted branch of a [`StateEnsemble`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub weight: f64,
    pub state: PureState,
}

/// Mixed state `Σ w_i |ψ_i⟩⟨ψ_i|` stored as unit-norm branches.
///
/// `discarded` is the weight of branches removed by pruning, so that
/// `Σ w_i + discarded = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleWire")]
pub struct StateEnsemble {
    branches: Vec<Branch>,
    #[serde(default)]
    discarded: f64,
}

#[derive(Deserialize)]
struct EnsembleWire {
    branches: Vec<Branch>,
    #[serde(default)]
    discarded: f64,
}

impl TryFrom<EnsembleWire> for StateEnsemble {
    type Error = Error;

    fn try_from(wire: EnsembleWire) -> Result<Self> {
        Self::new(wire.branches, wire.discarded)
    }
}

impl StateEnsemble {
    pub fn new(branches: Vec<Branch>, discarded: f64) -> Result<Self> {
        let ensemble = Self { branches, discarded };
        ensemble.validate()?;
        Ok(ensemble)
    }

    pub(crate) fn new_unchecked(branches: Vec<Branch>, discarded: f64) -> Self {
        Self { branches, discarded }
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.branches.first() else {
            return Err(Error::InvalidParameter("ensemble has no branches".into()));
        };
        let mut total = self.discarded;
        for branch in &self.branches {
            if !(branch.weight > 0.0 && branch.weight <= 1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!("branch weight {} outside (0, 1]", branch.weight)));
            }
            check_cutoff(first.state.n_max, branch.state.n_max)?;
            let norm = branch.state.norm_sqr();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized(norm));
            }
            total += branch.weight;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("ensemble weights sum to {total}")));
        }
        Ok(())
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn discarded(&self) -> f64 {
        self.discarded
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.weight).sum()
    }
}

impl From<PureState> for StateEnsemble {
    fn from(state: PureState) -> Self {
        Self { branches: vec![Branch { weight: 1.0, state }], discarded: 0.0 }
    }
}

/// Anything that can be read as a weighted list of pure branches.
pub trait Mixture {
    fn n_max(&self) -> u32;
    fn weighted_branches(&self) -> Vec<(f64, &PureState)>;
}

impl Mixture for PureState {
    fn n_max(&self) -> u32 {
        self.n_max
    }

    fn weighted_branches(&self) -> Vec<(f64, &PureState)> {
        vec![(1.0, self)]
    }
}

impl Mixture for StateEnsemble {
    fn n_max(&self) -> u32 {
        self.branches.first().map_or(0, |b| b.state.n_max)
    }

    fn weighted_branches(&self) -> Vec<(f64, &PureState)> {
        self.branches.iter().map(|b| (b.weight, &b.state)).collect()
    }
}

/// Either a pure state or an ensemble, as read from a state file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyState {
    Pure(PureState),
    Mixed(StateEnsemble),
}

impl Mixture for AnyState {
    fn n_max(&self) -> u32 {
        match self {
            AnyState::Pure(s) => s.n_max(),
            AnyState::Mixed(e) => Mixture::n_max(e),
        }
    }

    fn weighted_branches(&self) -> Vec<(f64, &PureState)> {
        match self {
            AnyState::Pure(s) => s.weighted_branches(),
            AnyState::Mixed(e) => e.weighted_branches(),
        }
    }
}

/// Reduced state of one party over its two polarization modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    /// Local occupation pairs `(n_H, n_V)`, ascending.
    pub basis: Vec<(u32, u32)>,
    pub entries: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let diff = &self.entries - self.entries.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Sub-block on the local photon number `n`.
    pub fn sector_block(&self, n: u32) -> ReducedDensityMatrix {
        let idx: Vec<usize> = (0..self.basis.len()).filter(|&i| self.basis[i].0 + self.basis[i].1 == n).collect();
        let entries = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])]);
        ReducedDensityMatrix { basis: idx.iter().map(|&i| self.basis[i]).collect(), entries }
    }
}

pub fn inner_product(lhs: &PureState, rhs: &PureState) -> Result<Complex64> {
    lhs.inner_product(rhs)
}

/// Traces out the party not in `keep`.
pub fn partial_trace<M: Mixture + ?Sized>(state: &M, keep: Party) -> ReducedDensityMatrix {
    let traced = match keep {
        Party::Alice => Party::Bob,
        Party::Bob => Party::Alice,
    };
    let branches = state.weighted_branches();
    let mut basis: Vec<(u32, u32)> =
        branches.iter().flat_map(|(_, s)| s.amplitudes.keys().map(|q| q.local(keep))).collect();
    basis.sort_unstable();
    basis.dedup();
    let index: BTreeMap<(u32, u32), usize> = basis.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut entries = DMatrix::from_element(basis.len(), basis.len(), ZERO);
    for (weight, branch) in branches {
        let mut by_traced: BTreeMap<(u32, u32), Vec<(usize, Complex64)>> = BTreeMap::new();
        for (q, a) in &branch.amplitudes {
            by_traced.entry(q.local(traced)).or_default().push((index[&q.local(keep)], *a));
        }
        for column in by_traced.values() {
            for &(i, a) in column {
                for &(j, b) in column {
                    entries[(i, j)] += a * b.conj() * weight;
                }
            }
        }
    }
    ReducedDensityMatrix { basis, entries }
}

/// Projects onto sectors with `n_A = n_B = N ∈ sectors`, returning the renormalized
/// state and the projection probability.
pub fn project_subspace(state: &PureState, sectors: &SectorSet) -> Result<(PureState, f64)> {
    let projected = state.restrict_to(sectors);
    let probability = projected.norm_sqr();
    if probability < EMPTY_WEIGHT {
        return Err(Error::EmptySubspace(sectors.to_string()));
    }
    Ok((projected.normalized()?, probability))
}

/// Conditions every branch of a mixture on `sectors`; returns the renormalized
/// ensemble and the total conditioning probability.
pub fn condition<M: Mixture + ?Sized>(state: &M, sectors: &SectorSet) -> Result<(StateEnsemble, f64)> {
    let mut branches = Vec::new();
    let mut probability = 0.0;
    for (weight, branch) in state.weighted_branches() {
        let projected = branch.restrict_to(sectors);
        let p = projected.norm_sqr();
        if p < EMPTY_WEIGHT {
            continue;
        }
        probability += weight * p;
        branches.push(Branch { weight: weight * p, state: projected.normalized()? });
    }
    if probability < EMPTY_WEIGHT {
        return Err(Error::EmptySubspace(sectors.to_string()));
    }
    for b in &mut branches {
        b.weight /= probability;
    }
    Ok((StateEnsemble::new_unchecked(branches, 0.0), probability))
}

/// `Tr(ρ |target⟩⟨target|)`.
pub fn fidelity_to_pure<M: Mixture + ?Sized>(state: &M, target: &PureState) -> Result<f64> {
    check_cutoff(state.n_max(), target.n_max)?;
    state.weighted_branches().into_iter().map(|(w, s)| Ok(w * target.inner_product(s)?.norm_sqr())).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn raise_vacuum() {
        let s = PureState::vacuum(3).ladder(Mode::AH, Ladder::Raise);
        assert_eq!(s.amplitude(&OccupationQuad::new(1, 0, 0, 0)), c(1.0));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn lower_to_vacuum_then_zero() {
        let s = PureState::basis(OccupationQuad::new(1, 0, 0, 0), 3).unwrap();
        let v = s.ladder(Mode::AH, Ladder::Lower);
        assert_eq!(v.amplitude(&OccupationQuad::VACUUM), c(1.0));
        assert!(v.ladder(Mode::AH, Ladder::Lower).is_empty());
    }

    #[test]
    fn raise_after_lower_is_number_operator() {
        let q = OccupationQuad::new(2, 1, 0, 3);
        let s = PureState::basis(q, 4).unwrap();
        let n = s.ladder(Mode::AH, Ladder::Lower).ladder(Mode::AH, Ladder::Raise);
        assert_abs_diff_eq!(n.amplitude(&q).re, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn raise_past_cutoff_leaks() {
        let s = PureState::basis(OccupationQuad::new(0, 0, 2, 0), 2).unwrap();
        let r = s.ladder(Mode::BH, Ladder::Raise);
        assert!(r.is_empty());
        assert_abs_diff_eq!(r.leakage(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn cutoff_mismatch_is_error() {
        let a = PureState::vacuum(2);
        let b = PureState::vacuum(3);
        assert!(matches!(a.inner_product(&b), Err(Error::CutoffMismatch { .. })));
        assert!(fidelity_to_pure(&a, &b).is_err());
    }

    #[test]
    fn construction_rejects_out_of_cutoff() {
        assert!(PureState::basis(OccupationQuad::new(4, 0, 0, 0), 3).is_err());
    }

    #[test]
    fn prune_moves_weight_to_leakage() {
        let s = PureState::from_amplitudes(
            2,
            [(OccupationQuad::VACUUM, c(1.0)), (OccupationQuad::new(1, 0, 0, 0), c(1e-16))],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.leakage() > 0.0 && s.leakage() < 1e-31);
    }

    #[test]
    fn product_state_partial_trace_is_projector() {
        let s = PureState::basis(OccupationQuad::new(1, 0, 0, 0), 2).unwrap();
        let rho = partial_trace(&s, Party::Alice);
        assert_eq!(rho.basis, vec![(1, 0)]);
        assert_abs_diff_eq!(rho.entries[(0, 0)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn project_vacuum_on_vacuum_sector() {
        let s = PureState::vacuum(2);
        let (p, prob) = project_subspace(&s, &SectorSet::from_sectors([0])).unwrap();
        assert_eq!(p, s);
        assert_abs_diff_eq!(prob, 1.0);
    }

    #[test]
    fn projection_drops_unequal_local_numbers() {
        let s = PureState::from_amplitudes(
            2,
            [(OccupationQuad::new(1, 0, 0, 1), c(0.6)), (OccupationQuad::new(1, 0, 0, 0), c(0.8))],
        )
        .unwrap();
        let (p, prob) = project_subspace(&s, &SectorSet::full()).unwrap();
        assert_abs_diff_eq!(prob, 0.36, epsilon = 1e-15);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn tensor_rejects_overlap() {
        let a = PureState::basis(OccupationQuad::new(1, 0, 0, 0), 2).unwrap();
        assert!(a.tensor_disjoint(&a).is_err());
        let b = PureState::basis(OccupationQuad::new(0, 0, 0, 1), 2).unwrap();
        let ab = a.tensor_disjoint(&b).unwrap();
        assert_eq!(ab.amplitude(&OccupationQuad::new(1, 0, 0, 1)), c(1.0));
    }

    #[test]
    fn json_schema() {
        let s = PureState::from_amplitudes(
            3,
            [
                (OccupationQuad::new(1, 0, 0, 1), Complex64::new(0.6, 0.0)),
                (OccupationQuad::new(0, 1, 1, 0), Complex64::new(0.0, -0.8)),
            ],
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["n_max"], 3);
        assert_eq!(v["leakage"], 0.0);
        let records = v["amplitudes"].as_array().unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().any(|r| r == &serde_json::json!([0, 1, 1, 0, 0.0, -0.8])));
        let back: PureState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_rejects_bad_records() {
        let dup = r#"{"n_max":2,"leakage":0.0,"amplitudes":[[0,0,0,0,1,0],[0,0,0,0,0,1]]}"#;
        assert!(serde_json::from_str::<PureState>(dup).is_err());
        let big = r#"{"n_max":1,"leakage":0.0,"amplitudes":[[2,0,0,0,1,0]]}"#;
        assert!(serde_json::from_str::<PureState>(big).is_err());
    }

    #[test]
    fn ensemble_validation() {
        let a = PureState::vacuum(1);
        let b = PureState::basis(OccupationQuad::new(1, 0, 0, 1), 1).unwrap();
        let ok = StateEnsemble::new(
            vec![Branch { weight: 0.25, state: a.clone() }, Branch { weight: 0.75, state: b.clone() }],
            0.0,
        );
        assert!(ok.is_ok());
        let bad = StateEnsemble::new(vec![Branch { weight: 0.5, state: a.clone() }], 0.0);
        assert!(bad.is_err());
        let unnormalized = StateEnsemble::new(vec![Branch { weight: 1.0, state: a.scaled(c(2.0)) }], 0.0);
        assert!(unnormalized.is_err());
    }
}
