//! Brute-force oracles for the separability thresholds.
//!
//! These search the separable sets directly instead of trusting the closed
//! forms in [`crate::witness`]:
//!
//! * number-separable states: per-sector power iteration on the block of the
//!   conditioned singlet projector;
//! * polarization-separable states: per-sector alternating maximization over
//!   product vectors `α ⊗ β`, with the cross-sector amplitudes set to their
//!   Cauchy–Schwarz optimum, restarted from random complex-Gaussian points.
//!
//! Soundness means an oracle never beats its bound; tightness means it gets
//! close.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fidelity_to_pure, OccupationQuad, Party, PureState};
use crate::sectors::SectorSet;
use crate::states::{mbs_singlet, sector_amplitude, sector_probability, sector_singlet, SqueezingParams};
use crate::witness::{bound_number, bound_polarization, conditioned_reference};

pub const DEFAULT_RESTARTS: u32 = 32;
/// Largest dense partial-transpose dimension accepted by [`negativity`].
pub const DEFAULT_DENSE_CAP: usize = 4096;
/// Slack allowed when checking an oracle against its bound.
pub const SOUNDNESS_SLACK: f64 = 1e-9;

const MAX_SWEEPS: usize = 1000;
const CONVERGENCE_TOL: f64 = 1e-14;
const CHAIN_SLACK: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub achieved: f64,
    pub bound: f64,
    pub gap: f64,
    pub restarts: u32,
    pub converged_restarts: u32,
    pub residual: f64,
    pub seed: u64,
}

impl OracleResult {
    fn new(achieved: f64, bound: f64, restarts: u32, converged_restarts: u32, residual: f64, seed: u64) -> Self {
        Self { achieved, bound, gap: bound - achieved, restarts, converged_restarts, residual, seed }
    }

    pub fn is_sound(&self) -> bool {
        self.achieved <= self.bound + SOUNDNESS_SLACK
    }
}

fn restart_rng(seed: u64, restart: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(restart));
    rng
}

fn gaussian_unit(rng: &mut impl Rng, dim: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Outcome of maximizing `|αᵀ M β|²` over unit vectors.
#[derive(Debug, Clone)]
pub struct Alternation {
    pub alpha: DVector<Complex64>,
    pub beta: DVector<Complex64>,
    /// `αᵀ M β` at the final iterate.
    pub overlap: Complex64,
    /// Objective after each full sweep.
    pub history: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
}

/// Alternating best responses for the bilinear form `αᵀ M β`: with `β`
/// fixed the optimal `α` is `conj(Mβ)/‖Mβ‖`, and symmetrically for `β`.
pub fn alternating_max(m: &DMatrix<Complex64>, beta0: DVector<Complex64>) -> Alternation {
    let best_response = |u: DVector<Complex64>| {
        let norm = u.norm();
        if norm == 0.0 {
            let mut e = DVector::from_element(u.len(), ZERO);
            e[0] = Complex64::new(1.0, 0.0);
            e
        } else {
            u.map(|z| z.conj() / norm)
        }
    };
    let mut beta = beta0;
    let mut alpha = best_response(m * &beta);
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut previous = f64::NEG_INFINITY;
    for _ in 0..MAX_SWEEPS {
        alpha = best_response(m * &beta);
        beta = best_response(m.transpose() * &alpha);
        let value = (alpha.transpose() * m * &beta)[(0, 0)].norm_sqr();
        history.push(value);
        residual = value - previous;
        previous = value;
        if residual.abs() < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    let overlap = (alpha.transpose() * m * &beta)[(0, 0)];
    Alternation { alpha, beta, overlap, history, residual: residual.abs(), converged }
}

/// `M_ij = conj(⟨i, N−i, j, N−j | target⟩)`, indexed by the H-photon count
/// of Alice (`i`) and Bob (`j`). Unrepresentable entries are zero.
fn sector_overlap_matrix(target: &PureState, sector: u32) -> DMatrix<Complex64> {
    let d = sector as usize + 1;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for (q, a) in target.iter() {
        if q.alice_total() == sector && q.bob_total() == sector {
            m[(q.a_h as usize, q.b_h as usize)] = a.conj();
        }
    }
    m
}

/// Largest single-sector product overlap `|⟨ψ_N| α ⊗ β⟩|²`; the exact value is `1/(N+1)`.
pub fn sector_product_max(sector: u32, restarts: u32, seed: u64) -> Result<OracleResult> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    let m = sector_overlap_matrix(&sector_singlet(sector, sector)?, sector);
    let runs: Vec<Alternation> = (0..restarts)
        .into_par_iter()
        .map(|k| alternating_max(&m, gaussian_unit(&mut restart_rng(seed, k), m.ncols())))
        .collect();
    let converged = runs.iter().filter(|a| a.converged).count() as u32;
    let best = best_of(&runs, |a| a.overlap.norm_sqr());
    Ok(OracleResult::new(
        runs[best].overlap.norm_sqr(),
        1.0 / f64::from(sector + 1),
        restarts,
        converged,
        runs[best].residual,
        seed,
    ))
}

fn best_of<T>(runs: &[T], score: impl Fn(&T) -> f64) -> usize {
    let mut best = 0;
    for (i, run) in runs.iter().enumerate().skip(1) {
        if score(run) > score(&runs[best]) {
            best = i;
        }
    }
    best
}

/// Per-sector product vectors with cross-sector amplitudes:
/// `|Φ⟩ = Σ_N c_N |α_N⟩_A ⊗ |β_N⟩_B` inside the sector of `N` local photons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductAnsatz {
    /// Sector → (Alice, Bob) vectors of length `N+1`, indexed by H-photon count.
    pub per_sector: BTreeMap<u32, (Vec<Complex64>, Vec<Complex64>)>,
    pub cross_sector: BTreeMap<u32, Complex64>,
}

impl ProductAnsatz {
    pub fn new(
        per_sector: BTreeMap<u32, (Vec<Complex64>, Vec<Complex64>)>,
        cross_sector: BTreeMap<u32, Complex64>,
    ) -> Result<Self> {
        let ansatz = Self { per_sector, cross_sector };
        ansatz.validate()?;
        Ok(ansatz)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: &[Complex64]| (v.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() <= 1e-10;
        for (&n, (a, b)) in &self.per_sector {
            if a.len() != n as usize + 1 || b.len() != n as usize + 1 {
                return Err(Error::InvalidParameter(format!("sector {n} vectors must have length {}", n + 1)));
            }
            if !unit(a) || !unit(b) {
                return Err(Error::InvalidParameter(format!("sector {n} vectors must be unit-norm")));
            }
        }
        if self.cross_sector.keys().any(|n| !self.per_sector.contains_key(n)) {
            return Err(Error::InvalidParameter("cross-sector amplitude without sector vectors".into()));
        }
        let c: Vec<Complex64> = self.cross_sector.values().copied().collect();
        if !unit(&c) {
            return Err(Error::InvalidParameter("cross-sector amplitudes must be unit-norm".into()));
        }
        Ok(())
    }

    /// Random vectors and amplitudes on `sectors`.
    pub fn random(sectors: &[u32], rng: &mut impl Rng) -> Self {
        let per_sector = sectors
            .iter()
            .map(|&n| {
                let d = n as usize + 1;
                (n, (gaussian_unit(rng, d).iter().copied().collect(), gaussian_unit(rng, d).iter().copied().collect()))
            })
            .collect();
        let c = gaussian_unit(rng, sectors.len());
        let cross_sector = sectors.iter().copied().zip(c.iter().copied()).collect();
        Self { per_sector, cross_sector }
    }

    /// Basis products `|n, N−n⟩ ⊗ |N−n, n⟩` with amplitudes making every
    /// inequality of the product-state chain tight at squeezing `r`.
    pub fn optimal(r: f64, sectors: &[u32]) -> Self {
        let mut per_sector = BTreeMap::new();
        let mut raw = Vec::new();
        for &n in sectors {
            let d = n as usize + 1;
            let mut a = vec![ZERO; d];
            let mut b = vec![ZERO; d];
            // ψ_N has +1/√(N+1) on |N, 0, 0, N⟩
            a[n as usize] = Complex64::new(1.0, 0.0);
            b[0] = Complex64::new(1.0, 0.0);
            per_sector.insert(n, (a, b));
            raw.push(sector_amplitude(r, n) / f64::from(n + 1).sqrt());
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cross_sector = sectors.iter().zip(&raw).map(|(&n, &x)| (n, Complex64::new(x / norm, 0.0))).collect();
        Self { per_sector, cross_sector }
    }

    pub fn max_sector(&self) -> u32 {
        self.per_sector.keys().next_back().copied().unwrap_or(0)
    }

    pub fn to_state(&self, n_max: u32) -> Result<PureState> {
        let mut amps = Vec::new();
        for (&n, (a, b)) in &self.per_sector {
            let c = self.cross_sector.get(&n).copied().unwrap_or(ZERO);
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    let amp = c * ai * bj;
                    if amp != ZERO {
                        let (i, j) = (i as u32, j as u32);
                        amps.push((OccupationQuad::new(i, n - i, j, n - j), amp));
                    }
                }
            }
        }
        PureState::from_amplitudes(n_max, amps)
    }

    /// `|⟨ψ_N | α_N ⊗ β_N⟩|²` for one sector.
    pub fn sector_overlap(&self, sector: u32) -> Result<f64> {
        let (a, b) = &self.per_sector[&sector];
        let single = ProductAnsatz {
            per_sector: BTreeMap::from([(sector, (a.clone(), b.clone()))]),
            cross_sector: BTreeMap::from([(sector, Complex64::new(1.0, 0.0))]),
        };
        Ok(sector_singlet(sector, sector)?.inner_product(&single.to_state(sector)?)?.norm_sqr())
    }
}

/// Best product-within-sector state found for the conditioned singlet.
pub fn polarization_optimum(
    r: f64,
    subspace: &SectorSet,
    n_max: u32,
    restarts: u32,
    seed: u64,
) -> Result<(OracleResult, ProductAnsatz)> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    let reference = conditioned_reference(r, subspace, n_max)?.state;
    let blocks: Vec<(u32, DMatrix<Complex64>)> = subspace
        .members_up_to(2 * n_max)
        .into_iter()
        .map(|n| (n, sector_overlap_matrix(&reference, n)))
        .filter(|(_, m)| m.iter().any(|z| *z != ZERO))
        .collect();
    if blocks.is_empty() {
        return Err(Error::EmptySubspace(subspace.to_string()));
    }

    let runs: Vec<Result<(f64, ProductAnsatz, bool, f64)>> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = restart_rng(seed, k);
            let mut per_sector = BTreeMap::new();
            let mut overlaps = Vec::new();
            let mut converged = true;
            let mut residual: f64 = 0.0;
            for (n, m) in &blocks {
                let run = alternating_max(m, gaussian_unit(&mut rng, m.ncols()));
                converged &= run.converged;
                residual = residual.max(run.residual);
                overlaps.push((*n, run.overlap));
                per_sector.insert(*n, (run.alpha.iter().copied().collect(), run.beta.iter().copied().collect()));
            }
            // |Σ c_N h_N|² is maximized by c_N ∝ conj(h_N)
            let norm = overlaps.iter().map(|(_, h)| h.norm_sqr()).sum::<f64>().sqrt();
            let cross_sector = overlaps.iter().map(|(n, h)| (*n, h.conj() / norm)).collect();
            let ansatz = ProductAnsatz { per_sector, cross_sector };
            let achieved = fidelity_to_pure(&ansatz.to_state(n_max)?, &reference)?;
            Ok((achieved, ansatz, converged, residual))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let converged = runs.iter().filter(|r| r.2).count() as u32;
    let best = best_of(&runs, |r| r.0);
    let (achieved, ansatz, _, residual) = runs[best].clone();
    let bound = bound_polarization(r, subspace)?;
    Ok((OracleResult::new(achieved, bound, restarts, converged, residual, seed), ansatz))
}

pub fn oracle_polarization_sup(
    r: f64,
    subspace: &SectorSet,
    n_max: u32,
    restarts: u32,
    seed: u64,
) -> Result<OracleResult> {
    Ok(polarization_optimum(r, subspace, n_max, restarts, seed)?.0)
}

/// All representable `(n_H, n_V)` pairs with `n_H + n_V = sector`.
fn local_pairs(sector: u32, n_max: u32) -> Vec<(u32, u32)> {
    (sector.saturating_sub(n_max)..=sector.min(n_max)).map(|h| (h, sector - h)).collect()
}

/// Top eigenpair of the conditioned singlet projector restricted to the
/// block of `sector` local photons per party, by power iteration.
pub fn number_block_optimum(r: f64, subspace: &SectorSet, n_max: u32, sector: u32) -> Result<(f64, PureState, f64)> {
    let reference = conditioned_reference(r, subspace, n_max)?.state;
    let pairs = local_pairs(sector, n_max);
    let basis: Vec<OccupationQuad> = pairs
        .iter()
        .flat_map(|&(ah, av)| pairs.iter().map(move |&(bh, bv)| OccupationQuad::new(ah, av, bh, bv)))
        .collect();
    let v = DVector::from_iterator(basis.len(), basis.iter().map(|q| reference.amplitude(q)));
    let block = &v * v.adjoint();

    let mut x = gaussian_unit(&mut restart_rng(0, sector), basis.len());
    let mut eigenvalue = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let y = &block * &x;
        let norm = y.norm();
        if norm == 0.0 {
            eigenvalue = 0.0;
            residual = 0.0;
            break;
        }
        let next = y / Complex64::new(norm, 0.0);
        let rayleigh = (next.adjoint() * &block * &next)[(0, 0)].re;
        residual = (rayleigh - eigenvalue).abs();
        eigenvalue = rayleigh;
        x = next;
        if residual < CONVERGENCE_TOL {
            break;
        }
    }
    let eigenvector = PureState::from_amplitudes(n_max, basis.iter().copied().zip(x.iter().copied()))?;
    Ok((eigenvalue, eigenvector, residual))
}

/// Largest overlap of a number-separable (block-diagonal) state with the
/// conditioned singlet.
pub fn oracle_number_sup(r: f64, subspace: &SectorSet, n_max: u32) -> Result<OracleResult> {
    let sectors = subspace.members_up_to(2 * n_max);
    if sectors.is_empty() {
        return Err(Error::EmptySubspace(subspace.to_string()));
    }
    let mut achieved: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for n in sectors {
        let (value, _, res) = number_block_optimum(r, subspace, n_max, n)?;
        achieved = achieved.max(value);
        residual = residual.max(res);
    }
    let bound = bound_number(r, subspace)?;
    let converged = u32::from(residual < CONVERGENCE_TOL);
    Ok(OracleResult::new(achieved, bound, 1, converged, residual, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub r: f64,
    pub overlap: f64,
    pub links: Vec<ChainLink>,
}

impl ChainReport {
    pub fn first_violation(&self) -> Option<&ChainLink> {
        self.links.iter().find(|l| !l.holds)
    }

    pub fn holds(&self) -> bool {
        self.first_violation().is_none()
    }
}

/// Evaluates every inequality bounding the singlet overlap of a
/// per-sector product state, on the full Fock space:
///
/// ```text
/// F ≤ (Σ_N √(f_N² |c_N|² g_N))²            (a)  g_N = |⟨ψ_N|φ_N⟩|²
/// g_N ≤ 1/(N+1)                            (b)
/// (Σ √(f_N² |c_N|² g_N))² ≤ (Σ √(f_N² |c_N|²/(N+1)))²
/// (Σ √(f_N² |c_N|²/(N+1)))² ≤ (Σ f_N²/(N+1)) (Σ |c_N|²)   (c)
/// (Σ p_N/(N+1)) (Σ |c_N|²) ≤ 1/cosh²(r)
/// ```
pub fn verify_appendix_chain(ansatz: &ProductAnsatz, r: f64) -> Result<ChainReport> {
    ansatz.validate()?;
    let n_max = ansatz.max_sector();
    let overlap = fidelity_to_pure(&ansatz.to_state(n_max)?, &mbs_singlet(SqueezingParams::real(r)?, n_max)?)?;

    let mut links = Vec::new();
    let mut push = |name: String, lhs: f64, rhs: f64| {
        links.push(ChainLink { name, lhs, rhs, holds: lhs <= rhs + CHAIN_SLACK });
    };
    let mut root_terms = 0.0;
    let mut root_bounds = 0.0;
    let mut weighted = 0.0;
    let mut c_total = 0.0;
    for &n in ansatz.per_sector.keys() {
        let f2 = sector_probability(r, n);
        let c2 = ansatz.cross_sector.get(&n).map_or(0.0, |c| c.norm_sqr());
        let g = ansatz.sector_overlap(n)?;
        let dim = f64::from(n + 1);
        push(format!("sector {n}: product overlap ≤ 1/(N+1)"), g, 1.0 / dim);
        root_terms += (f2 * c2 * g).sqrt();
        root_bounds += (f2 * c2 / dim).sqrt();
        weighted += f2 / dim;
        c_total += c2;
    }
    let squared_terms = root_terms * root_terms;
    let squared_bounds = root_bounds * root_bounds;
    push("(a) overlap ≤ squared sum of sector roots".into(), overlap, squared_terms);
    push("per-sector bound inside the squared sum".into(), squared_terms, squared_bounds);
    push("(c) Cauchy–Schwarz split".into(), squared_bounds, weighted * c_total);
    let c = r.cosh();
    push("truncated sum ≤ 1/cosh²(r)".into(), weighted * c_total, 1.0 / (c * c));
    Ok(ChainReport { r, overlap, links })
}

/// Negativity across the Alice|Bob cut: the summed magnitude of the negative
/// eigenvalues of the partial transpose, on the support of the state.
pub fn negativity(state: &PureState, cap: usize) -> Result<f64> {
    let mut alice: Vec<(u32, u32)> = state.iter().map(|(q, _)| q.local(Party::Alice)).collect();
    let mut bob: Vec<(u32, u32)> = state.iter().map(|(q, _)| q.local(Party::Bob)).collect();
    alice.sort_unstable();
    alice.dedup();
    bob.sort_unstable();
    bob.dedup();
    let (da, db) = (alice.len(), bob.len());
    let dim = da * db;
    if dim > cap {
        return Err(Error::SupportTooLarge { dim, cap });
    }
    let mut psi = DMatrix::from_element(da, db, ZERO);
    for (q, amp) in state.iter() {
        let i = alice.binary_search(&q.local(Party::Alice)).expect("collected above");
        let j = bob.binary_search(&q.local(Party::Bob)).expect("collected above");
        psi[(i, j)] = *amp;
    }
    // ρ^{T_B}[(a,b),(a',b')] = ψ[a,b'] conj(ψ[a',b])
    let pt = DMatrix::from_fn(dim, dim, |row, col| {
        let (a, b) = (row / db, row % db);
        let (a2, b2) = (col / db, col % db);
        psi[(a, b2)] * psi[(a2, b)].conj()
    });
    Ok(pt.symmetric_eigenvalues().iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{exemplar_state, ExemplarKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sector_products_reach_inverse_dimension() {
        assert_abs_diff_eq!(sector_product_max(0, 4, 1).unwrap().achieved, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sector_product_max(1, 8, 1).unwrap().achieved, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(sector_product_max(3, 64, 1).unwrap().achieved, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn alternation_is_monotone() {
        let mut rng = restart_rng(7, 0);
        let m = DMatrix::from_fn(4, 5, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let run = alternating_max(&m, gaussian_unit(&mut rng, 5));
        for pair in run.history.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
        // a generic bilinear form converges to its top singular value
        let sigma = m.clone().singular_values().max();
        assert_abs_diff_eq!(run.overlap.norm(), sigma, epsilon = 1e-6);
    }

    #[test]
    fn restarts_are_validated() {
        assert!(sector_product_max(2, 0, 1).is_err());
        assert!(oracle_polarization_sup(0.5, &SectorSet::nonvacuum(), 4, 0, 1).is_err());
    }

    #[test]
    fn number_oracle_vacuum() {
        let res = oracle_number_sup(0.0, &SectorSet::full(), 4).unwrap();
        assert_abs_diff_eq!(res.achieved, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn polarization_oracle_vacuum_is_product() {
        let res = oracle_polarization_sup(0.0, &SectorSet::full(), 4, 4, 3).unwrap();
        assert_abs_diff_eq!(res.achieved, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_only_ansatz() {
        let ansatz = ProductAnsatz::optimal(0.5, &[0]);
        let report = verify_appendix_chain(&ansatz, 0.5).unwrap();
        assert!(report.holds());
        assert_abs_diff_eq!(report.overlap, sector_probability(0.5, 0), epsilon = 1e-14);
    }

    #[test]
    fn ansatz_validation() {
        let mut ansatz = ProductAnsatz::optimal(0.5, &[1, 2]);
        assert!(ansatz.validate().is_ok());
        ansatz.cross_sector.insert(1, Complex64::new(2.0, 0.0));
        assert!(ansatz.validate().is_err());
    }

    #[test]
    fn product_state_has_no_negativity() {
        let s = PureState::basis(OccupationQuad::new(2, 0, 0, 2), 2).unwrap();
        assert_abs_diff_eq!(negativity(&s, DEFAULT_DENSE_CAP).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn negativity_matches_schmidt_formula() {
        // pure state: N = ((Σ √λ_i)² − 1)/2 over Schmidt coefficients λ_i
        let (a, b) = (0.6f64, 0.8f64);
        let s = exemplar_state(ExemplarKind::CrossLayer, Complex64::new(a, 0.0), Complex64::new(0.0, b), 2).unwrap();
        let expected = ((a + b).powi(2) - 1.0) / 2.0;
        assert_abs_diff_eq!(negativity(&s, DEFAULT_DENSE_CAP).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn negativity_respects_cap() {
        let s = mbs_singlet(SqueezingParams::real(0.5).unwrap(), 4).unwrap();
        assert!(matches!(negativity(&s, 10), Err(Error::SupportTooLarge { .. })));
    }
}
