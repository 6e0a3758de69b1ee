//! Stokes operators and total polarization spin.
//!
//! Per party, with `a_H`, `a_V` its two modes:
//!
//! ```text
//! S_x = ½ (a_H† a_V + a_V† a_H)
//! S_y = (1/2i) (a_H† a_V − a_V† a_H)
//! S_z = ½ (a_H† a_H − a_V† a_V)
//! ```
//!
//! Every component conserves each party's local photon number, so the
//! quantities here are blind to coherences between photon-number sectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{Ladder, Mixture, Party, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StokesParty {
    Alice,
    Bob,
    Total,
}

impl From<Party> for StokesParty {
    fn from(p: Party) -> Self {
        match p {
            Party::Alice => StokesParty::Alice,
            Party::Bob => StokesParty::Bob,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub party: StokesParty,
}

/// Image of `state` under `S_axis` of `party` (not normalized).
///
/// Uses the cutoff-respecting ladder operators, so a raise past `n_max`
/// shows up as leakage on the result.
pub fn apply_stokes(state: &PureState, axis: Axis, party: Party) -> PureState {
    let (h, v) = party.modes();
    let half = Complex64::new(0.5, 0.0);
    match axis {
        Axis::Z => state
            .apply_number(&[h])
            .add_scaled(&state.apply_number(&[v]), Complex64::new(-1.0, 0.0))
            .expect("same cutoff")
            .scaled(half),
        Axis::X | Axis::Y => {
            let h_from_v = state.ladder(v, Ladder::Lower).ladder(h, Ladder::Raise);
            let v_from_h = state.ladder(h, Ladder::Lower).ladder(v, Ladder::Raise);
            let (sign, factor) = match axis {
                Axis::X => (1.0, half),
                _ => (-1.0, Complex64::new(0.0, -0.5)),
            };
            h_from_v.add_scaled(&v_from_h, Complex64::new(sign, 0.0)).expect("same cutoff").scaled(factor)
        }
    }
}

fn apply_party(state: &PureState, axis: Axis, party: StokesParty) -> PureState {
    match party {
        StokesParty::Alice => apply_stokes(state, axis, Party::Alice),
        StokesParty::Bob => apply_stokes(state, axis, Party::Bob),
        StokesParty::Total => apply_stokes(state, axis, Party::Alice)
            .add_scaled(&apply_stokes(state, axis, Party::Bob), Complex64::new(1.0, 0.0))
            .expect("same cutoff"),
    }
}

/// One spare level per mode makes every single Stokes application exact.
fn widened(state: &PureState) -> PureState {
    state.with_cutoff(state.n_max() + 1).expect("raising the cutoff keeps support")
}

/// `(⟨S⟩, ⟨S²⟩)` for one component, averaged over the mixture.
fn moments<M: Mixture + ?Sized>(state: &M, axis: Axis, party: StokesParty) -> Result<(f64, f64)> {
    let mut first = 0.0;
    let mut second = 0.0;
    for (w, branch) in state.weighted_branches() {
        let wide = widened(branch);
        let image = apply_party(&wide, axis, party);
        first += w * wide.inner_product(&image)?.re;
        // S is Hermitian: ⟨S²⟩ = ‖S ψ‖²
        second += w * image.norm_sqr();
    }
    Ok((first, second))
}

pub fn stokes_vector<M: Mixture + ?Sized>(state: &M, party: StokesParty) -> Result<StokesVector> {
    Ok(StokesVector {
        sx: moments(state, Axis::X, party)?.0,
        sy: moments(state, Axis::Y, party)?.0,
        sz: moments(state, Axis::Z, party)?.0,
        party,
    })
}

/// `⟨S²⟩` of the total spin `S_A + S_B`.
pub fn total_spin_squared<M: Mixture + ?Sized>(state: &M) -> Result<f64> {
    Axis::ALL.iter().map(|&axis| Ok(moments(state, axis, StokesParty::Total)?.1)).sum()
}

/// `⟨S_axis²⟩ − ⟨S_axis⟩²`.
pub fn stokes_variance<M: Mixture + ?Sized>(state: &M, axis: Axis, party: StokesParty) -> Result<f64> {
    let (first, second) = moments(state, axis, party)?;
    Ok(second - first * first)
}

/// Total-spin summary as emitted by the `observables` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub s2: f64,
    pub variances: Variances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variances {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn observables<M: Mixture + ?Sized>(state: &M) -> Result<Observables> {
    let v = stokes_vector(state, StokesParty::Total)?;
    Ok(Observables {
        sx: v.sx,
        sy: v.sy,
        sz: v.sz,
        s2: total_spin_squared(state)?,
        variances: Variances {
            x: stokes_variance(state, Axis::X, StokesParty::Total)?,
            y: stokes_variance(state, Axis::Y, StokesParty::Total)?,
            z: stokes_variance(state, Axis::Z, StokesParty::Total)?,
        },
    })
}
