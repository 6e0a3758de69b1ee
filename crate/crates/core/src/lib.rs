//! Macroscopic Bell states in truncated four-mode Fock space and a
//! fidelity-based witness for genuine hybrid number-polarization
//! entanglement.
//!
//! Modules, bottom up:
//!
//! * [`fock`]: sparse states, ladder operators, ensembles, partial traces;
//! * [`states`]: the macroscopic singlet, sector singlets, TMSV, mixtures,
//!   exemplar states and beam-splitter interference;
//! * [`stokes`]: Stokes operators and total polarization spin;
//! * [`witness`]: separability thresholds and witness evaluation;
//! * [`oracles`]: brute-force searches that check the thresholds;
//! * [`channels`]: loss, white noise and dephasing;
//! * [`cli`]: the `hybrid-witness` command-line front end.

// `!(x > 0.0)` style range checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod error;
pub mod fock;
pub mod oracles;
pub mod sectors;
pub mod states;
pub mod stokes;
pub mod witness;

pub use error::{Error, Result};
pub use fock::{AnyState, Mixture, Mode, OccupationQuad, Party, PureState, StateEnsemble};
pub use sectors::SectorSet;
pub use states::SqueezingParams;
pub use witness::{evaluate_witness, Verdict, WitnessReport};
