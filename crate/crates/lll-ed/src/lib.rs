//! Exact diagonalization and particle-entanglement analysis for 2D
//! weakly-interacting rotating Bose and Fermi gases in the lowest
//! Landau level.
//!
//! Units: ħ = m = ω = 1; lengths in a₀ = √(ħ/mω), energies in ħω,
//! angular momenta in ħ.

pub mod analysis;
pub mod anharmonic;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod interaction;
pub mod math;
pub mod orbitals;
pub mod output;
pub mod quadrature;
pub mod solver;
pub mod trial;

pub use error::{Error, Result};
pub use fock::{FockState, Statistics, SubspaceBasis};
pub use interaction::{ElementTable, InteractionKind};
pub use solver::{GroundStateRecord, LanczosOpts, SolveContext, SparseHamiltonian};
