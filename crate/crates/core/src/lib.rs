//! Formation-probability correlators for small spin-1/2 chains.
//!
//! The crate computes the correlator
//! `E_m = |<σ±(1) ⊗ σ±(2) ⊗ … ⊗ σ±(m)>|²` on exact ground states and thermal
//! states of four chain models (transverse Ising with an optional
//! next-nearest coupling, XXZ and Majumdar-Ghosh), and converts a measured
//! value of `E_m` into the minimal entanglement depth and Bell non-locality
//! depth needed to explain it.
//!
//! Exact diagonalization results can be cross-checked against:
//!
//! * the coordinate Bethe-Ansatz solution of the XXZ ground state ([`bethe`]),
//! * closed forms for the four-site XXZ ring and the Majumdar-Ghosh chain
//!   ([`closedform`]).
//!
//! Data-parallel inner loops (matrix-free matvecs, correlator tail sums,
//! parameter sweeps, permutation sums) run on rayon when the default
//! `parallel` feature is enabled and fall back to sequential loops otherwise.

pub mod basis;
pub mod bethe;
pub mod cli;
pub mod closedform;
pub mod correlator;
pub mod eigensolver;
mod error;
pub mod exec;
pub mod hamiltonian;
pub mod hierarchy;
pub mod linalg;
pub mod output;
pub mod scaling;

pub use basis::{Basis, BasisConfig, NeelKind, SectorIndex};
pub use correlator::{CorrelatorResult, SignPattern, SpinOp};
pub use eigensolver::{PureState, SpectralDecomposition, ThermalWeights};
pub use error::{Error, Result};
pub use exec::Execution;
pub use hamiltonian::{Boundary, ChainSpec, Hamiltonian, LinearOperator, Model};
