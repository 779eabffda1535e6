//! Quench dynamics of one-dimensional two-band fermion models.
//!
//! The library simulates the unitary evolution following a sudden change of
//! Hamiltonian ("quantum quench") and computes three diagnostics of the
//! post-quench dynamics:
//!
//! - entanglement-spectrum crossings (ESC), detected through the correlation
//!   matrix of the time-evolved Gaussian state;
//! - dynamical quantum phase transitions (DQPT), i.e. nonanalyticities of the
//!   Loschmidt rate function;
//! - the dynamical Chern number (DCN) of the parent Bloch vector over
//!   momentum-time submanifolds bounded by fixed momenta.
//!
//! Noninteracting dynamics is treated in closed form through the parent
//! Hamiltonian of the time-evolved state; interacting chains (Hubbard term)
//! are handled by exact diagonalization at small sizes.

pub mod bloch;
pub mod error;
pub mod free_fermion;
pub mod indicators;
pub mod interacting;

pub use bloch::{BlochFunction, BlochVector3, ParentCoefficients, QuenchProtocol};
pub use error::CoreError;
pub use free_fermion::{BoundaryCondition, CorrelationMatrix, EntanglementData, LatticeHamiltonian};
pub use interacting::{FockBasis, FockState, ManyBodyOperator, SlaterState};

/// Result alias used across the library.
pub type Result<T> = std::result::Result<T, CoreError>;
