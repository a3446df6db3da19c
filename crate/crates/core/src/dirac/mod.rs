//! Dirac field: gamma matrices, plane-wave spinors, a finite Fock space and
//! the discrete symmetry algebra.

pub mod algebra;
pub mod continuum;
pub mod fock;
pub mod gamma;
pub mod spinor;
pub mod suite;

pub use gamma::{levi_civita, GammaRep, ETA};
