//! Conservation laws for constant-coefficient linear PDE systems generated by
//! arbitrary symmetry operators, including discrete and antilinear ones.
//!
//! The pipeline mirrors the construction end to end:
//!
//! 1. [`opcore`] holds operators `L = Σ M^α D_α` and their Fourier symbols.
//! 2. [`adjoint`] computes `L*` and factors it as `L* = A₂ P L P A₁⁻¹`.
//! 3. [`current`] integrates `Q·L[P] − L*[Q]·P` by parts into an explicit
//!    divergence and turns its time component into a conserved functional.
//! 4. [`symmetry`] applies symmetry operators to fields.
//! 5. [`spectral`] evolves fields exactly on a torus and measures drift.
//! 6. [`dirac`] covers the gamma algebra, spinors and the Fock-space checks.
//! 7. [`scenario`] wires everything behind a small text format, and
//!    [`reproduce`] bundles the worked examples by name.

pub mod adjoint;
pub mod current;
pub mod dirac;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod opcore;
pub mod reproduce;
pub mod scenario;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::{Mat, C64};
pub use opcore::{MultiIndex, Operator};
