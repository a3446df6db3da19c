//! Symmetry operators: matrix, differential, reflection and conjugation
//! factors, kernel shifts, and a catalogue of named generators.

pub mod catalog;
pub mod kernel;
pub mod op;
pub mod verify;

pub use catalog::{lookup, lookup_with_center, Generator};
pub use kernel::{kernel_sample, random_plane_waves, KernelShift, Poly};
pub use op::{Applied, DiffTerm, Factor, LinearPoly, SymmetryOp};
pub use verify::{verify_symmetry, SymmetryReport, VerifyConfig};
