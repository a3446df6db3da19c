//! Exact spectral evolution on periodic boxes.

pub mod evolution;
pub mod grid;
pub mod heat_oracle;
pub mod kappa;
pub mod source;
pub mod state;

pub use evolution::{to_evolution_form, EvolutionForm, ModeSystem, DEFAULT_AMPLIFICATION_CAP};
pub use grid::TorusGrid;
pub use kappa::{kappa_series, KappaSeries};
pub use source::{apply_operator, FieldSource, GridField, PlaneWave, PlaneWaveSum, SpectralSolution};
pub use state::{propagate, InitialData, Profile, RandomModes, SpectralState};
