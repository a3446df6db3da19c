use std::sync::Arc;

use serde::Serialize;

use super::kernel::random_plane_waves;
use super::op::SymmetryOp;
use crate::error::Result;
use crate::opcore::Operator;
use crate::spectral::{FieldSource, TorusGrid};

pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub symmetry: String,
    /// `max |L[Γu]|` over grid points, sample times and draws.
    pub residual: f64,
    /// `max |M^α D_α Γu|` over the same points, the scale of the cancellation.
    pub scale: f64,
    pub relative: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub grid: TorusGrid,
    pub draws: usize,
    pub waves: usize,
    pub max_mode: i64,
    pub times: Vec<f64>,
    pub seed: u64,
    pub tolerance: f64,
}

impl VerifyConfig {
    /// A coarse grid of the operator's spatial dimension.
    pub fn for_operator(l: &Operator, seed: u64) -> Result<Self> {
        let dim = l.nvars() - 1;
        let n = if dim == 1 { 16 } else { 8 };
        Ok(VerifyConfig {
            grid: TorusGrid::cube(dim, n, 2.0 * std::f64::consts::PI)?,
            draws: 3,
            waves: 3,
            max_mode: 2,
            times: vec![0.0, 0.37, 0.81],
            seed,
            tolerance: SYMMETRY_TOLERANCE,
        })
    }
}

/// Applies `g` to random superpositions of plane-wave solutions and measures
/// `L[g u]` pointwise.
pub fn verify_symmetry(l: &Operator, g: &SymmetryOp, cfg: &VerifyConfig) -> Result<SymmetryReport> {
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for draw in 0..cfg.draws {
        let seed = cfg.seed.wrapping_add(draw as u64 * 7919);
        let u: Arc<dyn FieldSource> =
            Arc::new(random_plane_waves(l, &cfg.grid, cfg.waves, cfg.max_mode, seed)?);
        let gu = g.apply(u);
        for &t in &cfg.times {
            let mut total = crate::spectral::GridField::zeros(l.shape().0, cfg.grid.len());
            for (alpha, m) in l.terms() {
                let f = gu.sample(t, alpha.time_order(), alpha.spatial())?.mat_mul(m);
                scale = scale.max(f.max_abs());
                total.add_assign(&f);
            }
            residual = residual.max(total.max_abs());
        }
    }
    let relative = if scale == 0.0 { residual } else { residual / scale };
    Ok(SymmetryReport {
        symmetry: g.name.clone(),
        residual,
        scale,
        relative,
        pass: relative <= cfg.tolerance,
    })
}
