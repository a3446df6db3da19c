use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::evolution::ModeSystem;
use super::grid::TorusGrid;
use super::state::{propagate, SpectralState};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector, C64, I, ONE};

/// Component values on the points of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub comps: Vec<Vec<C64>>,
}

impl GridField {
    pub fn zeros(components: usize, npts: usize) -> Self {
        GridField {
            comps: vec![vec![C64::new(0.0, 0.0); npts]; components],
        }
    }

    pub fn components(&self) -> usize {
        self.comps.len()
    }

    pub fn npts(&self) -> usize {
        self.comps.first().map_or(0, Vec::len)
    }

    /// Pointwise `M · f`.
    pub fn mat_mul(&self, m: &Mat) -> GridField {
        let n = self.npts();
        let mut out = GridField::zeros(m.nrows(), n);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let mij = m[(i, j)];
                if mij == C64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..n {
                    out.comps[i][p] += mij * self.comps[j][p];
                }
            }
        }
        out
    }

    pub fn conj(&self) -> GridField {
        GridField {
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().map(|z| z.conj()).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> GridField {
        GridField {
            comps: self.comps.iter().map(|c| c.iter().map(|z| z * s).collect()).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &GridField) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    /// Pointwise product with a scalar field.
    pub fn weight(&self, w: &[C64]) -> GridField {
        GridField {
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().zip(w).map(|(z, v)| z * v).collect())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |a, z| a.max(z.norm()))
    }
}

/// A field on a torus grid that can be sampled at any time together with its
/// derivatives `∂_t^n ∂_x^β`.
pub trait FieldSource: Send + Sync {
    fn grid(&self) -> &TorusGrid;
    fn components(&self) -> usize;
    fn sample(&self, t: f64, time_order: u32, spatial: &[u32]) -> Result<GridField>;

    /// Tail fraction of the underlying spectral data at `t`; `None` for
    /// closed-form fields.
    fn support_tail(&self, _t: f64) -> Result<Option<f64>> {
        Ok(None)
    }
}

/// `Σ_α M^α D_α f` sampled at time `t`.
pub fn apply_operator(l: &crate::opcore::Operator, src: &dyn FieldSource, t: f64) -> Result<GridField> {
    let (rows, _) = l.shape();
    let mut out = GridField::zeros(rows, src.grid().len());
    for (alpha, m) in l.terms() {
        let f = src.sample(t, alpha.time_order(), alpha.spatial())?;
        out.add_assign(&f.mat_mul(m));
    }
    Ok(out)
}

/// Exact solution of an evolution system from initial data, sampled by
/// propagating its mode coefficients.
pub struct SpectralSolution {
    pub system: Arc<ModeSystem>,
    pub initial: SpectralState,
    /// Times outside `[lo, hi]` are refused.
    pub window: (f64, f64),
    cache: Mutex<Vec<(u64, Arc<SpectralState>)>>,
}

impl SpectralSolution {
    pub fn new(system: Arc<ModeSystem>, initial: SpectralState) -> Self {
        SpectralSolution {
            system,
            initial,
            window: (f64::NEG_INFINITY, f64::INFINITY),
            cache: Mutex::new(Vec::new()),
        }
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = (lo, hi);
        self
    }

    pub fn state_at(&self, t: f64) -> Result<Arc<SpectralState>> {
        let (lo, hi) = self.window;
        if !(t >= lo && t <= hi) {
            return Err(Error::Coverage {
                t,
                reason: format!("trajectory covers [{lo}, {hi}]"),
            });
        }
        let key = t.to_bits();
        if let Some((_, st)) = self.cache.lock().unwrap().iter().find(|(k, _)| *k == key) {
            return Ok(st.clone());
        }
        let st = Arc::new(propagate(&self.system, &self.initial, t)?);
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= 4 {
            cache.remove(0);
        }
        cache.push((key, st.clone()));
        Ok(st)
    }

    /// Mode coefficients of `∂_t^n u` at time `t`: the first block of `Aⁿ w`.
    pub fn time_derivative_modes(&self, t: f64, n: u32) -> Result<Vec<Vec<C64>>> {
        let st = self.state_at(t)?;
        let m = self.system.form.components;
        let r = self.system.form.order;
        let grid = &self.system.grid;
        let per_mode: Vec<Vec<C64>> = (0..grid.len())
            .into_par_iter()
            .map(|f| {
                let w = st.mode(f);
                if (n as usize) < r {
                    let b = n as usize * m;
                    return w[b..b + m].to_vec();
                }
                let a = &self.system.matrices[f];
                let mut v = Vector::from_column_slice(w);
                for _ in 0..n {
                    v = a * v;
                }
                v.as_slice()[..m].to_vec()
            })
            .collect();
        Ok((0..m)
            .map(|c| per_mode.iter().map(|v| v[c]).collect())
            .collect())
    }
}

impl FieldSource for SpectralSolution {
    fn grid(&self) -> &TorusGrid {
        &self.system.grid
    }

    fn components(&self) -> usize {
        self.system.form.components
    }

    fn sample(&self, t: f64, time_order: u32, spatial: &[u32]) -> Result<GridField> {
        let grid = &self.system.grid;
        let modes = self.time_derivative_modes(t, time_order)?;
        let mult: Vec<C64> = (0..grid.len())
            .map(|f| {
                let k = grid.wavevector(f);
                k.iter()
                    .zip(spatial)
                    .fold(ONE, |acc, (kd, &e)| acc * (I * kd).powu(e))
            })
            .collect();
        let comps = modes
            .into_par_iter()
            .map(|c| {
                let scaled: Vec<C64> = c.iter().zip(&mult).map(|(z, w)| z * w).collect();
                grid.synthesize(&scaled)
            })
            .collect();
        Ok(GridField { comps })
    }

    fn support_tail(&self, t: f64) -> Result<Option<f64>> {
        let u = self.sample(t, 0, &vec![0; self.grid().dim()])?;
        Ok(Some(self.grid().tail_fraction(&u.comps)))
    }
}

/// `Σ_w v_w e^{λ_w t + i k_w·x}`, sampled pointwise.
#[derive(Clone, Debug)]
pub struct PlaneWaveSum {
    pub grid: TorusGrid,
    pub waves: Vec<PlaneWave>,
}

#[derive(Clone, Debug)]
pub struct PlaneWave {
    pub k: Vec<f64>,
    pub lambda: C64,
    pub vector: Vec<C64>,
}

impl FieldSource for PlaneWaveSum {
    fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn components(&self) -> usize {
        self.waves.first().map_or(0, |w| w.vector.len())
    }

    fn sample(&self, t: f64, time_order: u32, spatial: &[u32]) -> Result<GridField> {
        let m = self.components();
        let mut out = GridField::zeros(m, self.grid.len());
        for w in &self.waves {
            let mut factor = w.lambda.powu(time_order) * (w.lambda * t).exp();
            for (kd, &e) in w.k.iter().zip(spatial) {
                factor *= (I * kd).powu(e);
            }
            for p in 0..self.grid.len() {
                let x = self.grid.position(p);
                let phase: f64 = x.iter().zip(&w.k).map(|(a, b)| a * b).sum();
                let e = factor * C64::new(0.0, phase).exp();
                for (c, v) in w.vector.iter().enumerate() {
                    out.comps[c][p] += v * e;
                }
            }
        }
        Ok(out)
    }
}
