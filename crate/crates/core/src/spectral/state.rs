use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::evolution::ModeSystem;
use super::grid::TorusGrid;
use crate::error::{Error, Result};
use crate::linalg::{c, C64, ZERO};

/// Mode coefficients of the companion vector `w = (u, u_t, …)` at one time.
/// Layout is mode-major: `coeffs[f * size + c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    pub time: f64,
    pub size: usize,
    pub coeffs: Vec<C64>,
}

impl SpectralState {
    pub fn zeros(grid: &TorusGrid, size: usize, time: f64) -> Self {
        SpectralState {
            time,
            size,
            coeffs: vec![ZERO; grid.len() * size],
        }
    }

    pub fn mode(&self, flat: usize) -> &[C64] {
        &self.coeffs[flat * self.size..(flat + 1) * self.size]
    }

    pub fn mode_mut(&mut self, flat: usize) -> &mut [C64] {
        &mut self.coeffs[flat * self.size..(flat + 1) * self.size]
    }

    /// Coefficients of one entry of `w` across all modes.
    pub fn component(&self, comp: usize) -> Vec<C64> {
        self.coeffs
            .chunks(self.size)
            .map(|chunk| chunk[comp])
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every component is the transform of a real field.
    pub fn is_hermitian(&self, grid: &TorusGrid, tol: f64) -> bool {
        let all = vec![true; grid.dim()];
        (0..grid.len()).all(|f| {
            let g = grid.reflect_index(f, &all);
            self.mode(f)
                .iter()
                .zip(self.mode(g))
                .all(|(a, b)| (a - b.conj()).norm() <= tol)
        })
    }

    /// `Σ_n |ŵ_n|² · |box|`, equal to `∫ |w|² dx` by Parseval.
    pub fn l2_norm_sqr(&self, grid: &TorusGrid, comps: std::ops::Range<usize>) -> f64 {
        let mut total = 0.0;
        for f in 0..grid.len() {
            for comp in comps.clone() {
                total += self.mode(f)[comp].norm_sqr();
            }
        }
        total * grid.volume()
    }
}

/// Exact evolution of `state` to `t_target`.
pub fn propagate(system: &ModeSystem, state: &SpectralState, t_target: f64) -> Result<SpectralState> {
    if state.size != system.form.state_size() {
        return Err(Error::Shape("state size differs from the evolution form".into()));
    }
    let dt = t_target - state.time;
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let props = system.propagators(dt)?;
    let size = state.size;
    let coeffs: Vec<C64> = props
        .par_iter()
        .enumerate()
        .flat_map_iter(|(f, p)| {
            let w = crate::linalg::Vector::from_column_slice(state.mode(f));
            let out = p * w;
            out.iter().copied().collect::<Vec<_>>().into_iter()
        })
        .collect();
    debug_assert_eq!(coeffs.len(), size * system.grid.len());
    Ok(SpectralState {
        time: t_target,
        size,
        coeffs,
    })
}

/// Closed-form initial profiles.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Zero,
    /// `a · exp(−|x−c|²/(2w²)) · e^{i p·x}`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: C64,
        momentum: Vec<f64>,
    },
    /// `a · exp(1 − 1/(1 − |x−c|²/R²))` inside the ball of radius `R`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: C64,
    },
}

impl Profile {
    pub fn gaussian(center: Vec<f64>, width: f64, amplitude: C64) -> Self {
        let momentum = vec![0.0; center.len()];
        Profile::Gaussian {
            center,
            width,
            amplitude,
            momentum,
        }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        match self {
            Profile::Zero => ZERO,
            Profile::Gaussian {
                center,
                width,
                amplitude,
                momentum,
            } => {
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
                let phase: f64 = x.iter().zip(momentum).map(|(a, p)| a * p).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp() * c(0.0, phase).exp()
            }
            Profile::Bump {
                center,
                radius,
                amplitude,
            } => bump(x, center, *radius) * amplitude,
        }
    }
}

pub fn bump(x: &[f64], center: &[f64], radius: f64) -> f64 {
    let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (radius * radius);
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

/// Band-limited projection of `f`: sampled on a grid `oversample`× finer per
/// axis, transformed, and restricted to the active modes of `grid`.
pub fn project(grid: &TorusGrid, f: &(dyn Fn(&[f64]) -> C64 + Sync), oversample: usize) -> Result<Vec<C64>> {
    let fine = TorusGrid::new(
        grid.points.iter().map(|n| n * oversample).collect(),
        grid.lengths.clone(),
        None,
    )?;
    let vals: Vec<C64> = (0..fine.len())
        .into_par_iter()
        .map(|p| f(&fine.position(p)))
        .collect();
    let fine_coeffs = fine.analyze(&vals);
    Ok((0..grid.len())
        .map(|flat| {
            if !grid.is_active(flat) {
                return ZERO;
            }
            let modes = grid.mode_numbers(flat);
            fine.mode_index(&modes).map_or(ZERO, |g| fine_coeffs[g])
        })
        .collect())
}

/// Default oversampling: 8× in one dimension, 2× otherwise.
pub fn default_oversample(dim: usize) -> usize {
    if dim == 1 {
        8
    } else {
        2
    }
}

/// Initial data: one profile per entry of `w = (u, u_t, …)`, plus an optional
/// random superposition of low modes.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub profiles: Vec<Profile>,
    pub random: Option<RandomModes>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomModes {
    pub count: usize,
    pub max_mode: i64,
    pub seed: u64,
    /// Keep the field real by adding the conjugate partner of every mode.
    pub real: bool,
    /// Give every chosen mode `n` an independent random partner at `−n`.
    pub paired: bool,
    /// Number of leading entries of `w` that receive data; 0 means all.
    pub entries: usize,
}

impl InitialData {
    pub fn state(&self, grid: &TorusGrid, size: usize, time: f64) -> Result<SpectralState> {
        let mut st = SpectralState::zeros(grid, size, time);
        if !self.profiles.is_empty() && self.profiles.len() != size {
            return Err(Error::Invalid(format!(
                "{} profiles given for a state of size {size}",
                self.profiles.len()
            )));
        }
        let os = default_oversample(grid.dim());
        for (comp, prof) in self.profiles.iter().enumerate() {
            if *prof == Profile::Zero {
                continue;
            }
            let coeffs = project(grid, &|x| prof.eval(x), os)?;
            for (f, z) in coeffs.into_iter().enumerate() {
                st.mode_mut(f)[comp] += z;
            }
        }
        if let Some(rm) = &self.random {
            rm.add_to(grid, &mut st)?;
        }
        Ok(st)
    }
}

impl RandomModes {
    pub fn add_to(&self, grid: &TorusGrid, st: &mut SpectralState) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let entries = if self.entries == 0 { st.size } else { self.entries.min(st.size) };
        let mut chosen = Vec::new();
        let mut guard = 0;
        while chosen.len() < self.count {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Invalid("not enough active modes for the random data".into()));
            }
            let modes: Vec<i64> = (0..grid.dim())
                .map(|_| rng.gen_range(-self.max_mode..=self.max_mode))
                .collect();
            let Some(f) = grid.mode_index(&modes) else { continue };
            if chosen.contains(&f) {
                continue;
            }
            chosen.push(f);
            let vals: Vec<C64> = (0..entries)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let all = vec![true; grid.dim()];
            let g = grid.reflect_index(f, &all);
            let partner: Vec<C64> = if self.paired && g != f {
                (0..entries)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            } else {
                Vec::new()
            };
            for (comp, z) in partner.into_iter().enumerate() {
                st.mode_mut(g)[comp] += z;
            }
            for (comp, v) in vals.into_iter().enumerate() {
                if self.real {
                    st.mode_mut(f)[comp] += v * 0.5;
                    st.mode_mut(g)[comp] += v.conj() * 0.5;
                } else {
                    st.mode_mut(f)[comp] += v;
                }
            }
        }
        Ok(())
    }
}
