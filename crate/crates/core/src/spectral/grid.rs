use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

/// Periodic box `[−L/2, L/2)^d` with `N` points per axis (`N` a power of two).
///
/// Array index `j` on an axis holds the point `x_j = −L/2 + j h` and, in mode
/// space, the integer mode `n = j` for `j < N/2` and `n = j − N` above. The
/// Nyquist mode `−N/2` is always kept at zero so the mode set is symmetric.
#[derive(Clone)]
pub struct TorusGrid {
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
    /// Modes with `|k| > k_max` are held at zero.
    pub k_max: Option<f64>,
    ffts: Vec<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusGrid")
            .field("points", &self.points)
            .field("lengths", &self.lengths)
            .field("k_max", &self.k_max)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.lengths == other.lengths && self.k_max == other.k_max
    }
}

impl TorusGrid {
    pub fn new(points: Vec<usize>, lengths: Vec<f64>, k_max: Option<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != lengths.len() {
            return Err(Error::Invalid("grid needs one length per axis".into()));
        }
        for &n in &points {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::Invalid(format!("{n} points is not a power of two ≥ 2")));
            }
        }
        if lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Invalid("box lengths must be positive".into()));
        }
        let mut planner = FftPlanner::new();
        let ffts = points
            .iter()
            .map(|&n| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
            .collect();
        Ok(TorusGrid {
            points,
            lengths,
            k_max,
            ffts,
        })
    }

    pub fn cube(dim: usize, n: usize, length: f64) -> Result<Self> {
        Self::new(vec![n; dim], vec![length; dim], None)
    }

    pub fn with_k_max(mut self, k_max: Option<f64>) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    /// Quadrature weight `h₁⋯h_d`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Row-major multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.points[a];
            flat /= self.points[a];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.points)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        -self.lengths[axis] / 2.0 + j as f64 * self.spacing(axis)
    }

    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .iter()
            .enumerate()
            .map(|(a, &j)| self.coordinate(a, j))
            .collect()
    }

    /// Integer mode for array index `j` on `axis`.
    pub fn mode_number(&self, axis: usize, j: usize) -> i64 {
        let n = self.points[axis];
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    pub fn mode_numbers(&self, flat: usize) -> Vec<i64> {
        self.unflatten(flat)
            .iter()
            .enumerate()
            .map(|(a, &j)| self.mode_number(a, j))
            .collect()
    }

    /// Wavevector of the mode stored at `flat`.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        self.mode_numbers(flat)
            .iter()
            .enumerate()
            .map(|(a, &n)| 2.0 * PI * n as f64 / self.lengths[a])
            .collect()
    }

    /// Array index of an integer mode, if it is representable and active.
    pub fn mode_index(&self, modes: &[i64]) -> Option<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for (a, &n) in modes.iter().enumerate() {
            let half = (self.points[a] / 2) as i64;
            if n <= -half || n >= half {
                return None;
            }
            idx.push(if n >= 0 { n as usize } else { (n + self.points[a] as i64) as usize });
        }
        let flat = self.flatten(&idx);
        self.is_active(flat).then_some(flat)
    }

    /// False for Nyquist modes and modes beyond the cutoff.
    pub fn is_active(&self, flat: usize) -> bool {
        let idx = self.unflatten(flat);
        if idx.iter().zip(&self.points).any(|(&j, &n)| j == n / 2) {
            return false;
        }
        match self.k_max {
            Some(kmax) => {
                let k = self.wavevector(flat);
                k.iter().map(|x| x * x).sum::<f64>().sqrt() <= kmax * (1.0 + 1e-12)
            }
            None => true,
        }
    }

    /// Largest `|k|` over active modes.
    pub fn active_k_max(&self) -> f64 {
        (0..self.len())
            .filter(|&f| self.is_active(f))
            .map(|f| self.wavevector(f).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Flat index of the point reflected through the origin on the masked axes.
    pub fn reflect_index(&self, flat: usize, axes: &[bool]) -> usize {
        let mut idx = self.unflatten(flat);
        for (a, j) in idx.iter_mut().enumerate() {
            if axes[a] {
                *j = (self.points[a] - *j) % self.points[a];
            }
        }
        self.flatten(&idx)
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        assert_eq!(data.len(), self.len());
        let d = self.dim();
        let mut stride = 1;
        for a in (0..d).rev() {
            let n = self.points[a];
            let fft = if inverse { &self.ffts[a].1 } else { &self.ffts[a].0 };
            let outer = self.len() / (n * stride);
            let mut line = vec![ZERO; n];
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for (j, z) in line.iter_mut().enumerate() {
                        *z = data[base + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, z) in line.iter().enumerate() {
                        data[base + j * stride] = *z;
                    }
                }
            }
            stride *= n;
        }
    }

    fn alternating_sign(&self, flat: usize) -> f64 {
        let s: i64 = self.mode_numbers(flat).iter().sum();
        if s.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Grid values from mode coefficients: `u(x_j) = Σ_n û_n e^{i k_n·x_j}`.
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut data: Vec<C64> = coeffs
            .iter()
            .enumerate()
            .map(|(f, &z)| z * self.alternating_sign(f))
            .collect();
        self.transform(&mut data, true);
        data
    }

    /// Mode coefficients from grid values; inactive modes are zeroed.
    pub fn analyze(&self, values: &[C64]) -> Vec<C64> {
        let mut data = values.to_vec();
        self.transform(&mut data, false);
        let norm = 1.0 / self.len() as f64;
        data.iter()
            .enumerate()
            .map(|(f, &z)| {
                if self.is_active(f) {
                    z * (self.alternating_sign(f) * norm)
                } else {
                    ZERO
                }
            })
            .collect()
    }

    /// `∫ f dx ≈ h^d Σ_j f(x_j)`, exact for band-limited integrands.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().sum::<C64>() * self.cell_volume()
    }

    /// Fraction of `Σ|f|²` at points with `max_d |x_d| / (L_d/2) > 0.8`.
    pub fn tail_fraction(&self, comps: &[Vec<C64>]) -> f64 {
        let mut total = 0.0;
        let mut tail = 0.0;
        for flat in 0..self.len() {
            let x = self.position(flat);
            let edge = x
                .iter()
                .zip(&self.lengths)
                .map(|(xi, l)| xi.abs() / (l / 2.0))
                .fold(0.0, f64::max);
            let w: f64 = comps.iter().map(|c| c[flat].norm_sqr()).sum();
            total += w;
            if edge > 0.8 {
                tail += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_round_trip() {
        let g = TorusGrid::new(vec![8, 4], vec![2.0, 3.0], None).unwrap();
        let f = g.mode_index(&[2, -1]).unwrap();
        let mut c = vec![ZERO; g.len()];
        c[f] = C64::new(0.5, -1.0);
        let vals = g.synthesize(&c);
        let k = g.wavevector(f);
        for (p, v) in vals.iter().enumerate() {
            let x = g.position(p);
            let expect = c[f] * C64::new(0.0, k[0] * x[0] + k[1] * x[1]).exp();
            assert!((v - expect).norm() < 1e-13);
        }
        let back = g.analyze(&vals);
        for (a, b) in back.iter().zip(&c) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn nyquist_and_cutoff_are_inactive() {
        let g = TorusGrid::cube(1, 8, 2.0 * PI).unwrap().with_k_max(Some(2.0));
        assert!(g.mode_index(&[-4]).is_none());
        assert!(g.mode_index(&[3]).is_none());
        assert!(g.mode_index(&[-2]).is_some());
        assert_eq!(g.active_k_max(), 2.0);
    }

    #[test]
    fn reflection_maps_x_to_minus_x() {
        let g = TorusGrid::cube(2, 8, 4.0).unwrap();
        for f in 0..g.len() {
            let r = g.reflect_index(f, &[true, false]);
            let (x, y) = (g.position(f), g.position(r));
            let dx = (x[0] + y[0]).abs();
            assert!(dx < 1e-14 || (dx - 4.0).abs() < 1e-14);
            assert_eq!(x[1], y[1]);
        }
    }
}
