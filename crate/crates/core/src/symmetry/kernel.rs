use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, null_space_abs, Mat, C64, ZERO};
use crate::opcore::{MultiIndex, Operator};
use crate::spectral::{
    to_evolution_form, FieldSource, GridField, PlaneWave, PlaneWaveSum, TorusGrid,
};

/// Polynomial `Σ c_e t^{e₀} x₁^{e₁} ⋯` in all variables.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    pub terms: BTreeMap<MultiIndex, C64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(MultiIndex::zero(nvars), c)
    }

    pub fn monomial(e: MultiIndex, c: C64) -> Self {
        let mut p = Poly::zero();
        p.add_term(e, c);
        p
    }

    /// `c·x_v`.
    pub fn variable(nvars: usize, v: usize, c: C64) -> Self {
        Self::monomial(MultiIndex::unit(nvars, v), c)
    }

    fn add_term(&mut self, e: MultiIndex, c: C64) {
        let entry = self.terms.entry(e.clone()).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `∂^α p`.
    pub fn derivative(&self, alpha: &[u32]) -> Poly {
        let mut out = Poly::zero();
        'terms: for (e, c) in &self.terms {
            let mut coeff = *c;
            let mut ne = e.as_slice().to_vec();
            for (slot, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    if ne[slot] == 0 {
                        continue 'terms;
                    }
                    coeff *= f64::from(ne[slot]);
                    ne[slot] -= 1;
                }
            }
            out.add_term(MultiIndex::new(ne), coeff);
        }
        out
    }

    pub fn eval(&self, vars: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.as_slice()
                    .iter()
                    .zip(vars)
                    .fold(*c, |acc, (&k, &x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    pub fn has_spatial_dependence(&self) -> bool {
        self.terms.keys().any(|e| e.spatial().iter().any(|&k| k > 0))
    }
}

/// A fixed kernel element `w(t, x)` with polynomial components.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelShift {
    pub name: String,
    pub components: Vec<Poly>,
}

impl KernelShift {
    pub fn new(name: impl Into<String>, components: Vec<Poly>) -> Self {
        KernelShift {
            name: name.into(),
            components,
        }
    }

    /// `L[w]` computed symbolically.
    pub fn apply_operator(&self, l: &Operator) -> Result<Vec<Poly>> {
        let (rows, cols) = l.shape();
        if cols != self.components.len() {
            return Err(Error::Shape("kernel shift length differs from operator columns".into()));
        }
        let mut out = vec![Poly::zero(); rows];
        for (alpha, m) in l.terms() {
            for (j, wj) in self.components.iter().enumerate() {
                let d = wj.derivative(alpha.as_slice());
                for (i, oi) in out.iter_mut().enumerate() {
                    if m[(i, j)] != ZERO {
                        *oi = oi.add(&d.scale(m[(i, j)]));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_kernel_element(&self, l: &Operator) -> Result<bool> {
        Ok(self.apply_operator(l)?.iter().all(Poly::is_zero))
    }

    pub fn is_position_weighted(&self) -> bool {
        self.components.iter().any(Poly::has_spatial_dependence)
    }

    pub fn source(&self, grid: TorusGrid) -> KernelShiftField {
        KernelShiftField {
            shift: self.clone(),
            grid,
        }
    }
}

pub struct KernelShiftField {
    shift: KernelShift,
    grid: TorusGrid,
}

impl FieldSource for KernelShiftField {
    fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn components(&self) -> usize {
        self.shift.components.len()
    }

    fn sample(&self, t: f64, time_order: u32, spatial: &[u32]) -> Result<GridField> {
        let mut alpha = vec![time_order];
        alpha.extend_from_slice(spatial);
        let comps = self
            .shift
            .components
            .iter()
            .map(|p| {
                let d = p.derivative(&alpha);
                (0..self.grid.len())
                    .map(|q| {
                        let mut vars = vec![t];
                        vars.extend(self.grid.position(q));
                        d.eval(&vars)
                    })
                    .collect()
            })
            .collect();
        Ok(GridField { comps })
    }
}

/// Plane-wave solutions `v e^{λt + i k·x}` at spatial wavevector `k`, one per
/// root `λ` of the dispersion relation.
///
/// The roots are the eigenvalues of the companion matrix; `v` is the first
/// block of the matching eigenvectors, so the symbol at `(λ/i, k)` annihilates it.
pub fn kernel_sample(l: &Operator, k: &[f64]) -> Result<Vec<PlaneWave>> {
    let form = to_evolution_form(l)?;
    let a = form.companion(k);
    let (_, t) = a.clone().schur().unpack();
    let mut lambdas: Vec<C64> = Vec::new();
    for i in 0..t.nrows() {
        let z = t[(i, i)];
        if !lambdas.iter().any(|y| (z - y).norm() < 1e-9 * (1.0 + y.norm())) {
            lambdas.push(z);
        }
    }
    lambdas.sort_by(|x, y| (x.im, x.re).partial_cmp(&(y.im, y.re)).unwrap());
    let m = form.components;
    let size = a.nrows();
    let scale = max_abs(&a).max(1.0);
    let mut waves = Vec::new();
    for lambda in lambdas {
        let shifted = &a - Mat::identity(size, size) * lambda;
        let ns = null_space_abs(&shifted, 1e-9 * scale);
        for col in 0..ns.ncols() {
            // eigenvectors of the companion matrix are (v, λv, …)
            let v: Vec<C64> = ns.column(col).iter().take(m).copied().collect();
            waves.push(PlaneWave {
                k: k.to_vec(),
                lambda,
                vector: v,
            });
        }
    }
    if waves.is_empty() {
        return Err(Error::NoKernel);
    }
    Ok(waves)
}

/// Random superposition of plane-wave solutions on grid wavevectors with
/// integer modes in `[−max_mode, max_mode]`.
pub fn random_plane_waves(
    l: &Operator,
    grid: &TorusGrid,
    count: usize,
    max_mode: i64,
    seed: u64,
) -> Result<PlaneWaveSum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut waves = Vec::new();
    let mut guard = 0;
    while waves.len() < count {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::NoKernel);
        }
        let modes: Vec<i64> = (0..grid.dim())
            .map(|_| rng.gen_range(-max_mode..=max_mode))
            .collect();
        let Some(flat) = grid.mode_index(&modes) else { continue };
        let k = grid.wavevector(flat);
        for mut w in kernel_sample(l, &k)? {
            let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            w.vector.iter_mut().for_each(|z| *z *= a);
            waves.push(w);
        }
    }
    Ok(PlaneWaveSum {
        grid: grid.clone(),
        waves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators;

    #[test]
    fn heat_dispersion() {
        let w = kernel_sample(&operators::heat(1), &[1.5]).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0].lambda - C64::from(-2.25)).norm() < 1e-14);
    }

    #[test]
    fn wave_has_two_branches() {
        let w = kernel_sample(&operators::wave(1), &[2.0]).unwrap();
        let mut ims: Vec<f64> = w.iter().map(|x| x.lambda.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 2.0).abs() < 1e-12 && (ims[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dirac_energies() {
        let k = [0.3, -0.4, 1.2];
        let w = kernel_sample(&operators::dirac(1.0), &k).unwrap();
        assert_eq!(w.len(), 4);
        let e = (1.0f64 + 0.09 + 0.16 + 1.44).sqrt();
        for x in &w {
            assert!(x.lambda.re.abs() < 1e-12);
            assert!((x.lambda.im.abs() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn kdv_kernel_shifts() {
        let l = operators::kdv_kdv();
        let x = |c: f64| Poly::variable(2, 1, C64::from(c));
        let t = |c: f64| Poly::variable(2, 0, C64::from(c));
        assert!(KernelShift::new("v7", vec![x(-1.0), t(1.0)]).is_kernel_element(&l).unwrap());
        assert!(!KernelShift::new("bad", vec![x(1.0), t(1.0)]).is_kernel_element(&l).unwrap());
    }
}
