//! Whole-line reference values of `E_s(t) = ∫ u(x, s−t) u(x, t) dx` for the
//! heat equation, computed from the Gaussian kernel by quadrature.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Composite Gauss–Legendre rule on `[a, b]`.
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, degree: usize) -> Result<Self> {
        let rule = GaussLegendre::new(degree).map_err(|e| Error::Quadrature(e.to_string()))?;
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * degree);
        let mut weights = Vec::with_capacity(panels * degree);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, w) in rule.iter() {
                nodes.push(lo + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        Ok(CompositeRule { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// A profile supported in `[center − radius, center + radius]`.
pub struct CompactProfile<'a> {
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
    pub center: f64,
    pub radius: f64,
}

/// `u(x, τ) = ∫ G_τ(x − y) f(y) dy` with `G_τ(z) = e^{−z²/4τ}/√(4πτ)`.
fn heat_solution(rule: &CompositeRule, f: &(dyn Fn(f64) -> f64 + Sync), x: f64, tau: f64) -> f64 {
    let norm = 1.0 / (4.0 * std::f64::consts::PI * tau).sqrt();
    rule.integrate(|y| (-(x - y).powi(2) / (4.0 * tau)).exp() * f(y)) * norm
}

/// `E_s(t)` for each `t` in `times` (all in `(0, s)`).
pub fn heat_es_oracle(profile: &CompactProfile, s: f64, times: &[f64]) -> Result<Vec<f64>> {
    if let Some(&t) = times.iter().find(|&&t| !(t > 0.0 && t < s)) {
        return Err(Error::Quadrature(format!("t = {t} is outside (0, s)")));
    }
    let inner = CompositeRule::new(
        profile.center - profile.radius,
        profile.center + profile.radius,
        64,
        24,
    )?;
    // the solution at time τ is negligible beyond ~12√(4τ) from the support
    let reach = profile.radius + 12.0 * (4.0 * s).sqrt();
    let outer = CompositeRule::new(profile.center - reach, profile.center + reach, 160, 24)?;
    let values = times
        .par_iter()
        .map(|&t| {
            let u_t: Vec<f64> = outer
                .nodes
                .iter()
                .map(|&x| heat_solution(&inner, profile.f, x, t))
                .collect();
            let u_r: Vec<f64> = outer
                .nodes
                .iter()
                .map(|&x| heat_solution(&inner, profile.f, x, s - t))
                .collect();
            u_t.iter()
                .zip(&u_r)
                .zip(&outer.weights)
                .map(|((a, b), w)| a * b * w)
                .sum::<f64>()
        })
        .collect();
    Ok(values)
}

/// `∫∫ f(x) f(y) G_s(x − y) dx dy`, the value `E_s(t)` takes for every `t`.
pub fn heat_es_closed(profile: &CompactProfile, s: f64) -> Result<f64> {
    let rule = CompositeRule::new(
        profile.center - profile.radius,
        profile.center + profile.radius,
        64,
        24,
    )?;
    Ok(rule.integrate(|x| (profile.f)(x) * heat_solution(&rule, profile.f, x, s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_kernel_preserves_mass() {
        let f = |y: f64| crate::spectral::state::bump(&[y], &[0.0], 1.0);
        let inner = CompositeRule::new(-1.0, 1.0, 64, 24).unwrap();
        let outer = CompositeRule::new(-9.0, 9.0, 160, 24).unwrap();
        let mass0 = inner.integrate(f);
        let mass = outer.integrate(|x| heat_solution(&inner, &f, x, 0.3));
        assert!((mass - mass0).abs() < 1e-12 * mass0);
    }
}
