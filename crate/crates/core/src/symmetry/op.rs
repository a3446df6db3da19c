use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Mat, C64, ZERO};
use crate::opcore::MultiIndex;
use crate::spectral::{FieldSource, GridField, TorusGrid};

/// `c₀ + Σ_v c_v x_v` over all variables, time first.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPoly {
    pub constant: C64,
    pub slopes: Vec<C64>,
}

impl LinearPoly {
    pub fn constant(nvars: usize, c: C64) -> Self {
        LinearPoly {
            constant: c,
            slopes: vec![ZERO; nvars],
        }
    }

    /// `c · x_v`.
    pub fn variable(nvars: usize, v: usize, c: C64) -> Self {
        let mut slopes = vec![ZERO; nvars];
        slopes[v] = c;
        LinearPoly {
            constant: ZERO,
            slopes,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.slopes.iter().all(|s| *s == ZERO)
    }

    pub fn has_spatial_weight(&self) -> bool {
        self.slopes.iter().skip(1).any(|s| *s != ZERO)
    }

    fn values(&self, grid: &TorusGrid, t: f64) -> Vec<C64> {
        (0..grid.len())
            .map(|p| {
                let x = grid.position(p);
                let mut v = self.constant + self.slopes[0] * t;
                for (d, xd) in x.iter().enumerate() {
                    v += self.slopes[d + 1] * xd;
                }
                v
            })
            .collect()
    }
}

/// One term `p(t, x) · M · D_α` of a differential factor.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffTerm {
    pub weight: LinearPoly,
    pub matrix: Mat,
    pub alpha: MultiIndex,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Matrix(Mat),
    /// `Σ p(t,x) M D_α` with `p` of degree at most one.
    Diff(Vec<DiffTerm>),
    /// Reflects the masked variables; time maps to `s − t`.
    Reflect { mask: Vec<bool>, s: f64 },
    Conjugate,
}

/// `Γ = F₁ F₂ ⋯ F_k`, applied to a field right to left.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryOp {
    pub name: String,
    pub factors: Vec<Factor>,
}

impl SymmetryOp {
    pub fn new(name: impl Into<String>, factors: Vec<Factor>) -> Self {
        SymmetryOp {
            name: name.into(),
            factors,
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", Vec::new())
    }

    pub fn matrix(name: impl Into<String>, m: Mat) -> Self {
        Self::new(name, vec![Factor::Matrix(m)])
    }

    /// `self ∘ other`.
    pub fn then_apply(&self, other: &SymmetryOp) -> SymmetryOp {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        SymmetryOp::new(format!("{}·{}", self.name, other.name), factors)
    }

    pub fn is_linear(&self) -> bool {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::Conjugate))
            .count()
            % 2
            == 0
    }

    /// Uses a position weight, so integrals need compact support.
    pub fn is_position_weighted(&self) -> bool {
        self.factors.iter().any(|f| match f {
            Factor::Diff(terms) => terms.iter().any(|t| t.weight.has_spatial_weight()),
            _ => false,
        })
    }

    pub fn reflects_time(&self) -> bool {
        self.factors
            .iter()
            .any(|f| matches!(f, Factor::Reflect { mask, .. } if mask[0]))
    }

    /// Replaces the time-reflection centre in every factor.
    pub fn with_center(&self, s: f64) -> SymmetryOp {
        let factors = self
            .factors
            .iter()
            .map(|f| match f {
                Factor::Reflect { mask, .. } => Factor::Reflect {
                    mask: mask.clone(),
                    s,
                },
                other => other.clone(),
            })
            .collect();
        SymmetryOp::new(self.name.clone(), factors)
    }

    pub fn apply(&self, inner: Arc<dyn FieldSource>) -> Applied {
        Applied {
            factors: self.factors.clone(),
            inner,
        }
    }
}

/// `Γ u` as a field source.
pub struct Applied {
    factors: Vec<Factor>,
    inner: Arc<dyn FieldSource>,
}

impl Applied {
    fn sample_from(&self, depth: usize, t: f64, n: u32, beta: &[u32]) -> Result<GridField> {
        let Some(factor) = self.factors.get(depth) else {
            return self.inner.sample(t, n, beta);
        };
        let grid = self.inner.grid();
        match factor {
            Factor::Matrix(m) => Ok(self.sample_from(depth + 1, t, n, beta)?.mat_mul(m)),
            Factor::Conjugate => Ok(self.sample_from(depth + 1, t, n, beta)?.conj()),
            Factor::Reflect { mask, s } => {
                if mask.len() != grid.dim() + 1 {
                    return Err(Error::Shape("reflection mask length differs from nvars".into()));
                }
                let tau = if mask[0] { s - t } else { t };
                let mut flips = if mask[0] { n } else { 0 };
                for (d, &b) in beta.iter().enumerate() {
                    if mask[d + 1] {
                        flips += b;
                    }
                }
                let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
                let f = self.sample_from(depth + 1, tau, n, beta)?;
                let axes = &mask[1..];
                let comps = f
                    .comps
                    .iter()
                    .map(|c| {
                        (0..grid.len())
                            .map(|p| c[grid.reflect_index(p, axes)] * sign)
                            .collect()
                    })
                    .collect();
                Ok(GridField { comps })
            }
            Factor::Diff(terms) => {
                let mut gamma = vec![n];
                gamma.extend_from_slice(beta);
                let mut out: Option<GridField> = None;
                for term in terms {
                    let base = term.alpha.as_slice();
                    let shifted = |g: &[u32]| -> (u32, Vec<u32>) {
                        let tot: Vec<u32> = g.iter().zip(base).map(|(a, b)| a + b).collect();
                        (tot[0], tot[1..].to_vec())
                    };
                    // Leibniz: ∂^γ(p f) = p ∂^γ f + Σ_v γ_v (∂_v p) ∂^{γ−e_v} f
                    let (tn, tb) = shifted(&gamma);
                    let f = self.sample_from(depth + 1, t, tn, &tb)?;
                    let mut acc = f.mat_mul(&term.matrix);
                    if !term.weight.is_constant() {
                        acc = acc.weight(&term.weight.values(grid, t));
                    } else {
                        acc = acc.scale(term.weight.constant);
                    }
                    for (v, &gv) in gamma.iter().enumerate() {
                        let slope = term.weight.slopes[v];
                        if gv == 0 || slope == ZERO {
                            continue;
                        }
                        let mut lowered = gamma.clone();
                        lowered[v] -= 1;
                        let (ln, lb) = shifted(&lowered);
                        let g = self.sample_from(depth + 1, t, ln, &lb)?;
                        acc.add_assign(&g.mat_mul(&term.matrix).scale(slope * f64::from(gv)));
                    }
                    match out.as_mut() {
                        Some(o) => o.add_assign(&acc),
                        None => out = Some(acc),
                    }
                }
                out.ok_or_else(|| Error::Invalid("empty differential factor".into()))
            }
        }
    }

    fn output_components(&self) -> usize {
        for f in &self.factors {
            match f {
                Factor::Matrix(m) => return m.nrows(),
                Factor::Diff(terms) => {
                    if let Some(t) = terms.first() {
                        return t.matrix.nrows();
                    }
                }
                _ => {}
            }
        }
        self.inner.components()
    }
}

impl FieldSource for Applied {
    fn grid(&self) -> &TorusGrid {
        self.inner.grid()
    }

    fn components(&self) -> usize {
        self.output_components()
    }

    fn sample(&self, t: f64, time_order: u32, spatial: &[u32]) -> Result<GridField> {
        self.sample_from(0, t, time_order, spatial)
    }

    fn support_tail(&self, t: f64) -> Result<Option<f64>> {
        // the widest time window touched by the chain
        let mut times = vec![t];
        for f in &self.factors {
            if let Factor::Reflect { mask, s } = f {
                if mask[0] {
                    times = times.iter().flat_map(|&x| [x, s - x]).collect();
                }
            }
        }
        let mut worst: Option<f64> = None;
        for tt in times {
            if let Some(v) = self.inner.support_tail(tt)? {
                worst = Some(worst.map_or(v, |w: f64| w.max(v)));
            }
        }
        Ok(worst)
    }
}

/// `p(t,x)·M·D_α` with `p` constant.
pub fn const_term(nvars: usize, c: C64, matrix: Mat, alpha: MultiIndex) -> DiffTerm {
    DiffTerm {
        weight: LinearPoly::constant(nvars, c),
        matrix,
        alpha,
    }
}

/// `c·x_v·M·D_α`.
pub fn weighted_term(nvars: usize, v: usize, c: C64, matrix: Mat, alpha: MultiIndex) -> DiffTerm {
    DiffTerm {
        weight: LinearPoly::variable(nvars, v, c),
        matrix,
        alpha,
    }
}

