//! The discrete symmetries `Γ₀ … Γ₆` as (matrix, reflection, conjugation)
//! triples, and their anticommutators.

use std::sync::Arc;

use serde::Serialize;

use crate::dirac::GammaRep;
use crate::error::Result;
use crate::linalg::{max_abs, Mat, C64, I, ZERO};
use crate::spectral::{FieldSource, GridField, TorusGrid};
use crate::symmetry::catalog::discrete_generator;
use crate::symmetry::{random_plane_waves, Factor, SymmetryOp};

/// `ψ ↦ M · (ĉ^conj ψ)(Rx)` with `R` flipping the masked slots of `(t, x, y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteElement {
    pub matrix: Mat,
    pub mask: [bool; 4],
    pub conj: bool,
}

/// The metric the relations are compared against.
pub const ALGEBRA_METRIC: [f64; 7] = [1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0];

impl DiscreteElement {
    /// `Γ_μ = γ₄γ_μθ̂_μ`, `Γ₄ = iγ₄θ̂`, `Γ₅ = iγ₂ĉ`, `Γ₆ = iΓ₅`.
    pub fn basis(rep: &GammaRep, a: usize) -> Self {
        let mut mask = [false; 4];
        match a {
            0..=3 => {
                mask[a] = true;
                DiscreteElement {
                    matrix: &rep.gamma4 * rep.lower(a),
                    mask,
                    conj: false,
                }
            }
            4 => DiscreteElement {
                matrix: &rep.gamma4 * I,
                mask: [true; 4],
                conj: false,
            },
            5 => DiscreteElement {
                matrix: rep.lower(2) * I,
                mask,
                conj: true,
            },
            6 => DiscreteElement {
                matrix: rep.lower(2) * (I * I),
                mask,
                conj: true,
            },
            _ => panic!("discrete generators are indexed 0..=6"),
        }
    }

    /// `self ∘ other`; conjugation passes through `other`'s matrix.
    pub fn compose(&self, other: &DiscreteElement) -> DiscreteElement {
        let m2 = if self.conj {
            other.matrix.map(|z| z.conj())
        } else {
            other.matrix.clone()
        };
        let mut mask = self.mask;
        for (a, b) in mask.iter_mut().zip(other.mask) {
            *a ^= b;
        }
        DiscreteElement {
            matrix: &self.matrix * m2,
            mask,
            conj: self.conj ^ other.conj,
        }
    }

    pub fn is_pointwise(&self) -> bool {
        !self.conj && self.mask.iter().all(|m| !m)
    }

    pub fn to_symmetry(&self, name: &str, s: f64) -> SymmetryOp {
        let mut factors = vec![Factor::Matrix(self.matrix.clone())];
        if self.mask.iter().any(|&m| m) {
            factors.push(Factor::Reflect {
                mask: self.mask.to_vec(),
                s,
            });
        }
        if self.conj {
            factors.push(Factor::Conjugate);
        }
        SymmetryOp::new(name, factors)
    }
}

/// `{Γ_a, Γ_b}` as measured.
#[derive(Clone, Debug, Serialize)]
pub struct PairRelation {
    pub a: usize,
    pub b: usize,
    /// `λ` when the anticommutator is `λ I` (a pointwise multiple of the identity).
    pub scalar: Option<(f64, f64)>,
    /// Max entry of the anticommutator's matrix part.
    pub size: f64,
    /// Plane-wave evaluation against the symbolic result, relative.
    pub plane_wave_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub pairs: Vec<PairRelation>,
    /// `{Γ_a, Γ_a} / g_aa`.
    pub diagonal_constants: Vec<f64>,
    /// `c` in `{Γ_a, Γ_b} = c g_ab I`: the median of the diagonal constants.
    pub fitted_constant: f64,
    /// Pairs whose anticommutator is not `c g_ab I` for the fitted `c`.
    pub failures: Vec<(usize, usize)>,
}

impl AlgebraReport {
    pub fn pair(&self, a: usize, b: usize) -> &PairRelation {
        let (a, b) = (a.min(b), a.max(b));
        self.pairs
            .iter()
            .find(|p| p.a == a && p.b == b)
            .expect("all pairs present")
    }
}

fn scalar_part(m: &Mat) -> Option<C64> {
    let z = m[(0, 0)];
    let id = Mat::identity(m.nrows(), m.ncols()) * z;
    (max_abs(&(m - id)) < 1e-14).then_some(z)
}

const RELATION_TOLERANCE: f64 = 1e-12;

/// Evaluates every `{Γ_a, Γ_b}` symbolically and on plane-wave solutions.
pub fn check_discrete_algebra(rep: &GammaRep) -> Result<AlgebraReport> {
    let basis: Vec<DiscreteElement> = (0..7).map(|a| DiscreteElement::basis(rep, a)).collect();
    let grid = TorusGrid::cube(3, 8, 2.0 * std::f64::consts::PI)?;
    let l = crate::operators::dirac_with(rep, 1.0);
    let psi: Arc<dyn FieldSource> = Arc::new(random_plane_waves(&l, &grid, 6, 2, 0x5eed)?);
    let t = 0.37;

    let mut pairs = Vec::new();
    for a in 0..7 {
        for b in a..7 {
            let ab = basis[a].compose(&basis[b]);
            let ba = basis[b].compose(&basis[a]);
            let sum = DiscreteElement {
                matrix: &ab.matrix + &ba.matrix,
                mask: ab.mask,
                conj: ab.conj,
            };
            let size = max_abs(&sum.matrix);
            let scalar = if size < 1e-14 {
                Some(ZERO)
            } else if sum.is_pointwise() {
                scalar_part(&sum.matrix)
            } else {
                None
            };
            // the catalogue generators applied twice, against the symbolic sum
            let ga = discrete_generator(rep, a, 0.0);
            let gb = discrete_generator(rep, b, 0.0);
            let lhs = |g: SymmetryOp| -> Result<GridField> { g.apply(psi.clone()).sample(t, 0, &[0, 0, 0]) };
            let mut got = lhs(ga.then_apply(&gb))?;
            got.add_assign(&lhs(gb.then_apply(&ga))?);
            let want = lhs(sum.to_symmetry("sum", 0.0))?;
            let mut diff = got.clone();
            diff.add_assign(&want.scale(-crate::linalg::ONE));
            let scale = psi.sample(t, 0, &[0, 0, 0])?.max_abs().max(1e-300);
            pairs.push(PairRelation {
                a,
                b,
                scalar: scalar.map(|z| (z.re, z.im)),
                size,
                plane_wave_residual: diff.max_abs() / scale,
            });
        }
    }

    let mut diagonal = Vec::new();
    for a in 0..7 {
        let p = pairs.iter().find(|p| p.a == a && p.b == a).expect("diagonal");
        diagonal.push(p.scalar.map_or(f64::NAN, |z| z.0) / ALGEBRA_METRIC[a]);
    }
    let mut sorted = diagonal.clone();
    sorted.sort_by(f64::total_cmp);
    let fitted = sorted[sorted.len() / 2];
    let failures = pairs
        .iter()
        .filter(|p| {
            let expect = if p.a == p.b { fitted * ALGEBRA_METRIC[p.a] } else { 0.0 };
            match p.scalar {
                Some((re, im)) => (re - expect).abs() > RELATION_TOLERANCE || im.abs() > RELATION_TOLERANCE,
                None => true,
            }
        })
        .map(|p| (p.a, p.b))
        .collect();
    Ok(AlgebraReport {
        pairs,
        diagonal_constants: diagonal,
        fitted_constant: fitted,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma5_squares_to_identity() {
        // (iγ₂ĉ)²ψ = iγ₂(iγ₂ψ*)* = γ₂γ₂*ψ
        let rep = GammaRep::dirac();
        let g2 = rep.lower(2);
        let direct = &g2 * g2.map(|z| z.conj());
        assert_eq!(direct, Mat::identity(4, 4));
        let g5 = DiscreteElement::basis(&rep, 5);
        let sq = g5.compose(&g5);
        assert!(sq.is_pointwise());
        assert_eq!(sq.matrix, Mat::identity(4, 4));
    }

    #[test]
    fn report_matches_plane_waves() {
        let rep = check_discrete_algebra(&GammaRep::dirac()).unwrap();
        assert_eq!(rep.pairs.len(), 28);
        for p in &rep.pairs {
            assert!(p.plane_wave_residual < 1e-12, "{p:?}");
        }
        assert_eq!(rep.pair(1, 2).scalar, Some((0.0, 0.0)));
        assert_eq!(rep.pair(5, 5).scalar, Some((2.0, 0.0)));
        assert_eq!(rep.pair(4, 4).scalar, Some((-2.0, 0.0)));
        assert_eq!(rep.fitted_constant, -2.0);
        // Γ₅, Γ₆ square to +I and fail to anticommute with Γ₀ … Γ₄
        assert!(rep.failures.contains(&(5, 5)) && rep.failures.contains(&(0, 5)));
        assert!(!rep.failures.contains(&(5, 6)) && !rep.failures.contains(&(1, 2)));
    }
}
