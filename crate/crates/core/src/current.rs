//! Bilinear currents `X` with `Div X = Q†L[P] − (L*Q)†P`, and the conserved
//! functionals built from them.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::adjoint::{formal_adjoint, AdjointFactorization};
use crate::error::{Error, Result};
use crate::linalg::{Mat, C64, ONE, ZERO};
use crate::opcore::{MultiIndex, Operator};
use crate::spectral::{FieldSource, GridField};
use crate::symmetry::{Factor, Generator, SymmetryOp};

/// `c · conj(∂^a Q_i) · ∂^b P_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetKey {
    pub q_alpha: MultiIndex,
    pub q_index: usize,
    pub p_alpha: MultiIndex,
    pub p_index: usize,
}

/// A polynomial in the jets of `conj(Q)` and `P`, linear in each.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JetPoly {
    pub terms: BTreeMap<JetKey, C64>,
}

impl JetPoly {
    pub fn add_term(&mut self, key: JetKey, c: C64) {
        let e = self.terms.entry(key.clone()).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &JetPoly) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), *c);
        }
    }

    pub fn scale(&self, s: C64) -> JetPoly {
        let mut out = JetPoly::default();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total derivative `D_k`.
    pub fn total_derivative(&self, k: usize) -> JetPoly {
        let mut out = JetPoly::default();
        for (key, c) in &self.terms {
            let mut a = key.clone();
            a.q_alpha = a.q_alpha.with_incremented(k);
            out.add_term(a, *c);
            let mut b = key.clone();
            b.p_alpha = b.p_alpha.with_incremented(k);
            out.add_term(b, *c);
        }
        out
    }

    /// Evaluates with `q(i, α)` and `p(j, β)` returning jet values.
    pub fn eval(
        &self,
        q: &dyn Fn(usize, &MultiIndex) -> C64,
        p: &dyn Fn(usize, &MultiIndex) -> C64,
    ) -> C64 {
        self.terms
            .iter()
            .map(|(k, c)| c * q(k.q_index, &k.q_alpha).conj() * p(k.p_index, &k.p_alpha))
            .sum()
    }
}

/// `Π_L(Q, P) = Q†L[P] − (L*Q)†P` as a jet polynomial.
pub fn concomitant(l: &Operator) -> JetPoly {
    let nvars = l.nvars();
    let zero = MultiIndex::zero(nvars);
    let mut out = JetPoly::default();
    for (alpha, m) in l.terms() {
        let sign = if alpha.order() % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let c = m[(i, j)];
                if c == ZERO {
                    continue;
                }
                out.add_term(
                    JetKey {
                        q_alpha: zero.clone(),
                        q_index: i,
                        p_alpha: alpha.clone(),
                        p_index: j,
                    },
                    c,
                );
                out.add_term(
                    JetKey {
                        q_alpha: alpha.clone(),
                        q_index: i,
                        p_alpha: zero.clone(),
                        p_index: j,
                    },
                    -c * sign,
                );
            }
        }
    }
    out
}

/// Components `X⁰ … Xⁿ` of a current.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearFlux {
    pub components: Vec<JetPoly>,
}

impl BilinearFlux {
    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn divergence(&self) -> JetPoly {
        let mut out = JetPoly::default();
        for (k, x) in self.components.iter().enumerate() {
            out.add(&x.total_derivative(k));
        }
        out
    }

    /// `Div X − Π_L`; the zero polynomial for a correct current.
    pub fn defect(&self, l: &Operator) -> JetPoly {
        let mut d = self.divergence();
        d.add(&concomitant(l).scale(-ONE));
        d
    }

    /// Human-readable jet notation, one line per component.
    pub fn to_jet_string(&self) -> String {
        let mut s = String::new();
        for (k, x) in self.components.iter().enumerate() {
            let _ = writeln!(s, "X{k} = {}", jet_string(x, self.nvars()));
        }
        s
    }
}

fn deriv_suffix(alpha: &MultiIndex) -> String {
    let nvars = alpha.nvars();
    let mut s = String::new();
    for (k, &e) in alpha.as_slice().iter().enumerate() {
        let name = crate::adjoint::slot_name(k, nvars);
        for _ in 0..e {
            s.push_str(&name);
        }
    }
    if s.is_empty() {
        s
    } else {
        format!("_{s}")
    }
}

fn coeff_string(c: C64) -> String {
    let fmt = |x: f64| {
        if x.fract() == 0.0 && x.abs() < 1e15 {
            format!("{}", x as i64)
        } else {
            format!("{x}")
        }
    };
    match (c.re, c.im) {
        (re, im) if im == 0.0 => fmt(re),
        (re, im) if re == 0.0 => format!("{}i", fmt(im)),
        (re, im) => format!("({}{}{}i)", fmt(re), if im < 0.0 { "-" } else { "+" }, fmt(im.abs())),
    }
}

/// `conj(Q1_t)·P2_xx` style terms joined with signs.
pub fn jet_string(p: &JetPoly, _nvars: usize) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (k, c)) in p.terms.iter().enumerate() {
        let (sign, mag) = if c.im == 0.0 && c.re < 0.0 {
            ("-", -*c)
        } else {
            ("+", *c)
        };
        if i == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag != ONE {
            let _ = write!(out, "{}·", coeff_string(mag));
        }
        let _ = write!(
            out,
            "conj(Q{}{})·P{}{}",
            k.q_index + 1,
            deriv_suffix(&k.q_alpha),
            k.p_index + 1,
            deriv_suffix(&k.p_alpha)
        );
    }
    out
}

/// Integration by parts, always peeling the lowest-numbered variable first.
pub fn concomitant_flux(l: &Operator) -> Result<BilinearFlux> {
    if !l.is_square() {
        return Err(Error::Shape("the current needs a square operator".into()));
    }
    let nvars = l.nvars();
    let mut components = vec![JetPoly::default(); nvars];
    for (alpha, m) in l.terms() {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let c0 = m[(i, j)];
                if c0 == ZERO {
                    continue;
                }
                let mut a = MultiIndex::zero(nvars);
                let mut b = alpha.clone();
                let mut c = c0;
                while let Some(k) = b.lowest_slot() {
                    b = b.with_decremented(k).expect("nonzero slot");
                    components[k].add_term(
                        JetKey {
                            q_alpha: a.clone(),
                            q_index: i,
                            p_alpha: b.clone(),
                            p_index: j,
                        },
                        c,
                    );
                    a = a.with_incremented(k);
                    c = -c;
                }
            }
        }
    }
    Ok(BilinearFlux { components })
}

/// Builds `Q` from a solution: `Q = A₁ P (Γu)` or `Q = A₁ P w`, where `P`
/// reflects the factorization's masked variables (time about `s`).
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub generator: Generator,
    pub chain: SymmetryOp,
}

pub fn adjoint_characteristic(
    fact: &AdjointFactorization,
    generator: Generator,
    s: f64,
) -> Characteristic {
    let mut factors = vec![Factor::Matrix(fact.pair.a1.clone())];
    if fact.has_parity() {
        factors.push(Factor::Reflect {
            mask: fact.pair.parity_mask.clone(),
            s,
        });
    }
    if let Generator::Symmetry(g) = &generator {
        factors.extend(g.factors.iter().cloned());
    }
    Characteristic {
        chain: SymmetryOp::new(format!("Q[{}]", generator.name()), factors),
        generator,
    }
}

impl Characteristic {
    /// `Q` as a field, given the solution `u`.
    pub fn field(&self, u: Arc<dyn FieldSource>) -> Arc<dyn FieldSource> {
        match &self.generator {
            Generator::Symmetry(_) => Arc::new(self.chain.apply(u)),
            Generator::Kernel(k) => {
                let w: Arc<dyn FieldSource> = Arc::new(k.source(u.grid().clone()));
                Arc::new(self.chain.apply(w))
            }
        }
    }

    pub fn is_position_weighted(&self) -> bool {
        self.generator.is_position_weighted()
    }
}

/// `|L*[Q]| / |Q|` at time `t`; zero up to rounding when `Q` is an adjoint symmetry.
pub fn adjoint_residual(l: &Operator, q: &dyn FieldSource, t: f64) -> Result<f64> {
    let adj = formal_adjoint(l);
    let mut total = GridField::zeros(adj.shape().0, q.grid().len());
    let mut scale = 0.0f64;
    for (alpha, m) in adj.terms() {
        let f = q.sample(t, alpha.time_order(), alpha.spatial())?.mat_mul(m);
        scale = scale.max(f.max_abs());
        total.add_assign(&f);
    }
    Ok(if scale == 0.0 { 0.0 } else { total.max_abs() / scale })
}

/// Support limit for position-weighted integrands.
pub const TAIL_LIMIT: f64 = 1e-10;

/// `κ(t) = ∫ X⁰(Q[u], u) dx`.
pub struct KappaFunctional {
    pub density: JetPoly,
    pub q: Arc<dyn FieldSource>,
    pub u: Arc<dyn FieldSource>,
    pub position_weighted: bool,
}

impl KappaFunctional {
    pub fn new(flux: &BilinearFlux, ch: &Characteristic, u: Arc<dyn FieldSource>) -> Self {
        KappaFunctional {
            density: flux.components[0].clone(),
            q: ch.field(u.clone()),
            position_weighted: ch.is_position_weighted(),
            u,
        }
    }

    /// `∫X⁰(Q[v], u)`: the characteristic comes from a second solution `v`.
    pub fn polarized(
        flux: &BilinearFlux,
        ch: &Characteristic,
        v: Arc<dyn FieldSource>,
        u: Arc<dyn FieldSource>,
    ) -> Self {
        KappaFunctional {
            density: flux.components[0].clone(),
            q: ch.field(v),
            position_weighted: ch.is_position_weighted(),
            u,
        }
    }

    pub fn eval(&self, t: f64) -> Result<C64> {
        if self.position_weighted {
            for src in [&self.u, &self.q] {
                if let Some(tail) = src.support_tail(t)? {
                    if tail > TAIL_LIMIT {
                        return Err(Error::Support {
                            tail,
                            limit: TAIL_LIMIT,
                        });
                    }
                }
            }
        }
        let mut qs: HashMap<MultiIndex, GridField> = HashMap::new();
        let mut ps: HashMap<MultiIndex, GridField> = HashMap::new();
        let grid = self.u.grid();
        let mut total = ZERO;
        for (key, c) in &self.density.terms {
            if !qs.contains_key(&key.q_alpha) {
                let a = &key.q_alpha;
                qs.insert(a.clone(), self.q.sample(t, a.time_order(), a.spatial())?);
            }
            if !ps.contains_key(&key.p_alpha) {
                let b = &key.p_alpha;
                ps.insert(b.clone(), self.u.sample(t, b.time_order(), b.spatial())?);
            }
            let qf = &qs[&key.q_alpha].comps[key.q_index];
            let pf = &ps[&key.p_alpha].comps[key.p_index];
            let prod: Vec<C64> = qf.iter().zip(pf).map(|(a, b)| a.conj() * b).collect();
            total += c * grid.integrate(&prod);
        }
        Ok(total)
    }
}

/// `flux` and `char` combined against a solution.
pub fn conserved_functional(
    flux: &BilinearFlux,
    ch: &Characteristic,
    u: Arc<dyn FieldSource>,
) -> KappaFunctional {
    KappaFunctional::new(flux, ch, u)
}

/// `∫ f† M g dx` for two fields on the same grid.
pub fn inner_product(f: &GridField, m: &Mat, g: &GridField, cell: f64) -> C64 {
    let mg = g.mat_mul(m);
    let mut total = ZERO;
    for (a, b) in f.comps.iter().zip(&mg.comps) {
        total += a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>();
    }
    total * cell
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators;

    fn key(qa: &[u32], qi: usize, pa: &[u32], pj: usize) -> JetKey {
        JetKey {
            q_alpha: MultiIndex::new(qa.to_vec()),
            q_index: qi,
            p_alpha: MultiIndex::new(pa.to_vec()),
            p_index: pj,
        }
    }

    #[test]
    fn wave_current() {
        let x = concomitant_flux(&operators::wave(1)).unwrap();
        let mut x0 = JetPoly::default();
        x0.add_term(key(&[0, 0], 0, &[1, 0], 0), ONE);
        x0.add_term(key(&[1, 0], 0, &[0, 0], 0), -ONE);
        let mut x1 = JetPoly::default();
        x1.add_term(key(&[0, 0], 0, &[0, 1], 0), -ONE);
        x1.add_term(key(&[0, 1], 0, &[0, 0], 0), ONE);
        assert_eq!(x.components, vec![x0, x1]);
        assert!(x.defect(&operators::wave(1)).is_zero());
    }

    #[test]
    fn heat_current() {
        let l = operators::heat(1);
        let x = concomitant_flux(&l).unwrap();
        // X⁰ = QP, X¹ = Q_x P − Q P_x
        assert_eq!(x.components[0].terms.len(), 1);
        assert_eq!(x.components[0].terms[&key(&[0, 0], 0, &[0, 0], 0)], ONE);
        assert_eq!(x.components[1].terms[&key(&[0, 1], 0, &[0, 0], 0)], ONE);
        assert_eq!(x.components[1].terms[&key(&[0, 0], 0, &[0, 1], 0)], -ONE);
        assert!(x.defect(&l).is_zero());
        assert_eq!(
            x.to_jet_string(),
            "X0 = conj(Q1)·P1\nX1 = -conj(Q1)·P1_x + conj(Q1_x)·P1\n"
        );
    }

    #[test]
    fn adjoint_swap_antisymmetry() {
        let l = operators::jordan_2x2();
        let pl = concomitant(&l);
        let pa = concomitant(&formal_adjoint(&l));
        // Π_{L*}(P,Q) = −conj(Π_L(Q,P)): swap roles, conjugate coefficients
        let mut swapped = JetPoly::default();
        for (k, c) in &pa.terms {
            swapped.add_term(
                JetKey {
                    q_alpha: k.p_alpha.clone(),
                    q_index: k.p_index,
                    p_alpha: k.q_alpha.clone(),
                    p_index: k.q_index,
                },
                -c.conj(),
            );
        }
        assert_eq!(swapped, pl);
    }
}
