//! Formal adjoints and semi-conjugacy factorizations `L* = A₂ (P L P) A₁⁻¹`.
//!
//! `P` reflects the variables selected by a parity mask. For a term `M D_α`
//! the factorization requires
//!
//! ```text
//! (−1)^{|α|_free} M† A₁ = A₂ M
//! ```
//!
//! where `|α|_free` counts only the unmasked slots. The full mask gives the
//! plain relation `M† = A₂ M A₁⁻¹`; the empty mask the fully signed one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, condition_number, dagger, inverse, max_abs, null_space, Mat, C64, ZERO};
use crate::opcore::{MultiIndex, Operator};

pub const DEFAULT_CONDITION_LIMIT: f64 = 1e8;
pub const DEFAULT_SAMPLES: usize = 64;
pub const PAIR_TOLERANCE: f64 = 1e-10;

/// `L* = Σ_α (−1)^{|α|} (M^α)† D_α`.
pub fn formal_adjoint(l: &Operator) -> Operator {
    let (rows, cols) = l.shape();
    let terms = l.terms().map(|(alpha, m)| {
        let sign = if alpha.order() % 2 == 0 { 1.0 } else { -1.0 };
        (alpha.clone(), dagger(m) * C64::from(sign))
    });
    Operator::from_terms(l.nvars(), cols, rows, terms).expect("adjoint terms are consistent")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjointness {
    SelfAdjoint,
    SkewAdjoint,
    Neither,
}

impl std::fmt::Display for Adjointness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Adjointness::SelfAdjoint => "self-adjoint",
            Adjointness::SkewAdjoint => "skew-adjoint",
            Adjointness::Neither => "neither",
        })
    }
}

/// Exact comparison of `L*` with `±L`. The zero operator counts as self-adjoint.
pub fn classify_adjointness(l: &Operator) -> Result<Adjointness> {
    if !l.is_square() {
        return Err(Error::Shape("adjointness needs a square operator".into()));
    }
    let adj = formal_adjoint(l);
    Ok(if adj == *l {
        Adjointness::SelfAdjoint
    } else if adj == l.neg() {
        Adjointness::SkewAdjoint
    } else {
        Adjointness::Neither
    })
}

/// `(−1)` raised to the order of `alpha` on the slots not in `mask`.
pub fn free_sign(alpha: &MultiIndex, mask: &[bool]) -> f64 {
    let free: Vec<bool> = mask.iter().map(|m| !m).collect();
    alpha.reflection_sign(&free)
}

#[derive(Clone, Debug)]
pub struct ConjugacyPair {
    pub a1: Mat,
    pub a2: Mat,
    /// `mask[k]` is true when variable `k` is reflected by the parity factor.
    pub parity_mask: Vec<bool>,
}

impl ConjugacyPair {
    pub fn new(a1: Mat, a2: Mat, parity_mask: Vec<bool>) -> Self {
        ConjugacyPair { a1, a2, parity_mask }
    }

    /// Largest relative residual of `(−1)^{|α|_free} M† A₁ − A₂ M` over the terms.
    pub fn residual(&self, l: &Operator) -> f64 {
        let scale = max_abs(&self.a1).max(max_abs(&self.a2));
        l.terms()
            .map(|(alpha, m)| {
                let s = C64::from(free_sign(alpha, &self.parity_mask));
                let r = dagger(m) * &self.a1 * s - &self.a2 * m;
                max_abs(&r) / (max_abs(m) * scale)
            })
            .fold(0.0, f64::max)
    }

    pub fn verify(&self, l: &Operator, tol: f64, cond_limit: f64) -> Result<()> {
        if self.parity_mask.len() != l.nvars() {
            return Err(Error::Shape("parity mask length differs from nvars".into()));
        }
        let res = self.residual(l);
        if res > tol {
            return Err(Error::Verification {
                what: "semi-conjugacy relation".into(),
                residual: res,
                tolerance: tol,
            });
        }
        let cond = condition_number(&self.a1).max(condition_number(&self.a2));
        if !(cond < cond_limit) {
            return Err(Error::Verification {
                what: "conjugator condition number".into(),
                residual: cond,
                tolerance: cond_limit,
            });
        }
        Ok(())
    }

    pub fn mask_label(&self) -> String {
        mask_label(&self.parity_mask)
    }
}

pub fn mask_label(mask: &[bool]) -> String {
    let names: Vec<String> = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(k, _)| slot_name(k, mask.len()))
        .collect();
    format!("{{{}}}", names.join(","))
}

pub fn slot_name(k: usize, nvars: usize) -> String {
    match (k, nvars) {
        (0, _) => "t".into(),
        (1, 2) => "x".into(),
        (k, 3 | 4) if k <= 3 => ["x", "y", "z"][k - 1].into(),
        (k, _) => format!("x{k}"),
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub seed: u64,
    pub samples: usize,
    pub condition_limit: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            samples: DEFAULT_SAMPLES,
            condition_limit: DEFAULT_CONDITION_LIMIT,
        }
    }
}

/// Stacks the relations for every term as a linear system in `(vec A₁, vec A₂)`.
fn conjugacy_system(l: &Operator, mask: &[bool]) -> Mat {
    let m = l.shape().0;
    let id = Mat::identity(m, m);
    let n = m * m;
    let mut sys = Mat::zeros(n * l.num_terms(), 2 * n);
    for (row, (alpha, coeff)) in l.terms().enumerate() {
        let s = C64::from(free_sign(alpha, mask));
        // column-major vec: vec(X A) = (I ⊗ X) vec A, vec(A X) = (Xᵀ ⊗ I) vec A
        let left = id.kronecker(&dagger(coeff)) * s;
        let right = -coeff.transpose().kronecker(&id);
        sys.view_mut((row * n, 0), (n, n)).copy_from(&left);
        sys.view_mut((row * n, n), (n, n)).copy_from(&right);
    }
    sys
}

fn split_pair(v: &[C64], m: usize) -> (Mat, Mat) {
    let n = m * m;
    (
        Mat::from_column_slice(m, m, &v[..n]),
        Mat::from_column_slice(m, m, &v[n..]),
    )
}

/// Scales the pair so the first largest-modulus entry of `A₁` equals 1.
fn normalize(a1: Mat, a2: Mat) -> (Mat, Mat) {
    let mut best = ZERO;
    for z in a1.iter() {
        if z.norm() > best.norm() * (1.0 + 1e-12) {
            best = *z;
        }
    }
    if best == ZERO {
        return (a1, a2);
    }
    let s = best.inv();
    (a1 * s, a2 * s)
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Solves the relations for a fixed mask.
///
/// `A₁ = I` is tried first; otherwise random elements of the solution space
/// are drawn until both matrices are well conditioned.
pub fn semi_conjugacy_with_mask(
    l: &Operator,
    mask: &[bool],
    cfg: &SolverConfig,
) -> Result<ConjugacyPair> {
    if !l.is_square() {
        return Err(Error::Shape("semi-conjugacy needs a square operator".into()));
    }
    let m = l.shape().0;
    let sys = conjugacy_system(l, mask);
    let basis = null_space(&sys, 1e-10);
    if basis.ncols() == 0 {
        return Err(Error::NotFound(format!(
            "only the trivial solution with parity {}",
            mask_label(mask)
        )));
    }
    let accept = |a1: &Mat, a2: &Mat| {
        condition_number(a1) < cfg.condition_limit && condition_number(a2) < cfg.condition_limit
    };

    // A₁ = I: least-squares A₂ from A₂ [M …] = [s M† …].
    let t = l.num_terms();
    let mut mcat = Mat::zeros(m, m * t);
    let mut bcat = Mat::zeros(m, m * t);
    for (k, (alpha, coeff)) in l.terms().enumerate() {
        let s = C64::from(free_sign(alpha, mask));
        mcat.view_mut((0, k * m), (m, m)).copy_from(coeff);
        bcat.view_mut((0, k * m), (m, m)).copy_from(&(dagger(coeff) * s));
    }
    if let Ok(pinv) = mcat.pseudo_inverse(1e-12) {
        let a1 = Mat::identity(m, m);
        let a2 = bcat * pinv;
        if accept(&a1, &a2) {
            let pair = ConjugacyPair::new(a1, a2, mask.to_vec());
            if pair.residual(l) <= 1e-13 {
                return Ok(pair);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.samples {
        let coeffs: Vec<C64> = (0..basis.ncols()).map(|_| random_c64(&mut rng)).collect();
        let cv = Mat::from_column_slice(basis.ncols(), 1, &coeffs);
        let v = &basis * cv;
        let (a1, a2) = split_pair(v.as_slice(), m);
        if accept(&a1, &a2) {
            let (a1, a2) = normalize(a1, a2);
            return Ok(ConjugacyPair::new(a1, a2, mask.to_vec()));
        }
    }
    Err(Error::NotFound(format!(
        "{} samples from a {}-dimensional solution space were singular (parity {})",
        cfg.samples,
        basis.ncols(),
        mask_label(mask)
    )))
}

/// All parity masks on `nvars` variables, fewest reflections first.
pub fn masks_by_size(nvars: usize) -> Vec<Vec<bool>> {
    let mut bits: Vec<u32> = (0..(1u32 << nvars)).collect();
    bits.sort_by_key(|b| (b.count_ones(), *b));
    bits.into_iter()
        .map(|b| (0..nvars).map(|k| b & (1 << k) != 0).collect())
        .collect()
}

/// Searches parity masks in order of size and returns the first pair found.
pub fn semi_conjugacy_solve(l: &Operator, cfg: &SolverConfig) -> Result<ConjugacyPair> {
    let mut last = None;
    for mask in masks_by_size(l.nvars()) {
        match semi_conjugacy_with_mask(l, &mask, cfg) {
            Ok(pair) => return Ok(pair),
            Err(e @ Error::NotFound(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NotFound("operator has no terms".into())))
}

/// Conjugators from a unitary Clifford representation: `A₁ = A₂ = γ⁰`.
///
/// `gammas[0]` must be Hermitian and square to `I`; the others anti-Hermitian,
/// squaring to `−I`, and every pair must anticommute.
pub fn clifford_conjugators(gammas: &[Mat]) -> Result<ConjugacyPair> {
    let Some(g0) = gammas.first() else {
        return Err(Error::Relations("no generators".into()));
    };
    let m = g0.nrows();
    let id = Mat::identity(m, m);
    for (a, ga) in gammas.iter().enumerate() {
        let eta = if a == 0 { 1.0 } else { -1.0 };
        let herm = if a == 0 { dagger(ga) - ga } else { dagger(ga) + ga };
        if max_abs(&herm) > 1e-12 {
            return Err(Error::Relations(format!("generator {a} has the wrong hermiticity")));
        }
        for (b, gb) in gammas.iter().enumerate().skip(a) {
            let expect = if a == b { &id * C64::from(2.0 * eta) } else { Mat::zeros(m, m) };
            if max_abs(&(ga * gb + gb * ga - expect)) > 1e-12 {
                return Err(Error::Relations(format!("anticommutator of {a} and {b}")));
            }
        }
        if max_abs(&(dagger(ga) - g0 * ga * g0)) > 1e-12 {
            return Err(Error::Relations(format!("generator {a} is not conjugated by the first")));
        }
    }
    Ok(ConjugacyPair::new(g0.clone(), g0.clone(), vec![false; gammas.len()]))
}

/// `L* = A₂ · P L P · A₁⁻¹`. Acting on fields, `P₂ = A₂ P` and `P₁ = P A₁⁻¹`.
#[derive(Clone, Debug)]
pub struct AdjointFactorization {
    pub pair: ConjugacyPair,
    pub a1_inv: Mat,
}

impl AdjointFactorization {
    pub fn mask(&self) -> &[bool] {
        &self.pair.parity_mask
    }

    pub fn has_parity(&self) -> bool {
        self.pair.parity_mask.iter().any(|&m| m)
    }

    /// `A₂ · P L P · A₁⁻¹` as an operator; equals `L*`.
    pub fn reconstruct(&self, l: &Operator) -> Operator {
        l.reflected(&self.pair.parity_mask)
            .left_mul(&self.pair.a2)
            .and_then(|op| op.right_mul(&self.a1_inv))
            .expect("square shapes")
    }

    /// Max relative residual of `symbol(L*)(k) − A₂ symbol(L)(σk) A₁⁻¹` over
    /// `count` random real wavevectors.
    pub fn symbol_residual(&self, l: &Operator, count: usize, seed: u64) -> f64 {
        let adj = formal_adjoint(l);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..count {
            let k: Vec<f64> = (0..l.nvars()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let sk: Vec<f64> = k
                .iter()
                .zip(&self.pair.parity_mask)
                .map(|(x, &m)| if m { -x } else { *x })
                .collect();
            let lhs = adj.symbol_real(&k);
            let rhs = &self.pair.a2 * l.symbol_real(&sk) * &self.a1_inv;
            let scale = max_abs(&lhs).max(1.0);
            worst = worst.max(max_abs(&(lhs - rhs)) / scale);
        }
        worst
    }
}

/// Builds the factorization and checks the symbol identity on 50 wavevectors.
pub fn adjoint_factorization(l: &Operator, pair: ConjugacyPair) -> Result<AdjointFactorization> {
    pair.verify(l, PAIR_TOLERANCE, DEFAULT_CONDITION_LIMIT)?;
    let a1_inv = inverse(&pair.a1)
        .ok_or_else(|| Error::NotFound("first conjugator is singular".into()))?;
    let fact = AdjointFactorization { pair, a1_inv };
    let res = fact.symbol_residual(l, 50, 0x5eed);
    if res > PAIR_TOLERANCE {
        return Err(Error::Verification {
            what: "adjoint symbol identity".into(),
            residual: res,
            tolerance: PAIR_TOLERANCE,
        });
    }
    Ok(fact)
}

/// Solve and factorize in one step.
pub fn factorize(l: &Operator, cfg: &SolverConfig) -> Result<AdjointFactorization> {
    adjoint_factorization(l, semi_conjugacy_solve(l, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::GammaRep;
    use crate::linalg::{approx_eq, real_mat, I};
    use crate::operators;

    #[test]
    fn classification_of_catalogue_operators() {
        assert_eq!(
            classify_adjointness(&operators::wave(3)).unwrap(),
            Adjointness::SelfAdjoint
        );
        assert_eq!(
            classify_adjointness(&operators::kdv_kdv()).unwrap(),
            Adjointness::SkewAdjoint
        );
        assert_eq!(
            classify_adjointness(&operators::heat(1)).unwrap(),
            Adjointness::Neither
        );
    }

    #[test]
    fn heat_needs_time_parity() {
        let pair = semi_conjugacy_solve(&operators::heat(1), &SolverConfig::default()).unwrap();
        assert_eq!(pair.parity_mask, vec![true, false]);
        assert_eq!(pair.a1, Mat::identity(1, 1));
        assert!(approx_eq(&pair.a2, &Mat::identity(1, 1), 1e-14));
    }

    #[test]
    fn kdv_kdv_pair_is_signed_identity() {
        let pair = semi_conjugacy_solve(&operators::kdv_kdv(), &SolverConfig::default()).unwrap();
        assert_eq!(pair.parity_mask, vec![false, false]);
        assert!(approx_eq(&pair.a1, &Mat::identity(2, 2), 1e-12));
        assert!(approx_eq(&pair.a2, &-Mat::identity(2, 2), 1e-12));
    }

    #[test]
    fn dirac_pair_is_gamma0() {
        let l = operators::dirac(1.0);
        let pair = semi_conjugacy_solve(&l, &SolverConfig::default()).unwrap();
        let g0 = &GammaRep::dirac().gamma[0];
        assert!(!pair.parity_mask.iter().any(|&m| m));
        assert!(approx_eq(&pair.a1, g0, 1e-12));
        assert!(approx_eq(&pair.a2, g0, 1e-12));
        let fact = adjoint_factorization(&l, pair).unwrap();
        assert!(fact.reconstruct(&l).approx_eq(&formal_adjoint(&l), 1e-12));
    }

    #[test]
    fn jordan_swap_pair_verifies_with_full_parity() {
        let l = operators::jordan_2x2();
        let swap = real_mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let pair = ConjugacyPair::new(swap.clone(), swap, vec![true, true]);
        pair.verify(&l, 1e-14, 1e8).unwrap();
        let found = semi_conjugacy_solve(&l, &SolverConfig::default()).unwrap();
        adjoint_factorization(&l, found).unwrap();
    }

    #[test]
    fn clifford_toy_pair() {
        let s = crate::linalg::pauli();
        let p = clifford_conjugators(&[s[2].clone(), &s[0] * I]).unwrap();
        assert_eq!(p.a1, s[2]);
        assert!(clifford_conjugators(&[s[0].clone(), s[2].clone()]).is_err());
    }

    #[test]
    fn masks_are_ordered_by_size() {
        let masks = masks_by_size(2);
        assert_eq!(
            masks,
            vec![
                vec![false, false],
                vec![true, false],
                vec![false, true],
                vec![true, true]
            ]
        );
    }

    #[test]
    fn no_pair_for_one_plus_i_dxx() {
        // even in every slot, so no parity helps: a₁ = a₂ and a₁ = −a₂
        let l = crate::opcore::parse_operator("[[1]] + [[i]] * Dx^2").unwrap();
        assert!(matches!(
            semi_conjugacy_solve(&l, &SolverConfig::default()),
            Err(Error::NotFound(_))
        ));
    }
}
