//! Finite-mode Fock space for the free Dirac field on a symmetric momentum
//! lattice, with `κ₀` and `κ₄₅` as explicit operators.
//!
//! Ladder operators are built with the Jordan–Wigner sign string: mode `j`
//! is bit `j` of the basis index and `c_j|n⟩ = (−1)^{Σ_{i<j} n_i}|n − e_j⟩`.
//! The continuum `(2π)³δ³(p − q)` becomes a Kronecker delta.

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::Serialize;

use crate::dirac::spinor::{bar_contract, energy, neg, prime, PlaneWaveSpinor};
use crate::dirac::GammaRep;
use crate::error::{Error, Result};
use crate::linalg::{r, Mat, C64, ONE, ZERO};

pub type FockOp = CsrMatrix<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Species {
    Particle,
    Antiparticle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mode {
    pub species: Species,
    pub momentum: usize,
    /// `0, 1` for the printed labels `1, 2`.
    pub spin: usize,
}

pub const MAX_MODES: usize = 12;
const MOMENTUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FockSystem {
    pub momenta: Vec<[f64; 3]>,
    pub mass: f64,
    pub modes: Vec<Mode>,
    annihilators: Vec<FockOp>,
}

fn ladder(n_modes: usize, j: usize) -> FockOp {
    let dim = 1usize << n_modes;
    let mut coo = CooMatrix::new(dim, dim);
    for n in 0..dim {
        if n & (1 << j) != 0 {
            let below = (n & ((1 << j) - 1)).count_ones();
            let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
            coo.push(n ^ (1 << j), n, r(sign));
        }
    }
    CsrMatrix::from(&coo)
}

pub fn identity_op(dim: usize) -> FockOp {
    CsrMatrix::identity(dim)
}

pub fn zero_op(dim: usize) -> FockOp {
    CsrMatrix::zeros(dim, dim)
}

pub fn dagger_op(a: &FockOp) -> FockOp {
    let mut t = a.transpose();
    for v in t.values_mut() {
        *v = v.conj();
    }
    t
}

pub fn max_norm(a: &FockOp) -> f64 {
    a.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &FockOp, b: &FockOp) -> FockOp {
    a * b - b * a
}

pub fn anticommutator(a: &FockOp, b: &FockOp) -> FockOp {
    a * b + b * a
}

pub fn apply(a: &FockOp, v: &[C64]) -> Vec<C64> {
    a.row_iter()
        .map(|row| {
            row.col_indices()
                .iter()
                .zip(row.values())
                .map(|(&j, x)| x * v[j])
                .sum()
        })
        .collect()
}

/// Least-squares `c` with `approx ≈ c·target`, and the max-norm residual.
pub fn fit_constant(target: &FockOp, approx: &FockOp) -> (C64, f64) {
    let dense = |m: &FockOp| {
        let mut out = vec![ZERO; m.nrows() * m.ncols()];
        for (i, j, v) in m.triplet_iter() {
            out[i * m.ncols() + j] += v;
        }
        out
    };
    let (t, a) = (dense(target), dense(approx));
    let tt: f64 = t.iter().map(|x| x.norm_sqr()).sum();
    if tt == 0.0 {
        return (ZERO, a.iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    let c: C64 = t.iter().zip(&a).map(|(x, y)| x.conj() * y).sum::<C64>() / tt;
    let res = t
        .iter()
        .zip(&a)
        .map(|(x, y)| (y - c * x).norm())
        .fold(0.0, f64::max);
    (c, res)
}

impl FockSystem {
    /// Two species × two spins per momentum.
    pub fn new(momenta: Vec<[f64; 3]>, mass: f64) -> Result<Self> {
        let n = 4 * momenta.len();
        if momenta.is_empty() || n > MAX_MODES {
            return Err(Error::Invalid(format!(
                "{} momenta give {n} modes; between 4 and {MAX_MODES} are supported",
                momenta.len()
            )));
        }
        if mass <= 0.0 {
            return Err(Error::Invalid("mass must be positive".into()));
        }
        let mut modes = Vec::new();
        for species in [Species::Particle, Species::Antiparticle] {
            for momentum in 0..momenta.len() {
                for spin in 0..2 {
                    modes.push(Mode {
                        species,
                        momentum,
                        spin,
                    });
                }
            }
        }
        let annihilators = (0..n).map(|j| ladder(n, j)).collect();
        Ok(FockSystem {
            momenta,
            mass,
            modes,
            annihilators,
        })
    }

    /// `{p, −p}` with `p = (0.3, 0, 0.8)` and `m = 1`: 8 modes.
    pub fn default_lattice() -> Self {
        let p = [0.3, 0.0, 0.8];
        FockSystem::new(vec![p, neg(&p)], 1.0).expect("valid lattice")
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.modes.len()
    }

    pub fn energy(&self, k: usize) -> f64 {
        energy(&self.momenta[k], self.mass)
    }

    pub fn momentum_index(&self, p: &[f64; 3]) -> Option<usize> {
        self.momenta.iter().position(|q| {
            q.iter()
                .zip(p)
                .all(|(a, b)| (a - b).abs() <= MOMENTUM_TOLERANCE)
        })
    }

    /// Index of `−p_k`.
    pub fn partner(&self, k: usize) -> Option<usize> {
        self.momentum_index(&neg(&self.momenta[k]))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.momenta.len()).all(|k| self.partner(k).is_some())
    }

    fn index(&self, species: Species, k: usize, s: usize) -> usize {
        let base = match species {
            Species::Particle => 0,
            Species::Antiparticle => 2 * self.momenta.len(),
        };
        base + 2 * k + s % 2
    }

    pub fn a(&self, k: usize, s: usize) -> &FockOp {
        &self.annihilators[self.index(Species::Particle, k, s)]
    }

    pub fn b(&self, k: usize, s: usize) -> &FockOp {
        &self.annihilators[self.index(Species::Antiparticle, k, s)]
    }

    pub fn a_dag(&self, k: usize, s: usize) -> FockOp {
        dagger_op(self.a(k, s))
    }

    pub fn b_dag(&self, k: usize, s: usize) -> FockOp {
        dagger_op(self.b(k, s))
    }

    /// `Σ E_p (a†a + b†b)`.
    pub fn hamiltonian(&self) -> FockOp {
        let mut h = zero_op(self.dim());
        for k in 0..self.momenta.len() {
            let e = r(self.energy(k));
            for s in 0..2 {
                h = h + (&self.a_dag(k, s) * self.a(k, s)) * e;
                h = h + (&self.b_dag(k, s) * self.b(k, s)) * e;
            }
        }
        h
    }

    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[0] = ONE;
        v
    }

    /// Max-norm deviation of every `{c_i, c_j†}`, `{c_i, c_j}` from its
    /// canonical value.
    pub fn anticommutation_residual(&self) -> f64 {
        let id = identity_op(self.dim());
        let mut worst = 0.0f64;
        for (i, ci) in self.annihilators.iter().enumerate() {
            for (j, cj) in self.annihilators.iter().enumerate() {
                let mixed = anticommutator(ci, &dagger_op(cj));
                let mixed = if i == j { mixed - &id } else { mixed };
                worst = worst.max(max_norm(&mixed));
                worst = worst.max(max_norm(&anticommutator(ci, cj)));
            }
        }
        worst
    }
}

/// `Σ_p Σ_s (a_{−p}^{s†} b_p^s + b_{−p}^{s†} a_p^s)`.
pub fn build_kappa0(sys: &FockSystem) -> Result<FockOp> {
    if !sys.is_symmetric() {
        return Err(Error::AsymmetricLattice);
    }
    let mut k0 = zero_op(sys.dim());
    for k in 0..sys.momenta.len() {
        let mk = sys.partner(k).expect("symmetric lattice");
        for s in 0..2 {
            k0 = k0 + &sys.a_dag(mk, s) * sys.b(k, s);
            k0 = k0 + &sys.b_dag(mk, s) * sys.a(k, s);
        }
    }
    Ok(k0)
}

/// `(−1)^s` for the stored spin `s ∈ {0, 1}`, i.e. label `s + 1`.
pub fn spin_sign(s: usize) -> f64 {
    if s.is_multiple_of(2) {
        -1.0
    } else {
        1.0
    }
}

/// `Σ_p Σ_s (−1)^s (a_p^{s†} a_p^{s+1} + b_p^{s+1†} b_p^s)`.
pub fn build_kappa45(sys: &FockSystem) -> FockOp {
    let mut k = zero_op(sys.dim());
    for p in 0..sys.momenta.len() {
        for s in 0..2 {
            let t = (s + 1) % 2;
            let sign = r(spin_sign(s));
            k = k + (&sys.a_dag(p, s) * sys.a(p, t)) * sign;
            k = k + (&sys.b_dag(p, t) * sys.b(p, s)) * sign;
        }
    }
    k
}

/// `Σ_p (1/2E_p) Σ_{r,s} (a_p^{r†} ū_r(p) + b_{−p}^r v̄_r(−p)) M (a_q^s u_s(q) + b_{−q}^{s†} v_s(−q))`
/// with `q = shift(p)`: the lattice form of `∫ψ̄(…) M ψ dx` after the
/// spatial integral.
fn quantize(sys: &FockSystem, m: &Mat, shift: fn(&[f64; 3]) -> [f64; 3]) -> Result<FockOp> {
    if !sys.is_symmetric() {
        return Err(Error::AsymmetricLattice);
    }
    let rep = GammaRep::dirac();
    let mut out = zero_op(sys.dim());
    for k in 0..sys.momenta.len() {
        let p = sys.momenta[k];
        let q = shift(&p);
        let kq = sys.momentum_index(&q).ok_or_else(|| {
            Error::Invalid(format!("shifted momentum {q:?} is not on the lattice"))
        })?;
        let mk = sys.partner(k).expect("symmetric lattice");
        let mq = sys.partner(kq).expect("symmetric lattice");
        let wp = PlaneWaveSpinor::new(p, sys.mass);
        let wmp = PlaneWaveSpinor::new(neg(&p), sys.mass);
        let wq = PlaneWaveSpinor::new(q, sys.mass);
        let wmq = PlaneWaveSpinor::new(neg(&q), sys.mass);
        let norm = r(1.0 / (2.0 * sys.energy(k).sqrt() * sys.energy(kq).sqrt()));
        for rr in 0..2 {
            let left = [(sys.a_dag(k, rr), wp.u(rr)), (sys.b(mk, rr).clone(), wmp.v(rr))];
            for s in 0..2 {
                let right = [(sys.a(kq, s).clone(), wq.u(s)), (sys.b_dag(mq, s), wmq.v(s))];
                for (lo, ls) in &left {
                    for (ro, rs) in &right {
                        let c = bar_contract(&rep, ls, m, rs) * norm;
                        if c.norm() > 0.0 {
                            out = out + (lo * ro) * c;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `∫ψ̄(x,−y,z) γ²γ⁰γ⁴ ψ(x,y,z) dx` on the lattice; needs `p′` on the lattice.
pub fn quantize_kappa45(sys: &FockSystem) -> Result<FockOp> {
    let rep = GammaRep::dirac();
    let m = &rep.gamma[2] * &rep.gamma[0] * &rep.gamma4;
    quantize(sys, &m, prime)
}

/// `∫ψ̄(x) γ₄ ψ(x) dx` on the lattice at `t = 0`.
pub fn quantize_kappa0(sys: &FockSystem) -> Result<FockOp> {
    quantize(sys, &GammaRep::dirac().gamma4, |p| *p)
}

#[derive(Clone, Debug, Serialize)]
pub struct Rederivation {
    /// `c` with `quantized ≈ c · build_kappa45`.
    pub constant: (f64, f64),
    pub residual: f64,
}

/// Re-derives the ladder form of `κ₄₅` from the mode expansion and compares
/// it with [`build_kappa45`].
pub fn rederive_kappa45(sys: &FockSystem) -> Result<Rederivation> {
    let q = quantize_kappa45(sys)?;
    let (c, residual) = fit_constant(&build_kappa45(sys), &q);
    Ok(Rederivation {
        constant: (c.re, c.im),
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FockReport {
    pub modes: usize,
    pub dim: usize,
    pub anticommutation: f64,
    pub hamiltonian_hermitian: f64,
    pub vacuum_energy: f64,
    pub h_kappa0: f64,
    pub h_kappa45: f64,
    pub kappa0_vacuum: f64,
    pub kappa45_vacuum: f64,
    /// `max ‖[κ₀, a_p^{s†}] − b_{−p}^{s†}‖`.
    pub kappa0_ladder: f64,
    pub rederivation: Option<Rederivation>,
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn fock_report(sys: &FockSystem) -> Result<FockReport> {
    let h = sys.hamiltonian();
    let k0 = build_kappa0(sys)?;
    let k45 = build_kappa45(sys);
    let vac = sys.vacuum();
    let mut ladder = 0.0f64;
    for k in 0..sys.momenta.len() {
        let mk = sys.partner(k).expect("symmetric lattice");
        for s in 0..2 {
            let d = commutator(&k0, &sys.a_dag(k, s)) - sys.b_dag(mk, s);
            ladder = ladder.max(max_norm(&d));
        }
    }
    let rederivation = match rederive_kappa45(sys) {
        Ok(d) => Some(d),
        Err(Error::Invalid(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(FockReport {
        modes: sys.num_modes(),
        dim: sys.dim(),
        anticommutation: sys.anticommutation_residual(),
        hamiltonian_hermitian: max_norm(&(&h - dagger_op(&h))),
        vacuum_energy: vec_norm(&apply(&h, &vac)),
        h_kappa0: max_norm(&commutator(&h, &k0)),
        h_kappa45: max_norm(&commutator(&h, &k45)),
        kappa0_vacuum: vec_norm(&apply(&k0, &vac)),
        kappa45_vacuum: vec_norm(&apply(&k45, &vac)),
        kappa0_ladder: ladder,
        rederivation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_sign_string() {
        // c_1 on |11⟩ picks up the sign of mode 0
        let c1 = ladder(2, 1);
        let out = apply(&c1, &[ZERO, ZERO, ZERO, ONE]);
        assert_eq!(out, vec![ZERO, -ONE, ZERO, ZERO]);
    }

    #[test]
    fn canonical_relations_exact() {
        let sys = FockSystem::default_lattice();
        assert_eq!(sys.dim(), 256);
        assert_eq!(sys.anticommutation_residual(), 0.0);
    }

    #[test]
    fn kappa_operators_commute_with_h() {
        let sys = FockSystem::default_lattice();
        let rep = fock_report(&sys).unwrap();
        assert!(rep.h_kappa0 < 1e-12, "{}", rep.h_kappa0);
        assert!(rep.h_kappa45 < 1e-12);
        assert_eq!(rep.kappa0_ladder, 0.0);
        assert_eq!(rep.kappa0_vacuum, 0.0);
        assert_eq!(rep.kappa45_vacuum, 0.0);
        assert_eq!(rep.vacuum_energy, 0.0);
        assert!(rep.hamiltonian_hermitian < 1e-15);
    }

    #[test]
    fn kappa45_on_one_particle_states() {
        let sys = FockSystem::default_lattice();
        let k45 = build_kappa45(&sys);
        let vac = sys.vacuum();
        for k in 0..2 {
            for s in 0..2 {
                let t = (s + 1) % 2;
                // a^{s†}|0⟩ ↦ (−1)^{s+1} a^{(s+1)†}|0⟩ in printed labels
                let state = apply(&sys.a_dag(k, s), &vac);
                let got = apply(&k45, &state);
                let want = apply(&sys.a_dag(k, t), &vac);
                let sign = spin_sign(t);
                assert!(got.iter().zip(&want).all(|(g, w)| (g - w * sign).norm() < 1e-15));
                // b^{s†}|0⟩ ↦ (−1)^s b^{(s+1)†}|0⟩
                let state = apply(&sys.b_dag(k, s), &vac);
                let got = apply(&k45, &state);
                let want = apply(&sys.b_dag(k, t), &vac);
                let sign = spin_sign(s);
                assert!(got.iter().zip(&want).all(|(g, w)| (g - w * sign).norm() < 1e-15));
            }
        }
    }

    #[test]
    fn asymmetric_lattice_rejected() {
        let sys = FockSystem::new(vec![[0.3, 0.0, 0.8], [0.1, 0.0, 0.0]], 1.0).unwrap();
        assert!(matches!(build_kappa0(&sys), Err(Error::AsymmetricLattice)));
        assert!(FockSystem::new(vec![[0.0; 3]; 4], 1.0).is_err());
    }

    #[test]
    fn rederived_kappa45_matches() {
        let sys = FockSystem::default_lattice();
        let d = rederive_kappa45(&sys).unwrap();
        assert!(d.residual < 1e-12, "{d:?}");
        assert!((d.constant.0).abs() < 1e-12 && (d.constant.1 + 1.0).abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn naive_kappa0_quantization_pairs_particles() {
        // the t = 0 quantization yields a†b† + ba pair terms
        let sys = FockSystem::default_lattice();
        let q = quantize_kappa0(&sys).unwrap();
        let mut pairs = zero_op(sys.dim());
        for k in 0..2 {
            let mk = sys.partner(k).unwrap();
            for s in 0..2 {
                pairs = pairs + &sys.a_dag(k, s) * &sys.b_dag(mk, s) + sys.a(k, s) * sys.b(mk, s);
            }
        }
        let (c, res) = fit_constant(&pairs, &q);
        assert!(res < 1e-12 && c.norm() > 0.1, "{c} {res}");
        let h = sys.hamiltonian();
        assert!(max_norm(&commutator(&h, &q)) > 1.0);
    }

    #[test]
    #[ignore = "the t = 0 quantization does not give the ladder form of κ₀; see naive_kappa0_quantization_pairs_particles"]
    fn kappa0_mode_expansion_consistency() {
        let sys = FockSystem::default_lattice();
        let (_, res) = fit_constant(&build_kappa0(&sys).unwrap(), &quantize_kappa0(&sys).unwrap());
        assert!(res < 1e-12);
    }
}
