//! κ₀, κ₄₅ and angular momentum evaluated on spectral Dirac solutions.

use std::sync::Arc;

use crate::dirac::GammaRep;
use crate::error::{Error, Result};
use crate::linalg::{dagger, Mat, C64, I, ZERO};
use crate::reproduce::bundled_scenario;
use crate::scenario::{run, RunReport};
use crate::spectral::PlaneWave;

/// The continuum charges checked by [`continuum_kappa_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuumCharge {
    /// `Γ₀`: `κ₀ = ∫ψ̄(s−t, x)γ₄ψ(t, x)`.
    Kappa0,
    /// `Γ₄Γ₅`, polarized over two solutions.
    Cpt,
}

impl std::str::FromStr for ContinuumCharge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa0" | "Gamma0" => Ok(ContinuumCharge::Kappa0),
            "kappa45" | "cpt" | "CPT" => Ok(ContinuumCharge::Cpt),
            _ => Err(Error::Catalog(format!("continuum charge {s}"))),
        }
    }
}

/// Runs the bundled scenario for the charge; the negative control rides along
/// with `κ₀`.
pub fn continuum_kappa_check(which: ContinuumCharge) -> Result<RunReport> {
    let name = match which {
        ContinuumCharge::Kappa0 => "dirac_kappa0",
        ContinuumCharge::Cpt => "dirac_cpt",
    };
    run(&bundled_scenario(name)?)
}

/// `L₁, L₂, L₃` on a localized packet.
pub fn angular_momentum_check() -> Result<RunReport> {
    run(&bundled_scenario("dirac_angular")?)
}

/// `κ₀(t)` for `ψ = Σ_w v_w e^{λ_w t + i k·x}` (one shared `k`) on a box of
/// volume `vol`, summed mode by mode: `i·vol·Σ conj(a_w(s−t)) a_v(t) v̄_w γ₄ v_v`.
///
/// The characteristic is `Q = γ⁰Γ₀ψ(s−t) = −γ₄ψ(s−t)` against `X⁰ = Q†iγ⁰ψ`.
pub fn plane_wave_kappa0(waves: &[PlaneWave], vol: f64, s: f64, t: f64) -> C64 {
    let rep = GammaRep::dirac();
    let g04: Mat = &rep.gamma[0] * &rep.gamma4;
    let col = |w: &PlaneWave| Mat::from_column_slice(w.vector.len(), 1, &w.vector);
    let mut total = ZERO;
    for a in waves {
        for b in waves {
            let amp_a = (a.lambda * (s - t)).exp();
            let amp_b = (b.lambda * t).exp();
            let contraction = (dagger(&col(a)) * &g04 * col(b))[(0, 0)];
            total += amp_a.conj() * amp_b * contraction;
        }
    }
    total * I * vol
}

/// `w†γ⁰γ₄w` for one wave; vanishes for every Dirac plane wave.
pub fn self_contraction(w: &PlaneWave) -> C64 {
    let rep = GammaRep::dirac();
    let v = Mat::from_column_slice(w.vector.len(), 1, &w.vector);
    (dagger(&v) * &rep.gamma[0] * &rep.gamma4 * &v)[(0, 0)]
}

pub fn as_source(grid: &crate::spectral::TorusGrid, waves: Vec<PlaneWave>) -> Arc<crate::spectral::PlaneWaveSum> {
    Arc::new(crate::spectral::PlaneWaveSum {
        grid: grid.clone(),
        waves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjoint::{adjoint_factorization, clifford_conjugators};
    use crate::current::{adjoint_characteristic, concomitant_flux, KappaFunctional};
    use crate::dirac::spinor::{bar_contract, PlaneWaveSpinor};
    use crate::linalg::c;
    use crate::operators;
    use crate::spectral::{FieldSource, TorusGrid};
    use crate::symmetry::{kernel_sample, lookup_with_center};

    fn kappa_on(waves: Vec<PlaneWave>, grid: &TorusGrid, spec: &str, s: f64, t: f64) -> C64 {
        let l = operators::dirac(1.0);
        let rep = GammaRep::dirac();
        let fact = adjoint_factorization(&l, clifford_conjugators(&rep.gamma).unwrap()).unwrap();
        let flux = concomitant_flux(&l).unwrap();
        let g = lookup_with_center(spec, 4, 4, s).unwrap();
        let ch = adjoint_characteristic(&fact, g, s);
        let u: Arc<dyn FieldSource> = as_source(grid, waves);
        KappaFunctional::new(&flux, &ch, u).eval(t).unwrap()
    }

    #[test]
    fn single_wave_kappa0_vanishes() {
        // ū γ₄ u = 0 for the positive-energy spinors at any momentum
        let rep = GammaRep::dirac();
        let w = PlaneWaveSpinor::new([0.4, -1.0, 2.0], 1.0);
        for s in 0..2 {
            assert!(bar_contract(&rep, &w.u(s), &rep.gamma4, &w.u(s)).norm() < 1e-13);
            assert!(bar_contract(&rep, &w.v(s), &rep.gamma4, &w.v(s)).norm() < 1e-13);
        }
        let grid = TorusGrid::cube(3, 8, 2.0 * std::f64::consts::PI).unwrap();
        let k = grid.wavevector(grid.mode_index(&[1, 0, 2]).unwrap());
        for wave in kernel_sample(&operators::dirac(1.0), &k).unwrap() {
            assert!(self_contraction(&wave).norm() < 1e-13);
            let kappa = kappa_on(vec![wave], &grid, "dirac.Gamma0", 0.5, 0.3);
            assert!(kappa.norm() < 1e-10, "{kappa}");
        }
    }

    #[test]
    fn opposite_energy_pair_matches_closed_form() {
        let grid = TorusGrid::cube(3, 8, 2.0 * std::f64::consts::PI).unwrap();
        let k = grid.wavevector(grid.mode_index(&[0, -1, 1]).unwrap());
        let mut waves = kernel_sample(&operators::dirac(1.0), &k).unwrap();
        let amps = [c(0.7, -0.2), c(-0.3, 0.5), c(0.4, 0.9), c(1.1, 0.1)];
        for (w, a) in waves.iter_mut().zip(amps) {
            w.vector.iter_mut().for_each(|z| *z *= a);
        }
        let s = 0.8;
        let vol = grid.volume();
        let closed: Vec<C64> = [0.0, 0.35, 1.3]
            .iter()
            .map(|&t| plane_wave_kappa0(&waves, vol, s, t))
            .collect();
        // only the ±E cross terms survive, so the closed form is constant
        assert!(closed[0].norm() > 1e-3);
        for z in &closed {
            assert!((z - closed[0]).norm() < 1e-12 * closed[0].norm());
        }
        for (i, &t) in [0.0, 0.35, 1.3].iter().enumerate() {
            let got = kappa_on(waves.clone(), &grid, "dirac.Gamma0", s, t);
            assert!((got - closed[i]).norm() < 1e-10 * closed[i].norm(), "{got} vs {}", closed[i]);
        }
    }

    #[test]
    fn cpt_vanishes_on_a_single_solution() {
        // symmetric-bilinear with an antisymmetric matrix, so κ(t) = −κ(s−t)
        let rep = GammaRep::dirac();
        let m = &rep.gamma[2] * &rep.gamma4;
        assert!(crate::linalg::max_abs(&(&m + m.transpose())) < 1e-15);
        let grid = TorusGrid::cube(3, 8, 2.0 * std::f64::consts::PI).unwrap();
        let l = operators::dirac(1.0);
        let psi = crate::symmetry::random_plane_waves(&l, &grid, 4, 2, 11).unwrap();
        for t in [0.0, 0.4, 0.9] {
            let kappa = kappa_on(psi.waves.clone(), &grid, "dirac.CPT", 0.7, t);
            assert!(kappa.norm() < 1e-10, "{kappa}");
        }
    }
}
