use crate::linalg::{max_abs, pauli, r, Mat, I};

/// Gamma matrices of `Cl_{1,3}(C)` with metric `η = diag(+,−,−,−)`.
#[derive(Clone, Debug)]
pub struct GammaRep {
    /// `γ⁰, γ¹, γ², γ³` (upper indices).
    pub gamma: [Mat; 4],
    /// `γ₄ = iγ⁰γ¹γ²γ³`.
    pub gamma4: Mat,
}

pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn block(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
    let mut m = Mat::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a);
    m.view_mut((0, 2), (2, 2)).copy_from(b);
    m.view_mut((2, 0), (2, 2)).copy_from(c);
    m.view_mut((2, 2), (2, 2)).copy_from(d);
    m
}

impl GammaRep {
    /// `γ⁰ = diag(I, −I)`, `γ^i = [[0, σ^i], [−σ^i, 0]]`.
    pub fn dirac() -> Self {
        let id = Mat::identity(2, 2);
        let z = Mat::zeros(2, 2);
        let [s1, s2, s3] = pauli();
        let g0 = block(&id, &z, &z, &(-&id));
        let gi = |s: &Mat| block(&z, s, &(-s), &z);
        let gamma = [g0, gi(&s1), gi(&s2), gi(&s3)];
        let gamma4 = &gamma[0] * &gamma[1] * &gamma[2] * &gamma[3] * I;
        GammaRep { gamma, gamma4 }
    }

    /// `γ_μ = η_{μν} γ^ν`.
    pub fn lower(&self, mu: usize) -> Mat {
        &self.gamma[mu] * r(ETA[mu])
    }

    /// `Σ_i = diag(σ_i, σ_i)`.
    pub fn spin(&self, i: usize) -> Mat {
        let s = &pauli()[i - 1];
        block(s, &Mat::zeros(2, 2), &Mat::zeros(2, 2), s)
    }

    /// `‖{γ^μ, γ^ν} − 2η^{μν} I‖_max` over all pairs.
    pub fn clifford_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = &self.gamma[mu] * &self.gamma[nu] + &self.gamma[nu] * &self.gamma[mu];
                let expect = if mu == nu {
                    Mat::identity(4, 4) * r(2.0 * ETA[mu])
                } else {
                    Mat::zeros(4, 4)
                };
                worst = worst.max(max_abs(&(ac - expect)));
            }
        }
        worst
    }

    /// `‖{γ₄, γ^μ}‖_max` over μ.
    pub fn gamma4_anticommutator_residual(&self) -> f64 {
        (0..4)
            .map(|mu| max_abs(&(&self.gamma4 * &self.gamma[mu] + &self.gamma[mu] * &self.gamma4)))
            .fold(0.0, f64::max)
    }
}

/// Levi-Civita symbol on `{1,2,3}`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dagger;

    #[test]
    fn clifford_relations_are_exact() {
        let g = GammaRep::dirac();
        assert_eq!(g.clifford_residual(), 0.0);
        assert_eq!(g.gamma4_anticommutator_residual(), 0.0);
    }

    #[test]
    fn hermiticity_pattern() {
        let g = GammaRep::dirac();
        assert_eq!(dagger(&g.gamma[0]), g.gamma[0]);
        for i in 1..4 {
            assert_eq!(dagger(&g.gamma[i]), -&g.gamma[i]);
            // [γ^i]† = γ⁰ γ^i γ⁰
            assert_eq!(dagger(&g.gamma[i]), &g.gamma[0] * &g.gamma[i] * &g.gamma[0]);
        }
        assert_eq!(dagger(&g.gamma4), g.gamma4);
        assert_eq!(&g.gamma4 * &g.gamma4, Mat::identity(4, 4));
    }

    #[test]
    fn gamma4_is_off_diagonal_identity() {
        let g = GammaRep::dirac();
        let expect = block(
            &Mat::zeros(2, 2),
            &Mat::identity(2, 2),
            &Mat::identity(2, 2),
            &Mat::zeros(2, 2),
        );
        assert_eq!(g.gamma4, expect);
    }
}
