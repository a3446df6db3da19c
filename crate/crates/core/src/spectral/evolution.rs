use rayon::prelude::*;

use super::grid::TorusGrid;
use crate::error::{Error, Result};
use crate::linalg::{expm, inverse, max_abs, Mat, C64, I, ONE};
use crate::opcore::Operator;

pub const DEFAULT_AMPLIFICATION_CAP: f64 = 1e6;

/// `L = Σ_{j ≤ r} T_j(D_x) D_t^j` rewritten as `w_t = A(D_x) w` on
/// `w = (u, u_t, …, ∂_t^{r−1} u)`.
#[derive(Clone, Debug)]
pub struct EvolutionForm {
    pub order: usize,
    pub components: usize,
    /// `T_j` for `j < r` with the time slot stripped.
    lower: Vec<Vec<(Vec<u32>, Mat)>>,
    leading_inv: Mat,
}

pub fn to_evolution_form(l: &Operator) -> Result<EvolutionForm> {
    if !l.is_square() {
        return Err(Error::Shape("evolution form needs a square operator".into()));
    }
    let m = l.shape().0;
    let r = l.time_order() as usize;
    if r == 0 {
        return Err(Error::NonInvertibleLeading("operator has no time derivative".into()));
    }
    let mut lower = vec![Vec::new(); r];
    let mut leading = Mat::zeros(m, m);
    for (alpha, coeff) in l.terms() {
        let j = alpha.time_order() as usize;
        if j == r {
            if !alpha.spatial().iter().all(|&e| e == 0) {
                return Err(Error::NonInvertibleLeading(format!(
                    "leading time coefficient depends on D_x (term {alpha})"
                )));
            }
            leading += coeff;
        } else {
            lower[j].push((alpha.spatial().to_vec(), coeff.clone()));
        }
    }
    let leading_inv = inverse(&leading)
        .ok_or_else(|| Error::NonInvertibleLeading("leading matrix is singular".into()))?;
    Ok(EvolutionForm {
        order: r,
        components: m,
        lower,
        leading_inv,
    })
}

impl EvolutionForm {
    pub fn state_size(&self) -> usize {
        self.order * self.components
    }

    /// `A(k)` for real spatial wavevector `k`.
    pub fn companion(&self, k: &[f64]) -> Mat {
        let m = self.components;
        let r = self.order;
        let mut a = Mat::zeros(m * r, m * r);
        for j in 0..r - 1 {
            a.view_mut((j * m, (j + 1) * m), (m, m))
                .copy_from(&Mat::identity(m, m));
        }
        for (j, terms) in self.lower.iter().enumerate() {
            let mut tj = Mat::zeros(m, m);
            for (beta, coeff) in terms {
                let mut w = ONE;
                for (kd, &e) in k.iter().zip(beta) {
                    w *= (I * kd).powu(e);
                }
                tj += coeff * w;
            }
            let block = -(&self.leading_inv * tj);
            a.view_mut(((r - 1) * m, j * m), (m, m)).copy_from(&block);
        }
        a
    }
}

/// Per-mode companion matrices on a grid.
#[derive(Clone, Debug)]
pub struct ModeSystem {
    pub form: EvolutionForm,
    pub grid: TorusGrid,
    pub matrices: Vec<Mat>,
    pub cap: f64,
}

impl ModeSystem {
    pub fn new(l: &Operator, grid: TorusGrid) -> Result<Self> {
        if l.nvars() != grid.dim() + 1 {
            return Err(Error::Shape(format!(
                "operator has {} variables but the grid is {}-dimensional",
                l.nvars(),
                grid.dim()
            )));
        }
        let form = to_evolution_form(l)?;
        let matrices = (0..grid.len())
            .into_par_iter()
            .map(|f| form.companion(&grid.wavevector(f)))
            .collect();
        Ok(ModeSystem {
            form,
            grid,
            matrices,
            cap: DEFAULT_AMPLIFICATION_CAP,
        })
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self
    }

    /// `e^{Δt A(k)}` for every mode; errors if any active mode grows beyond the cap.
    pub fn propagators(&self, dt: f64) -> Result<Vec<Mat>> {
        let props: Vec<Mat> = self
            .matrices
            .par_iter()
            .map(|a| expm(&(a * C64::from(dt))))
            .collect();
        let worst = props
            .iter()
            .enumerate()
            .filter(|(f, _)| self.grid.is_active(*f))
            .map(|(_, p)| max_abs(p))
            .fold(0.0, f64::max);
        if !(worst <= self.cap) {
            return Err(Error::Amplification {
                factor: worst,
                cap: self.cap,
                t: dt,
            });
        }
        Ok(props)
    }
}
