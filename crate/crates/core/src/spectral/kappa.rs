use rayon::prelude::*;
use serde::Serialize;

use crate::current::KappaFunctional;
use crate::error::Result;
use crate::linalg::C64;

pub const DRIFT_EPSILON: f64 = 1e-300;

#[derive(Clone, Debug, Serialize)]
pub struct KappaSeries {
    pub times: Vec<f64>,
    pub values: Vec<(f64, f64)>,
    /// `max_t |κ(t) − κ(t₀)| / (|κ(t₀)| + ε)`.
    pub drift: f64,
}

impl KappaSeries {
    pub fn from_values(times: Vec<f64>, vals: Vec<C64>) -> Self {
        let k0 = vals.first().copied().unwrap_or_default();
        let drift = vals
            .iter()
            .map(|v| (v - k0).norm() / (k0.norm() + DRIFT_EPSILON))
            .fold(0.0, f64::max);
        KappaSeries {
            times,
            values: vals.iter().map(|v| (v.re, v.im)).collect(),
            drift,
        }
    }

    pub fn value(&self, i: usize) -> C64 {
        C64::new(self.values[i].0, self.values[i].1)
    }

    /// `t,re_kappa,im_kappa,drift` rows; drift is the running deviation.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,re_kappa,im_kappa,drift\n");
        let k0 = self.value(0);
        for (i, t) in self.times.iter().enumerate() {
            let v = self.value(i);
            let d = (v - k0).norm() / (k0.norm() + DRIFT_EPSILON);
            s.push_str(&format!("{t:.17e},{:.17e},{:.17e},{d:.17e}\n", v.re, v.im));
        }
        s
    }
}

/// Evaluates `κ` at each time; the first time is the reference.
pub fn kappa_series(functional: &KappaFunctional, times: &[f64]) -> Result<KappaSeries> {
    let vals: Vec<C64> = times
        .par_iter()
        .map(|&t| functional.eval(t))
        .collect::<Result<_>>()?;
    Ok(KappaSeries::from_values(times.to_vec(), vals))
}
