//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Builds a complex matrix from real row data.
pub fn real_mat(rows: &[&[f64]]) -> Mat {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(nr, nc, |i, j| r(rows[i][j]))
}

pub fn complex_mat(rows: &[&[C64]]) -> Mat {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(nr, nc, |i, j| rows[i][j])
}

pub fn dagger(m: &Mat) -> Mat {
    m.adjoint()
}

/// Entries rounded to 12 decimals, for display.
pub fn rounded(m: &Mat) -> Mat {
    let f = |x: f64| (x * 1e12).round() / 1e12 + 0.0;
    m.map(|z| C64::new(f(z.re), f(z.im)))
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_zero(m: &Mat) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// Entrywise comparison with a relative tolerance on the larger max-norm.
/// `tol == 0.0` means exact equality.
pub fn approx_eq(a: &Mat, b: &Mat, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    if tol == 0.0 {
        return a == b;
    }
    let scale = max_abs(a).max(max_abs(b)).max(1.0);
    max_abs(&(a - b)) <= tol * scale
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &Mat) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    m.clone().try_inverse()
}

/// Orthonormal basis of the right null space of `a`, one column per vector.
///
/// Singular values at or below `rtol * σ_max` count as zero. The matrix is
/// padded with zero rows so the SVD exposes the full right singular basis.
pub fn null_space(a: &Mat, rtol: f64) -> Mat {
    let smax = singular_values(a).iter().cloned().fold(0.0, f64::max);
    null_space_abs(a, rtol * smax)
}

/// As [`null_space`] with an absolute cut on the singular values.
pub fn null_space_abs(a: &Mat, cut: f64) -> Mat {
    let (nr, nc) = a.shape();
    if nc == 0 {
        return Mat::zeros(0, 0);
    }
    let padded = if nr < nc {
        let mut p = Mat::zeros(nc, nc);
        p.view_mut((0, 0), (nr, nc)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let cols: Vec<Vector> = (0..sv.len())
        .filter(|&i| sv[i] <= cut)
        .map(|i| vt.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        Mat::zeros(nc, 0)
    } else {
        Mat::from_columns(&cols)
    }
}

/// Matrix exponential; scalar inputs take the exact path.
pub fn expm(a: &Mat) -> Mat {
    if a.nrows() == 1 {
        return Mat::from_element(1, 1, a[(0, 0)].exp());
    }
    a.clone().exp()
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Kronecker product.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Pauli matrices σ¹, σ², σ³.
pub fn pauli() -> [Mat; 3] {
    [
        real_mat(&[&[0.0, 1.0], &[1.0, 0.0]]),
        complex_mat(&[&[ZERO, -I], &[I, ZERO]]),
        real_mat(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let a = real_mat(&[&[1.0, 1.0, 0.0], &[2.0, 2.0, 0.0]]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&a * &ns)) < 1e-12);
    }

    #[test]
    fn scalar_expm_is_exact() {
        let a = Mat::from_element(1, 1, c(0.3, -2.0));
        assert_eq!(expm(&a)[(0, 0)], c(0.3, -2.0).exp());
    }

    #[test]
    fn condition_of_singular_is_infinite() {
        let a = real_mat(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(condition_number(&a).is_infinite());
    }
}
