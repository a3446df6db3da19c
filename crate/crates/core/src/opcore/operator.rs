use std::collections::BTreeMap;

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::linalg::{approx_eq, is_zero, Mat, C64, I, ONE, ZERO};

/// `L = Σ_α M^α D_α` with `M^α` complex `rows × cols` matrices.
///
/// Terms are kept canonical: no zero matrices are stored, so structural
/// equality is operator equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    nvars: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<MultiIndex, Mat>,
}

impl Operator {
    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        Operator {
            nvars,
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    /// `I·D^0`.
    pub fn identity(nvars: usize, m: usize) -> Self {
        Self::monomial(Mat::identity(m, m), MultiIndex::zero(nvars))
    }

    pub fn monomial(matrix: Mat, alpha: MultiIndex) -> Self {
        let (rows, cols) = matrix.shape();
        let mut op = Self::zero(alpha.nvars(), rows, cols);
        op.insert(alpha, matrix);
        op
    }

    /// Scalar `c·D_α` on a 1×1 system.
    pub fn scalar(nvars: usize, coeff: C64, exponents: &[u32]) -> Self {
        assert_eq!(exponents.len(), nvars, "exponent count must equal nvars");
        Self::monomial(
            Mat::from_element(1, 1, coeff),
            MultiIndex::new(exponents.to_vec()),
        )
    }

    /// Sums duplicate multi-indices and drops zero matrices.
    pub fn from_terms<I2>(nvars: usize, rows: usize, cols: usize, terms: I2) -> Result<Self>
    where
        I2: IntoIterator<Item = (MultiIndex, Mat)>,
    {
        let mut op = Self::zero(nvars, rows, cols);
        for (alpha, m) in terms {
            if alpha.nvars() != nvars {
                return Err(Error::Shape(format!(
                    "multi-index {alpha} has {} slots, expected {nvars}",
                    alpha.nvars()
                )));
            }
            if m.shape() != (rows, cols) {
                return Err(Error::Shape(format!(
                    "term matrix is {:?}, expected {:?}",
                    m.shape(),
                    (rows, cols)
                )));
            }
            op.insert(alpha, m);
        }
        Ok(op)
    }

    /// Assembles a matrix operator from a grid of 1×1 operators.
    pub fn from_entries(entries: &[Vec<Operator>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let nvars = entries
            .first()
            .and_then(|r| r.first())
            .map_or(1, |e| e.nvars);
        let mut op = Self::zero(nvars, rows, cols);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape("ragged entry grid".into()));
            }
            for (j, e) in row.iter().enumerate() {
                if e.shape() != (1, 1) || e.nvars != nvars {
                    return Err(Error::Shape(format!("entry ({i},{j}) is not scalar")));
                }
                for (alpha, m) in &e.terms {
                    let mut big = Mat::zeros(rows, cols);
                    big[(i, j)] = m[(0, 0)];
                    op.insert(alpha.clone(), big);
                }
            }
        }
        Ok(op)
    }

    fn insert(&mut self, alpha: MultiIndex, m: Mat) {
        let merged = match self.terms.remove(&alpha) {
            Some(prev) => prev + m,
            None => m,
        };
        if !is_zero(&merged) {
            self.terms.insert(alpha, merged);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Mat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Option<&Mat> {
        self.terms.get(alpha)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.order()).max().unwrap_or(0)
    }

    /// Highest power of `D_t` appearing.
    pub fn time_order(&self) -> u32 {
        self.terms.keys().map(|a| a.time_order()).max().unwrap_or(0)
    }

    fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.shape() != other.shape() || self.nvars != other.nvars {
            return Err(Error::Shape(format!(
                "{:?} in {} vars vs {:?} in {} vars",
                self.shape(),
                self.nvars,
                other.shape(),
                other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (alpha, m) in &other.terms {
            out.insert(alpha.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Operator {
        self.scale(-ONE)
    }

    pub fn scale(&self, s: C64) -> Operator {
        let mut out = Self::zero(self.nvars, self.rows, self.cols);
        for (alpha, m) in &self.terms {
            out.insert(alpha.clone(), m * s);
        }
        out
    }

    /// `(M D_α)(N D_β) = (M N) D_{α+β}`, expanded bilinearly.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.cols != other.rows || self.nvars != other.nvars {
            return Err(Error::Shape(format!(
                "cannot compose {:?} with {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Self::zero(self.nvars, self.rows, other.cols);
        for (a, m) in &self.terms {
            for (b, n) in &other.terms {
                out.insert(a.add(b), m * n);
            }
        }
        Ok(out)
    }

    /// `L∘G − G∘L`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        if !self.is_square() || !other.is_square() {
            return Err(Error::Shape("commutator needs square operators".into()));
        }
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul(&self, a: &Mat) -> Result<Operator> {
        if a.ncols() != self.rows {
            return Err(Error::Shape("left factor has wrong width".into()));
        }
        let mut out = Self::zero(self.nvars, a.nrows(), self.cols);
        for (alpha, m) in &self.terms {
            out.insert(alpha.clone(), a * m);
        }
        Ok(out)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul(&self, a: &Mat) -> Result<Operator> {
        if a.nrows() != self.cols {
            return Err(Error::Shape("right factor has wrong height".into()));
        }
        let mut out = Self::zero(self.nvars, self.rows, a.ncols());
        for (alpha, m) in &self.terms {
            out.insert(alpha.clone(), m * a);
        }
        Ok(out)
    }

    /// For a scalar operator `ℓ`, the diagonal system `ℓ·I_m`.
    pub fn times_identity(&self, m: usize) -> Result<Operator> {
        if self.shape() != (1, 1) {
            return Err(Error::Shape("times_identity needs a scalar operator".into()));
        }
        let mut out = Self::zero(self.nvars, m, m);
        for (alpha, c) in &self.terms {
            out.insert(alpha.clone(), Mat::identity(m, m) * c[(0, 0)]);
        }
        Ok(out)
    }

    /// Substitutes `D_k → σ_k D_k` with `σ_k = −1` on masked slots, i.e. `P L P`.
    pub fn reflected(&self, mask: &[bool]) -> Operator {
        let mut out = Self::zero(self.nvars, self.rows, self.cols);
        for (alpha, m) in &self.terms {
            out.insert(alpha.clone(), m * C64::from(alpha.reflection_sign(mask)));
        }
        out
    }

    /// Fourier symbol `Σ_α M^α (ik)^α`, where `k = (ω, k₁, …, k_n)`.
    pub fn symbol(&self, k: &[C64]) -> Mat {
        assert_eq!(k.len(), self.nvars, "wavevector length must equal nvars");
        let ik: Vec<C64> = k.iter().map(|&kj| I * kj).collect();
        let mut out = Mat::zeros(self.rows, self.cols);
        for (alpha, m) in &self.terms {
            let mut w = ONE;
            for (slot, &e) in alpha.as_slice().iter().enumerate() {
                w *= ik[slot].powu(e);
            }
            if w != ZERO {
                out += m * w;
            }
        }
        out
    }

    pub fn symbol_real(&self, k: &[f64]) -> Mat {
        let kc: Vec<C64> = k.iter().map(|&x| C64::from(x)).collect();
        self.symbol(&kc)
    }

    /// Coefficient-wise comparison: exact when `tol == 0`.
    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        if self.shape() != other.shape() || self.nvars != other.nvars {
            return false;
        }
        if tol == 0.0 {
            return self == other;
        }
        let zero = Mat::zeros(self.rows, self.cols);
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            approx_eq(a, b, tol)
        })
    }

    /// The (i, j) entry as a scalar operator.
    pub fn entry(&self, i: usize, j: usize) -> Operator {
        let mut out = Self::zero(self.nvars, 1, 1);
        for (alpha, m) in &self.terms {
            out.insert(alpha.clone(), Mat::from_element(1, 1, m[(i, j)]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r, real_mat};

    fn dt() -> Operator {
        Operator::scalar(2, ONE, &[1, 0])
    }
    fn dx(p: u32) -> Operator {
        Operator::scalar(2, ONE, &[0, p])
    }

    #[test]
    fn additive_inverse_is_zero() {
        assert!(dt().add(&dt().neg()).unwrap().is_zero());
    }

    #[test]
    fn disjoint_terms_concatenate() {
        let kdv = dt().add(&dx(3)).unwrap().add(&dx(1)).unwrap();
        assert_eq!(kdv.num_terms(), 3);
        assert_eq!(kdv.order(), 3);
    }

    #[test]
    fn compose_adds_exponents() {
        assert_eq!(dx(1).compose(&dx(1)).unwrap(), dx(2));
    }

    #[test]
    fn shape_mismatch_errors() {
        let a = Operator::identity(2, 2);
        let b = Operator::identity(2, 3);
        assert!(a.add(&b).is_err());
        assert!(a.compose(&b).is_err());
        assert!(a.commutator(&b).is_err());
    }

    #[test]
    fn commutators_that_vanish() {
        let l = dt().add(&dx(3)).unwrap();
        assert!(l.commutator(&Operator::identity(2, 1)).unwrap().is_zero());
        assert!(dt().commutator(&dx(1)).unwrap().is_zero());
        let wave = Operator::scalar(4, ONE, &[2, 0, 0, 0])
            .sub(&Operator::scalar(4, ONE, &[0, 2, 0, 0]))
            .unwrap()
            .times_identity(3)
            .unwrap();
        let m = Operator::monomial(
            real_mat(&[&[1.0, 2.0, 0.0], &[0.0, 3.0, -1.0], &[5.0, 0.0, 7.0]]),
            MultiIndex::zero(4),
        );
        assert!(wave.commutator(&m).unwrap().is_zero());
    }

    #[test]
    fn heat_symbol() {
        let heat = dt().sub(&dx(2)).unwrap();
        let (w, k) = (0.7, -1.3);
        let s = heat.symbol_real(&[w, k]);
        assert!((s[(0, 0)] - c(k * k, w)).norm() < 1e-15);
    }

    #[test]
    fn adding_zero_is_identity() {
        let l = dt().add(&dx(2).scale(r(3.0))).unwrap();
        assert_eq!(l.add(&Operator::zero(2, 1, 1)).unwrap(), l);
    }
}
