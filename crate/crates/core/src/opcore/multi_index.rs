use std::fmt;

/// Exponents of `D_α = ∂_t^{α₀} ∂_1^{α₁} ⋯ ∂_n^{α_n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    pub fn unit(nvars: usize, slot: usize) -> Self {
        let mut e = vec![0; nvars];
        e[slot] = 1;
        MultiIndex(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// `|α|`, the total order.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, slot: usize) -> u32 {
        self.0[slot]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn time_order(&self) -> u32 {
        self.0[0]
    }

    /// The spatial exponents (slots `1..`).
    pub fn spatial(&self) -> &[u32] {
        &self.0[1..]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.nvars(), other.nvars());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with_incremented(&self, slot: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[slot] += 1;
        MultiIndex(e)
    }

    /// Decrements `slot`; `None` if the exponent is already zero.
    pub fn with_decremented(&self, slot: usize) -> Option<MultiIndex> {
        let mut e = self.0.clone();
        e[slot] = e[slot].checked_sub(1)?;
        Some(MultiIndex(e))
    }

    /// Lowest slot with a nonzero exponent.
    pub fn lowest_slot(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    /// `(−1)^{Σ_{k ∈ mask} α_k}`.
    pub fn reflection_sign(&self, mask: &[bool]) -> f64 {
        let n: u32 = self
            .0
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(e, _)| e)
            .sum();
        if n.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
