//! Monomials as exponent vectors with graded lexicographic order.

use std::cmp::Ordering;

/// A power product `x_1^{a_1} ... x_n^{a_n}` stored as its exponent vector.
///
/// The vector length always equals the ambient variable count of the
/// polynomial owning the monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// Single variable `x_i^k`.
    pub fn var_pow(n: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = k;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Component-wise difference, if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }
}

/// Graded lexicographic order in the declared variable order: compare total
/// degree first, then exponent vectors lexicographically.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let m1 = Monomial(vec![2, 0]); // x^2
        let m2 = Monomial(vec![1, 1]); // xy
        let m3 = Monomial(vec![0, 1]); // y
        assert!(m1 > m2, "x^2 > xy in grlex with x before y");
        assert!(m2 > m3);
        assert_eq!(m1.degree(), 2);
    }

    #[test]
    fn div_and_mul() {
        let a = Monomial(vec![3, 1]);
        let b = Monomial(vec![1, 1]);
        assert_eq!(a.checked_div(&b), Some(Monomial(vec![2, 0])));
        assert_eq!(b.checked_div(&a), None);
        assert_eq!(b.mul(&b), Monomial(vec![2, 2]));
    }
}
