//! Hilbert series of free graded modules as exact rational functions.
//!
//! The graded module `O(a)` has Hilbert series `Σ_e dim S_{e+a} t^e = t^{-a} / Π_i (1 - t^{w_i})`,
//! so every alternating sum over a complex of free modules is a Laurent polynomial numerator over
//! the common denominator `Π_i (1 - t^{w_i})`. Identities are compared on numerators.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::graded::{dim_graded_piece, WeightVector};

/// `numerator(t) / Π_i (1 - t^{w_i})` with an integer Laurent-polynomial numerator.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HilbertSeries {
    numerator: BTreeMap<i64, i64>,
}

impl HilbertSeries {
    pub fn zero() -> Self {
        HilbertSeries::default()
    }

    /// Series of the free module `O(a)`.
    pub fn of_twist(a: i64) -> Self {
        let mut s = HilbertSeries::zero();
        s.add_monomial(-a, 1);
        s
    }

    pub fn add_monomial(&mut self, exp: i64, coeff: i64) {
        let slot = self.numerator.entry(exp).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.numerator.remove(&exp);
        }
    }

    /// Adds `sign · HS(O(a))`.
    pub fn add_twist(&mut self, a: i64, sign: i64) {
        self.add_monomial(-a, sign);
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn numerator(&self) -> &BTreeMap<i64, i64> {
        &self.numerator
    }

    /// Coefficient of `t^e` in the power-series expansion.
    pub fn coefficient(&self, w: &WeightVector, e: i64) -> i64 {
        self.numerator.iter().map(|(&x, &c)| c * dim_graded_piece(w, e - x) as i64).sum()
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .numerator
            .iter()
            .map(|(e, c)| match *e {
                0 => format!("{c}"),
                _ => format!("{c}*t^{e}"),
            })
            .collect();
        write!(f, "({}) / Π(1-t^w_i)", parts.join(" + "))
    }
}

impl Serialize for HilbertSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Coefficients `c_0, ..., c_w` of `Π_i (1 - t^{w_i})`.
pub fn denominator_coefficients(w: &WeightVector) -> Vec<i64> {
    let mut coeffs = vec![0i64; w.total() as usize + 1];
    coeffs[0] = 1;
    let mut deg = 0usize;
    for &wi in w.weights() {
        let wi = wi as usize;
        for a in (0..=deg).rev() {
            let c = coeffs[a];
            coeffs[a + wi] -= c;
        }
        deg += wi;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_series_coefficients_are_graded_dimensions() {
        let w = WeightVector::new(vec![1, 1, 2]).unwrap();
        let s = HilbertSeries::of_twist(3);
        for e in -5..10 {
            assert_eq!(s.coefficient(&w, e), dim_graded_piece(&w, e + 3) as i64);
        }
    }

    #[test]
    fn cancellation() {
        let mut s = HilbertSeries::of_twist(2);
        s.add_twist(2, -1);
        assert!(s.is_zero());
    }

    #[test]
    fn denominator_expansions() {
        let w = WeightVector::new(vec![1, 1, 1, 1, 1]).unwrap();
        assert_eq!(denominator_coefficients(&w), vec![1, -5, 10, -10, 5, -1]);
        let w = WeightVector::new(vec![1, 1, 2]).unwrap();
        assert_eq!(denominator_coefficients(&w), vec![1, -2, 0, 2, -1]);
    }
}
