use super::{CompensatedSum, Truncation};
use crate::{Complex64, Error, Result};
use std::ops::{Add, Mul, Neg, Sub};

/// Truncated Laurent series `Σ_{j ≥ min_exponent} c_j q^j` with all powers
/// above `n_q` discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct QLaurentSeries {
    min_exponent: i64,
    coefficients: Vec<Complex64>,
    n_q: i64,
}

impl QLaurentSeries {
    pub fn new(min_exponent: i64, mut coefficients: Vec<Complex64>, tr: &Truncation) -> Self {
        let n_q = tr.n_q as i64;
        let max_len = (n_q - min_exponent + 1).max(0) as usize;
        coefficients.truncate(max_len);
        Self { min_exponent, coefficients, n_q }
    }

    pub fn zero(tr: &Truncation) -> Self {
        Self::new(0, Vec::new(), tr)
    }

    pub fn constant(c: Complex64, tr: &Truncation) -> Self {
        Self::new(0, vec![c], tr)
    }

    /// `c q^k`.
    pub fn monomial(c: Complex64, k: i64, tr: &Truncation) -> Self {
        Self::new(k, vec![c], tr)
    }

    pub fn min_exponent(&self) -> i64 {
        self.min_exponent
    }

    pub fn max_power(&self) -> i64 {
        self.n_q
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.min_exponent {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients
            .get((k - self.min_exponent) as usize)
            .copied()
            .unwrap_or_default()
    }

    fn from_fn(lo: i64, hi: i64, n_q: i64, f: impl Fn(i64) -> Complex64) -> Self {
        let hi = hi.min(n_q);
        let coefficients = if hi < lo { Vec::new() } else { (lo..=hi).map(f).collect() };
        Self { min_exponent: lo, coefficients, n_q }
    }

    fn hi(&self) -> i64 {
        self.min_exponent + self.coefficients.len() as i64 - 1
    }

    /// Evaluate at `q` (ascending powers, compensated).
    pub fn eval(&self, q: Complex64) -> Complex64 {
        let mut s = CompensatedSum::new();
        let mut p = q.powi(self.min_exponent as i32);
        for c in &self.coefficients {
            s.add(c * p);
            p *= q;
        }
        s.value()
    }

    /// `f(q) ↦ f(q^k)` for `k ≥ 1`.
    pub fn substitute_power(&self, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter(format!("substitution power must be ≥ 1, got {k}")));
        }
        let lo = self.min_exponent * k;
        Ok(Self::from_fn(lo, self.hi() * k, self.n_q, |j| {
            if (j - lo) % k == 0 {
                self.coeff(j / k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Multiplicative inverse of a series whose lowest coefficient is nonzero.
    pub fn invert_unit(&self) -> Result<Self> {
        let lead = self
            .coefficients
            .first()
            .copied()
            .filter(|c| c.norm() > 0.0)
            .ok_or_else(|| Error::InvalidParameter("series has no invertible leading term".into()))?;
        let lo = -self.min_exponent;
        let len = (self.n_q - lo + 1).max(0) as usize;
        let mut inv: Vec<Complex64> = Vec::with_capacity(len);
        for m in 0..len {
            let mut s = if m == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            for j in 1..=m.min(self.coefficients.len().saturating_sub(1)) {
                s -= self.coefficients[j] * inv[m - j];
            }
            inv.push(s / lead);
        }
        Ok(Self { min_exponent: lo, coefficients: inv, n_q: self.n_q })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            min_exponent: self.min_exponent,
            coefficients: self.coefficients.iter().map(|x| x * c).collect(),
            n_q: self.n_q,
        }
    }
}

impl Add for &QLaurentSeries {
    type Output = QLaurentSeries;
    fn add(self, rhs: Self) -> QLaurentSeries {
        let n_q = self.n_q.min(rhs.n_q);
        let lo = self.min_exponent.min(rhs.min_exponent);
        let hi = self.hi().max(rhs.hi());
        QLaurentSeries::from_fn(lo, hi, n_q, |j| self.coeff(j) + rhs.coeff(j))
    }
}

impl Neg for &QLaurentSeries {
    type Output = QLaurentSeries;
    fn neg(self) -> QLaurentSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &QLaurentSeries {
    type Output = QLaurentSeries;
    fn sub(self, rhs: Self) -> QLaurentSeries {
        self + &(-rhs)
    }
}

impl Mul for &QLaurentSeries {
    type Output = QLaurentSeries;
    fn mul(self, rhs: Self) -> QLaurentSeries {
        let n_q = self.n_q.min(rhs.n_q);
        let lo = self.min_exponent + rhs.min_exponent;
        let hi = self.hi() + rhs.hi();
        QLaurentSeries::from_fn(lo, hi, n_q, |j| {
            let mut s = CompensatedSum::new();
            for (a, ca) in self.coefficients.iter().enumerate() {
                let k = j - self.min_exponent - a as i64;
                s.add(ca * rhs.coeff(k));
            }
            s.value()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tr(n: usize) -> Truncation {
        Truncation::new(n, 8, 1e-12).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn euler_product_inverse_gives_partitions() {
        let t = tr(10);
        let mut prod = QLaurentSeries::constant(c(1.0), &t);
        for n in 1..=10 {
            let f = &QLaurentSeries::constant(c(1.0), &t) - &QLaurentSeries::monomial(c(1.0), n, &t);
            prod = &prod * &f;
        }
        let p = prod.invert_unit().unwrap();
        let expected = [1.0, 1.0, 2.0, 3.0, 5.0, 7.0, 11.0, 15.0, 22.0, 30.0, 42.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((p.coeff(k as i64) - c(*e)).norm() < 1e-12);
        }
    }

    #[test]
    fn laurent_inverse_shifts_exponent() {
        let t = tr(6);
        let s = QLaurentSeries::new(-1, vec![c(2.0), c(1.0)], &t);
        let inv = s.invert_unit().unwrap();
        assert_eq!(inv.min_exponent(), 1);
        let one = &s * &inv;
        assert!((one.coeff(0) - c(1.0)).norm() < 1e-14);
        for k in 1..=5 {
            assert!(one.coeff(k).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn substitution_spreads_coefficients() {
        let t = tr(9);
        let s = QLaurentSeries::new(0, vec![c(1.0), c(2.0), c(3.0)], &t);
        let s3 = s.substitute_power(3).unwrap();
        assert_eq!(s3.coeff(3), c(2.0));
        assert_eq!(s3.coeff(6), c(3.0));
        assert_eq!(s3.coeff(4), c(0.0));
    }

    proptest! {
        #[test]
        fn product_evaluates_to_product_of_values(
            a in proptest::collection::vec(-2.0f64..2.0, 1..6),
            b in proptest::collection::vec(-2.0f64..2.0, 1..6),
        ) {
            let t = tr(40);
            let sa = QLaurentSeries::new(0, a.iter().map(|x| c(*x)).collect(), &t);
            let sb = QLaurentSeries::new(0, b.iter().map(|x| c(*x)).collect(), &t);
            let q = Complex64::new(0.1, 0.05);
            let lhs = (&sa * &sb).eval(q);
            let rhs = sa.eval(q) * sb.eval(q);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
