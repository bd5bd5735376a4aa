use super::weierstrass::{evaluate, Family};
use super::{CompensatedSum, ModularPoint, Truncation, TwistPair};
use crate::{Complex64, Error, Result};
use std::f64::consts::PI;

/// Largest order accepted by [`laurent_coeffs_p1`].
pub const MAX_FIT_ORDER: usize = 12;

/// Which `P_1`-type function to expand around `w = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaurentKind {
    /// `P_{1,λ}(w, τ)`.
    PlainTwisted(i64),
    /// `P̃_1(w, z, τ)`.
    Tilde(Complex64),
    /// `P_1[θ; φ](w, τ)`.
    Deformed(TwistPair),
}

/// Fitted expansion `f(w) = residue/(2πi w) + Σ_{k=1}^{K} coeffs[k−1] (2πi w)^{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentFit {
    pub residue: Complex64,
    pub coeffs: Vec<Complex64>,
    pub radius: f64,
}

impl LaurentFit {
    /// Residue of `f` in the variable `w`, i.e. `residue/(2πi)`.
    pub fn pole_coefficient(&self) -> Complex64 {
        self.residue / Complex64::new(0.0, 2.0 * PI)
    }
}

/// Fits the Laurent coefficients of a `P_1`-type function at `w = 0` from
/// `4K` samples on the circle `|w| = 0.05 Im τ`. On an equispaced circle the
/// least-squares fit is the discrete Fourier transform, so each coefficient is
/// exact up to aliasing of order `(r/R)^{4K}` and rounding.
pub fn laurent_coeffs_p1(kind: LaurentKind, tau: &ModularPoint, k_max: usize, tr: &Truncation) -> Result<LaurentFit> {
    if k_max == 0 || k_max > MAX_FIT_ORDER {
        return Err(Error::FitIllConditioned(format!(
            "order {k_max} outside 1..={MAX_FIT_ORDER}"
        )));
    }
    let radius = 0.05 * tau.tau().im;
    // Nearest other pole of the family is at distance min(1, |τ|, |τ ± 1|).
    let tau_c = tau.tau();
    let nearest = [1.0, tau_c.norm(), (tau_c - 1.0).norm(), (tau_c + 1.0).norm()]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !(radius > 0.0) || radius >= 0.5 * nearest {
        return Err(Error::FitIllConditioned(format!("sample radius {radius} degenerate")));
    }
    let family = match kind {
        LaurentKind::PlainTwisted(l) => Family::Twisted(l),
        LaurentKind::Tilde(z) => Family::Tilde(z),
        LaurentKind::Deformed(t) => Family::Deformed(t),
    };
    let n = 4 * k_max;
    let mut samples = Vec::with_capacity(n);
    for j in 0..n {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let w = phase * radius;
        let x = Complex64::new(0.0, 2.0 * PI) * w;
        samples.push((x, evaluate(&family, 1, w, tau, tr)?));
    }
    let fit = |power: i32| -> Complex64 {
        let mut s = CompensatedSum::new();
        for (x, f) in &samples {
            s.add(f * x.powi(-power));
        }
        s.value() / n as f64
    };
    let residue = fit(-1);
    let coeffs = (1..=k_max).map(|k| fit(k as i32 - 1)).collect();
    Ok(LaurentFit { residue, coeffs, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{eisenstein_tilde, p1_twisted_laurent};

    fn tau() -> ModularPoint {
        ModularPoint::new(Complex64::new(0.0, 0.5)).unwrap()
    }

    #[test]
    fn twisted_coefficients() {
        let tr = Truncation::default();
        for l in -2..=3 {
            let fit = laurent_coeffs_p1(LaurentKind::PlainTwisted(l), &tau(), 6, &tr).unwrap();
            assert!((fit.residue - 1.0).norm() < 1e-10);
            for (i, got) in fit.coeffs.iter().enumerate() {
                let want = -p1_twisted_laurent(i + 1, l, &tau(), &tr);
                assert!((got - want).norm() < 1e-8, "λ={l} k={}: {got} vs {want}", i + 1);
            }
        }
    }

    #[test]
    fn tilde_coefficients() {
        let tr = Truncation::default();
        let z = Complex64::new(0.21, 0.13);
        let fit = laurent_coeffs_p1(LaurentKind::Tilde(z), &tau(), 6, &tr).unwrap();
        let pole = fit.pole_coefficient() * Complex64::new(0.0, 2.0 * PI);
        assert!((pole - 1.0).norm() < 1e-10);
        for (i, got) in fit.coeffs.iter().enumerate() {
            let want = -eisenstein_tilde(i + 1, z, &tau(), &tr).unwrap();
            assert!((got - want).norm() < 1e-8, "k={}: {got} vs {want}", i + 1);
        }
    }

    #[test]
    fn deformed_coefficients() {
        let tr = Truncation::default();
        let trivial = TwistPair::new(Complex64::new(1.0, 0.0), 0.0).unwrap();
        let a = laurent_coeffs_p1(LaurentKind::Deformed(trivial), &tau(), 6, &tr).unwrap();
        let b = laurent_coeffs_p1(LaurentKind::PlainTwisted(0), &tau(), 6, &tr).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x - y).norm() < 1e-12);
        }
        let ns = TwistPair::new(Complex64::new(1.0, 0.0), 0.5).unwrap();
        let fit = laurent_coeffs_p1(LaurentKind::Deformed(ns), &tau(), 6, &tr).unwrap();
        assert!((fit.residue - 1.0).norm() < 1e-10);
        // P_1[1; −1] is odd in w, so even powers of w vanish.
        for k in (1..=6).step_by(2) {
            assert!(fit.coeffs[k - 1].norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn order_limits() {
        let tr = Truncation::default();
        let r = laurent_coeffs_p1(LaurentKind::PlainTwisted(0), &tau(), MAX_FIT_ORDER + 1, &tr);
        assert!(matches!(r, Err(Error::FitIllConditioned(_))));
        let r = laurent_coeffs_p1(LaurentKind::PlainTwisted(0), &tau(), 0, &tr);
        assert!(matches!(r, Err(Error::FitIllConditioned(_))));
    }
}
