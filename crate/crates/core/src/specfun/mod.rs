//! Modular and elliptic special functions evaluated from truncated q-series.
//!
//! Conventions: `q = e(τ)`, `q_w = e(w)`, `q_z = e(z)` with
//! `e(x) = exp(2πi x)`. The elliptic families are plain mode sums on the
//! annulus `|q| < |q_w| < 1`; see [`weierstrass`] for the continued forms
//! used near `w = 0`.

mod bernoulli;
mod eisenstein;
mod laurent;
mod series;
mod slash;
mod sum;
pub mod weierstrass;

pub use bernoulli::{bernoulli, bernoulli_f64};
pub use eisenstein::{
    eisenstein, eisenstein_series, eisenstein_tilde, eisenstein_twisted, p1_twisted_laurent,
};
pub use laurent::{laurent_coeffs_p1, LaurentFit, LaurentKind, MAX_FIT_ORDER};
pub use series::QLaurentSeries;
pub use slash::{jacobi_slash, SL2Element};
pub use sum::CompensatedSum;
pub use weierstrass::{weier_p, weier_p_deformed, weier_p_tilde, weier_p_twisted};

use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `e(x) = exp(2πi x)`.
#[inline]
pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

/// A point τ of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularPoint {
    tau: Complex64,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidParameter(format!("Im τ must be positive, got τ = {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// The nome `q = e(τ)`.
    pub fn nome(&self) -> Complex64 {
        e(self.tau)
    }

    /// Scale of the neglected tail for a q-series truncated after `q^{n_q}`.
    pub fn truncation_error(&self, tr: &Truncation) -> f64 {
        let aq = self.nome().norm();
        aq.powi(tr.n_q as i32 + 1) / (1.0 - aq)
    }
}

/// An elliptic argument `w` inside the annulus `|q| < |e(w)| < 1`,
/// i.e. `0 < Im w < Im τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusPoint {
    w: Complex64,
    tau: ModularPoint,
}

impl AnnulusPoint {
    pub fn new(w: Complex64, tau: ModularPoint) -> Result<Self> {
        let aw = e(w).norm();
        let aq = tau.nome().norm();
        if !(aw < 1.0 && aw > aq) {
            return Err(Error::DomainViolation(format!(
                "w = {w}, |q_w| = {aw:.6e}, |q| = {aq:.6e}"
            )));
        }
        Ok(Self { w, tau })
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn tau(&self) -> ModularPoint {
        self.tau
    }
}

/// Pair `(θ, φ)` of unit-modulus twists with `φ = e(λ)`, `0 ≤ λ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistPair {
    theta: Complex64,
    lambda: f64,
}

impl TwistPair {
    pub fn new(theta: Complex64, lambda: f64) -> Result<Self> {
        if (theta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|θ| must be 1, got {}", theta.norm())));
        }
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("λ must lie in [0, 1), got {lambda}")));
        }
        Ok(Self { theta, lambda })
    }

    /// Builds the pair from `φ`, recovering `λ = arg(φ)/2π ∈ [0, 1)`.
    pub fn from_phi(theta: Complex64, phi: Complex64) -> Result<Self> {
        if (phi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|φ| must be 1, got {}", phi.norm())));
        }
        let mut lambda = phi.arg() / (2.0 * PI);
        if lambda < 0.0 {
            lambda += 1.0;
        }
        if lambda >= 1.0 - 1e-15 {
            lambda = 0.0;
        }
        Self::new(theta, lambda)
    }

    pub fn theta(&self) -> Complex64 {
        self.theta
    }

    pub fn phi(&self) -> Complex64 {
        e(Complex64::new(self.lambda, 0.0))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// True for `(θ, φ) = (1, 1)`, where the `n = 0` term is dropped.
    pub fn is_trivial(&self) -> bool {
        (self.theta - 1.0).norm() < 1e-12 && self.lambda == 0.0
    }
}

/// Truncation controls shared by every series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Largest retained power of `q`.
    pub n_q: usize,
    /// Largest `|n|` in elliptic mode sums.
    pub n_mode: usize,
    /// Tolerance for identity checks and pole detection.
    pub tol: f64,
}

impl Truncation {
    pub fn new(n_q: usize, n_mode: usize, tol: f64) -> Result<Self> {
        if n_q == 0 || n_mode == 0 || !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation needs n_q ≥ 1, n_mode ≥ 1, tol > 0 (got {n_q}, {n_mode}, {tol})"
            )));
        }
        Ok(Self { n_q, n_mode, tol })
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self { n_q: 60, n_mode: 64, tol: 1e-12 }
    }
}
