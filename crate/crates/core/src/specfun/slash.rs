use super::e;
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// Integer matrix `[[a, b], [c, d]]` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SL2Element {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl SL2Element {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidParameter(format!("det of [[{a},{b}],[{c},{d}]] is not 1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// `S = [[0, −1], [1, 0]]`.
    pub fn s() -> Self {
        Self { a: 0, b: -1, c: 1, d: 0 }
    }

    /// `T = [[1, 1], [0, 1]]`.
    pub fn t() -> Self {
        Self { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    /// Möbius action `γ.τ`.
    pub fn act(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }
}

/// Slash action `φ|_{k,m}(γ, (λ, μ))` evaluated at `(z, τ)`:
///
/// `(cτ+d)^{−k} e(−cm(z+λτ+μ)²/(cτ+d) + m(λ²τ + 2λz)) φ((z+λτ+μ)/(cτ+d), γ.τ)`.
pub fn jacobi_slash<F>(
    f: F,
    k: i64,
    m: u64,
    gamma: &SL2Element,
    shift: (i64, i64),
    z: Complex64,
    tau: Complex64,
) -> Result<Complex64>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let (_, _, c, d) = gamma.entries();
    let ctd = tau * c as f64 + d as f64;
    if ctd.norm() == 0.0 {
        return Err(Error::InvalidParameter("cτ + d vanishes".into()));
    }
    let (lambda, mu) = (shift.0 as f64, shift.1 as f64);
    let m = m as f64;
    let zs = z + tau * lambda + mu;
    let phase = e(-(zs * zs) * (c as f64 * m) / ctd + (tau * lambda * lambda + z * (2.0 * lambda)) * m);
    let value = f(zs / ctd, gamma.act(tau))?;
    Ok(ctd.powi(-k as i32) * phase * value)
}
