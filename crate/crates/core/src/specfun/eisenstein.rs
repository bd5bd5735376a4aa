use super::{bernoulli_f64, e, CompensatedSum, ModularPoint, QLaurentSeries, Truncation};
use crate::{Complex64, Error, Result};

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn divisor_power_sum(n: usize, p: u32) -> f64 {
    let mut s = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += (d as f64).powi(p as i32);
            let e = n / d;
            if e != d {
                s += (e as f64).powi(p as i32);
            }
        }
        d += 1;
    }
    s
}

/// q-expansion of `E_k`, `k ≥ 2` even, through `q^{n_q}`.
/// Odd `k` gives the zero series and `k = 0` the constant `−1`.
pub fn eisenstein_series(k: usize, tr: &Truncation) -> QLaurentSeries {
    if k == 0 {
        return QLaurentSeries::constant(Complex64::new(-1.0, 0.0), tr);
    }
    if k % 2 == 1 {
        return QLaurentSeries::zero(tr);
    }
    let scale = 2.0 / factorial(k - 1);
    let mut coeffs = Vec::with_capacity(tr.n_q + 1);
    coeffs.push(Complex64::new(-bernoulli_f64(k) / factorial(k), 0.0));
    for n in 1..=tr.n_q {
        coeffs.push(Complex64::new(scale * divisor_power_sum(n, (k - 1) as u32), 0.0));
    }
    QLaurentSeries::new(0, coeffs, tr)
}

/// `E_k(τ) = −B_k/k! + 2/(k−1)! Σ_{n≥1} n^{k−1}q^n/(1−q^n)`, with `E_0 = −1`
/// and `E_k = 0` for odd `k`.
pub fn eisenstein(k: usize, tau: &ModularPoint, tr: &Truncation) -> Complex64 {
    if k == 0 {
        return Complex64::new(-1.0, 0.0);
    }
    if k % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    eisenstein_series(k, tr).eval(tau.nome())
}

/// `E_{k,λ}(τ) = Σ_{j=0}^{k} λ^j/j! E_{k−j}(τ)`.
pub fn eisenstein_twisted(k: usize, lambda: i64, tau: &ModularPoint, tr: &Truncation) -> Complex64 {
    let l = lambda as f64;
    let mut s = CompensatedSum::new();
    for j in 0..=k {
        if (k - j) % 2 == 1 {
            continue;
        }
        s.add(eisenstein(k - j, tau, tr) * (l.powi(j as i32) / factorial(j)));
    }
    s.value()
}

/// Laurent coefficients of `P_{1,λ} = q_w^{−λ}(P_1 + 1/2)` at `w = 0`:
/// `P_{1,λ} = 1/(2πi w) − Σ_{k≥1} c_k (2πi w)^{k−1}` with
/// `c_k = Σ_{j=0}^{k} Ê_j (−λ)^{k−j}/(k−j)!`, where `Ê_1 = −1/2` and
/// `Ê_j = E_j` otherwise.
///
/// These differ from [`eisenstein_twisted`] already at `k = 1`
/// (`c_1 = λ − 1/2` against `E_{1,λ} = −λ`); the reduction formulas use `c_k`.
pub fn p1_twisted_laurent(k: usize, lambda: i64, tau: &ModularPoint, tr: &Truncation) -> Complex64 {
    let ml = -(lambda as f64);
    let mut s = CompensatedSum::new();
    for j in 0..=k {
        let ej = if j == 1 { Complex64::new(-0.5, 0.0) } else { eisenstein(j, tau, tr) };
        s.add(ej * (ml.powi((k - j) as i32) / factorial(k - j)));
    }
    s.value()
}

/// `Ẽ_k(z, τ)` from its double q-series, truncated at `mn ≤ n_q`;
/// `Ẽ_0 = −1`.
///
/// The series needs `|q| < |q_z| < |q|^{−1}`.
pub fn eisenstein_tilde(k: usize, z: Complex64, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
    if k == 0 {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    let qz = e(z);
    let q = tau.nome();
    let aq = q.norm();
    if !(qz.norm() > aq && qz.norm() * aq < 1.0) {
        return Err(Error::DomainViolation(format!(
            "Ẽ_{k} needs |q| < |q_z| < 1/|q|, got |q_z| = {:.6e}",
            qz.norm()
        )));
    }
    let mut s = CompensatedSum::new();
    if k == 1 {
        if (qz - 1.0).norm() <= tr.tol {
            return Err(Error::PoleAtTrivialZ);
        }
        s.add(-qz / (qz - 1.0));
    }
    s.add(Complex64::new(-bernoulli_f64(k) / factorial(k), 0.0));
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let qz_inv = qz.inv();
    let scale = 1.0 / factorial(k - 1);
    // Group by N = mn so that powers of q are added in ascending order.
    for big_n in 1..=tr.n_q {
        let qn = q.powi(big_n as i32);
        let mut inner = CompensatedSum::new();
        for m in 1..=big_n {
            if big_n % m != 0 {
                continue;
            }
            let n = (big_n / m) as f64;
            let nk = n.powi((k - 1) as i32);
            inner.add((qz.powi(m as i32) + qz_inv.powi(m as i32) * sign) * nk);
        }
        s.add(inner.value() * qn * scale);
    }
    Ok(s.value())
}
