//! Weierstrass-type families as mode sums.
//!
//! Every family has the shape
//! `(−1)^k/(k−1)! Σ_{n ∈ ℤ+s}' (n+p)^{k−1} q_w^{n+p} / (1 − a q^n)`:
//!
//! | family | `s` | `p` | `a` | omitted `n` |
//! |---|---|---|---|---|
//! | `P_k` | 0 | 0 | 1 | 0 |
//! | `P_{k,λ}` | 0 | −λ | 1 | 0 |
//! | `P̃_k(·, z)` | 0 | 0 | `q_z` | none |
//! | `P_k[θ;φ]` | λ | 0 | `θ^{−1}` | 0 if `(θ,φ) = (1,1)` |
//!
//! plus `−1/2` for `P_1`. The `weier_*` functions are the literal sums
//! truncated at `|n| ≤ n_mode` on the annulus. [`evaluate`] resums the
//! geometric parts in closed form, which is accurate to rounding for any
//! `|q| < |q_w| < |q|^{−1}` and continues each family across `w = 0`.

use super::{e, AnnulusPoint, CompensatedSum, ModularPoint, Truncation, TwistPair};
use crate::{Complex64, Error, Result};

/// A Weierstrass-type family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Plain,
    Twisted(i64),
    Tilde(Complex64),
    Deformed(TwistPair),
}

struct Shape {
    s: f64,
    p: f64,
    a: Complex64,
    omit_zero: bool,
}

impl Family {
    fn shape(&self) -> Shape {
        match *self {
            Family::Plain => Shape { s: 0.0, p: 0.0, a: Complex64::new(1.0, 0.0), omit_zero: true },
            Family::Twisted(l) => {
                Shape { s: 0.0, p: -(l as f64), a: Complex64::new(1.0, 0.0), omit_zero: true }
            }
            Family::Tilde(z) => Shape { s: 0.0, p: 0.0, a: e(z), omit_zero: false },
            Family::Deformed(t) => {
                Shape { s: t.lambda(), p: 0.0, a: t.theta().inv(), omit_zero: t.is_trivial() }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Plain => "P",
            Family::Twisted(_) => "P_lambda",
            Family::Tilde(_) => "P_tilde",
            Family::Deformed(_) => "P_deformed",
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn prefactor(k: usize) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign / factorial(k - 1)
}

fn finish(family: &Family, k: usize, sum: Complex64) -> Complex64 {
    let mut v = sum * prefactor(k);
    if k == 1 && *family == Family::Plain {
        v -= 0.5;
    }
    v
}

/// `1/(1 − a q^n)`, computed through `u^{−1}` when `|u| > 1` so that large
/// negative `n` cannot overflow.
fn reciprocal(a: Complex64, tau: Complex64, n: f64, tol: f64) -> Result<Complex64> {
    let log_u = a.ln() + Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau * n;
    let (d, r) = if log_u.re <= 0.0 {
        let d = 1.0 - log_u.exp();
        (d, d.inv())
    } else {
        let uinv = (-log_u).exp();
        let d = 1.0 - uinv;
        (d, -uinv / d)
    };
    if d.norm() <= tol {
        return Err(Error::PoleHit(format!("1 − a·q^n vanishes at n = {n}")));
    }
    Ok(r)
}

/// Literal truncated sum, indices in ascending `|n|` and then sign.
fn literal(family: &Family, k: usize, w: Complex64, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::InvalidParameter("Weierstrass index must be ≥ 1".into()));
    }
    let sh = family.shape();
    let bound = tr.n_mode as f64;
    let mut idx: Vec<f64> = (-(tr.n_mode as i64) - 1..=tr.n_mode as i64 + 1)
        .filter(|&j| !(sh.omit_zero && j == 0))
        .map(|j| sh.s + j as f64)
        .filter(|n| n.abs() <= bound)
        .collect();
    idx.sort_by(|x, y| x.abs().total_cmp(&y.abs()).then(y.total_cmp(x)));
    let mut acc = CompensatedSum::new();
    for n in idx {
        let r = reciprocal(sh.a, tau.tau(), n, tr.tol)?;
        let np = n + sh.p;
        acc.add(e(w * np) * np.powi(k as i32 - 1) * r);
    }
    Ok(finish(family, k, acc.value()))
}

/// `P_m(w, τ)`, `m ≥ 1`.
pub fn weier_p(m: usize, p: &AnnulusPoint, tr: &Truncation) -> Result<Complex64> {
    literal(&Family::Plain, m, p.w(), &p.tau(), tr)
}

/// `P_{m,λ}(w, τ)`, summed over `n' = n + λ` with `|n'| ≤ n_mode`.
pub fn weier_p_twisted(m: usize, lambda: i64, p: &AnnulusPoint, tr: &Truncation) -> Result<Complex64> {
    literal(&Family::Twisted(lambda), m, p.w(), &p.tau(), tr)
}

/// `P̃_m(w, z, τ)`.
pub fn weier_p_tilde(m: usize, p: &AnnulusPoint, z: Complex64, tr: &Truncation) -> Result<Complex64> {
    literal(&Family::Tilde(z), m, p.w(), &p.tau(), tr)
}

/// `P_k[θ;φ](w, τ)` with the elliptic argument in the `q_w = e(w)` convention.
pub fn weier_p_deformed(k: usize, twist: &TwistPair, p: &AnnulusPoint, tr: &Truncation) -> Result<Complex64> {
    literal(&Family::Deformed(*twist), k, p.w(), &p.tau(), tr)
}

/// Numerators of `Σ_{j≥0} j^i y^j = N_i(y)/(1−y)^{i+1}` for `i ≤ max`.
fn polylog_numerators(max: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for i in 0..max {
        let n = &out[i];
        // N_{i+1} = y (N_i'(1−y) + (i+1) N_i)
        let mut inner = vec![0.0; n.len() + 1];
        for (d, c) in n.iter().enumerate() {
            if d > 0 {
                inner[d - 1] += d as f64 * c;
                inner[d] -= d as f64 * c;
            }
            inner[d] += (i + 1) as f64 * c;
        }
        let mut next = vec![0.0; inner.len() + 1];
        next[1..].copy_from_slice(&inner);
        out.push(next);
    }
    out
}

fn poly_eval(c: &[f64], y: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * y + x)
}

/// `Σ_{j≥0} (start + j)^m y^{start+j}` continued as a rational function of
/// `y = e(x)`.
fn shifted_polylog(m: usize, start: f64, x: Complex64) -> Complex64 {
    let y = e(x);
    let nums = polylog_numerators(m);
    let one_minus = 1.0 - y;
    let mut acc = CompensatedSum::new();
    let mut binom = 1.0;
    for i in 0..=m {
        let li = poly_eval(&nums[i], y) / one_minus.powi(i as i32 + 1);
        acc.add(li * binom * start.powi((m - i) as i32));
        binom = binom * (m - i) as f64 / (i + 1) as f64;
    }
    acc.value() * e(x * start)
}

/// Closed-form evaluation of family `family` at index `k` for
/// `|q| < |e(w)| < |q|^{−1}`, including across the pole at `w = 0`.
pub fn evaluate(family: &Family, k: usize, w: Complex64, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::InvalidParameter("Weierstrass index must be ≥ 1".into()));
    }
    let aq = tau.nome().norm();
    let aw = e(w).norm();
    if !(aw > aq && aw * aq < 1.0) {
        return Err(Error::DomainViolation(format!(
            "continued evaluation needs |q| < |q_w| < 1/|q|, got |q_w| = {aw:.6e}, |q| = {aq:.6e}"
        )));
    }
    let sh = family.shape();
    let m = k - 1;
    let log_q = -aq.ln();
    // |a q^n| < 1 exactly when n > c.
    let c = sh.a.norm().ln() / log_q;
    let j_up = (c + 0.5 - sh.s).floor() as i64 + 1;
    let j_down = (c - 0.5 - sh.s).ceil() as i64 - 1;
    let tau_c = tau.tau();
    let term = |n: f64| e(w * (n + sh.p)) * (n + sh.p).powi(m as i32);

    let mut acc = CompensatedSum::new();
    for j in j_down + 1..j_up {
        if sh.omit_zero && j == 0 {
            continue;
        }
        let n = sh.s + j as f64;
        acc.add(term(n) * reciprocal(sh.a, tau_c, n, tr.tol)?);
    }

    // Upper tail: 1/(1−u) = 1 + u/(1−u) with u = a q^n.
    debug_assert!(!sh.omit_zero || (j_down < 0 && j_up > 0));
    let n1 = sh.s + j_up as f64;
    acc.add(shifted_polylog(m, n1 + sh.p, w));
    let mut up = CompensatedSum::new();
    for t in 0..tr.n_mode {
        let n = n1 + t as f64;
        let u = sh.a * e(tau_c * n);
        up.add(term(n) * u / (1.0 - u));
    }
    acc.add(up.value());

    // Lower tail: 1/(1−u) = −u^{−1} − u^{−2}/(1−u^{−1}). With κ = −n the
    // first part is −a^{−1}(−1)^m e(pτ) Σ_{κ≥−n0} (κ−p)^m e((κ−p)(τ−w)).
    let n0 = sh.s + j_down as f64;
    let mut closed = shifted_polylog(m, -n0 - sh.p, tau_c - w);
    if m % 2 == 1 {
        closed = -closed;
    }
    acc.add(-closed * e(tau_c * sh.p) / sh.a);
    let mut down = CompensatedSum::new();
    for t in 0..tr.n_mode {
        let n = n0 - t as f64;
        let uinv = e(-tau_c * n) / sh.a;
        down.add(-term(n) * uinv * uinv / (1.0 - uinv));
    }
    acc.add(down.value());

    Ok(finish(family, k, acc.value()))
}
