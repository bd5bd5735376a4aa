use super::fock::{level, parity};
use super::{apply_mode, AlgebraElement, AlgebraSpec, BasisState, ModeOp, Parity, Sector};
use crate::{Complex64, Error, Result};

/// Heaviest insertion state accepted by the square-bracket machinery.
pub const MAX_INSERTION_WEIGHT: f64 = 4.0;

/// `C(x, m) = x(x−1)⋯(x−m+1)/m!` for any integer `x`.
fn binom(x: i64, m: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..m as i64 {
        acc *= (x - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Common weight of a homogeneous element, or `None` for the zero element.
pub(crate) fn homogeneous_weight(spec: &AlgebraSpec, v: &AlgebraElement) -> Result<Option<f64>> {
    let mut wt: Option<f64> = None;
    for (s, c) in v.terms() {
        if c.norm() == 0.0 {
            continue;
        }
        let l = level(spec, s);
        match wt {
            None => wt = Some(l),
            Some(w) if (w - l).abs() < 1e-12 => {}
            Some(w) => {
                return Err(Error::InvalidParameter(format!("element mixes weights {w} and {l}")));
            }
        }
    }
    Ok(wt)
}

/// Splits an element into homogeneous components, in increasing weight.
pub(crate) fn homogeneous_parts(spec: &AlgebraSpec, v: &AlgebraElement) -> Vec<(f64, AlgebraElement)> {
    let mut parts: Vec<(f64, AlgebraElement)> = Vec::new();
    for (s, c) in v.terms() {
        let l = level(spec, s);
        match parts.iter_mut().find(|(w, _)| (*w - l).abs() < 1e-12) {
            Some((_, e)) => e.add_term(s.clone(), *c),
            None => parts.push((l, AlgebraElement::from_terms([(s.clone(), *c)]))),
        }
    }
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    parts
}

/// Parity of a homogeneous-parity element (even for the zero element).
pub(crate) fn element_parity(spec: &AlgebraSpec, v: &AlgebraElement) -> Result<Parity> {
    let mut p: Option<Parity> = None;
    for (s, c) in v.terms() {
        if c.norm() == 0.0 {
            continue;
        }
        let ps = parity(spec, s);
        match p {
            None => p = Some(ps),
            Some(x) if x == ps => {}
            Some(_) => return Err(Error::InvalidParameter("element mixes parities".into())),
        }
    }
    Ok(p.unwrap_or(Parity::Even))
}

fn max_level(spec: &AlgebraSpec, e: &AlgebraElement) -> f64 {
    e.terms().map(|(s, _)| level(spec, s)).fold(0.0, f64::max)
}

fn vertex_mode_basis(
    spec: &AlgebraSpec,
    sector: &Sector,
    v: &BasisState,
    n: i64,
    psi: &BasisState,
    coeff: Complex64,
    out: &mut AlgebraElement,
) {
    let factors = v.modes();
    if factors.is_empty() {
        if n == -1 {
            out.add_term(psi.clone(), coeff);
        }
        return;
    }
    let fermionic = spec.is_fermionic();
    let l_psi = level(spec, psi);
    let wt_v = level(spec, v);
    let out_level = l_psi + wt_v - n as f64 - 1.0;
    if out_level < -1e-9 {
        return;
    }
    // Σ_j n_j = n + 1 − Σ_j k_j
    let target: i64 = n + 1 - factors.iter().map(|c| c.k as i64).sum::<i64>();
    let creator_bound = (out_level + l_psi).ceil() as i64 + 2;
    let candidates: Vec<Vec<i64>> = factors
        .iter()
        .map(|f| {
            let mut c: Vec<i64> = (-creator_bound..=-1).collect();
            if fermionic {
                let partner = spec.partner(f.species);
                for m in psi.modes().iter().filter(|m| m.species == partner) {
                    c.push(m.k as i64 - 1);
                }
            } else {
                c.push(0);
                for m in psi.modes().iter().filter(|m| m.species == f.species) {
                    if !c.contains(&(m.k as i64)) {
                        c.push(m.k as i64);
                    }
                }
            }
            c
        })
        .collect();
    let mut chosen = vec![0i64; factors.len()];
    fn rec(
        j: usize,
        remaining: i64,
        candidates: &[Vec<i64>],
        chosen: &mut Vec<i64>,
        visit: &mut dyn FnMut(&[i64]),
    ) {
        if j + 1 == candidates.len() {
            if candidates[j].contains(&remaining) {
                chosen[j] = remaining;
                visit(chosen);
            }
            return;
        }
        for &c in &candidates[j] {
            chosen[j] = c;
            rec(j + 1, remaining - c, candidates, chosen, visit);
        }
    }
    let mut visit = |ns: &[i64]| {
        let mut c = coeff;
        for (f, &nj) in factors.iter().zip(ns) {
            c *= binom(-nj - 1, f.k - 1);
        }
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        // normal order: creators (n < 0) left of annihilators, stable
        let mut sign = 1.0;
        if fermionic {
            for a in 0..ns.len() {
                for b in a + 1..ns.len() {
                    if ns[a] >= 0 && ns[b] < 0 {
                        sign = -sign;
                    }
                }
            }
        }
        let mut ordered: Vec<ModeOp> = Vec::with_capacity(ns.len());
        for (f, &nj) in factors.iter().zip(ns) {
            if nj < 0 {
                ordered.push(ModeOp { species: f.species, n: nj });
            }
        }
        for (f, &nj) in factors.iter().zip(ns) {
            if nj >= 0 {
                ordered.push(ModeOp { species: f.species, n: nj });
            }
        }
        let mut state = AlgebraElement::basis(psi.clone());
        for op in ordered.iter().rev() {
            state = apply_mode(spec, sector, *op, &state);
            if state.is_empty() {
                return;
            }
        }
        out.add_scaled(&state, c * sign);
    };
    rec(0, target, &candidates, &mut chosen, &mut visit);
}

/// `v(n)·ψ` for any Fock state `v`, using the free-field normal-ordered
/// product `Y(g_1(−k_1)⋯g_r(−k_r)𝟙, x) = :∂^{(k_1−1)}g_1(x)⋯∂^{(k_r−1)}g_r(x):`.
pub fn vertex_mode(spec: &AlgebraSpec, sector: &Sector, v: &AlgebraElement, n: i64, target: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (vs, vc) in v.terms() {
        for (ps, pc) in target.terms() {
            vertex_mode_basis(spec, sector, vs, n, ps, vc * pc, &mut out);
        }
    }
    out
}

/// Round-mode index of `o_λ(v) = v(wt v − 1 + λ)`, or `None` when `wt v` is
/// not an integer (the zero operator).
pub fn zero_mode(spec: &AlgebraSpec, v: &AlgebraElement, lambda: i64) -> Result<Option<i64>> {
    let wt = homogeneous_weight(spec, v)?.unwrap_or(0.0);
    if (wt - wt.round()).abs() > 1e-12 {
        return Ok(None);
    }
    Ok(Some(wt.round() as i64 - 1 + lambda))
}

fn series_log_g(len: usize) -> Vec<f64> {
    // g(y) = (e^y − 1)/y
    let mut g = vec![1.0; len];
    let mut fact = 1.0;
    for (i, gi) in g.iter_mut().enumerate() {
        fact *= (i + 1) as f64;
        *gi = 1.0 / fact;
    }
    let mut f = vec![0.0; len];
    for n in 1..len {
        let mut s = n as f64 * g[n];
        for k in 1..n {
            s -= k as f64 * f[k] * g[n - k];
        }
        f[n] = s / n as f64;
    }
    f
}

fn series_exp(p: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; p.len()];
    if e.is_empty() {
        return e;
    }
    e[0] = 1.0;
    for n in 1..p.len() {
        let mut s = 0.0;
        for k in 1..=n {
            s += k as f64 * p[k] * e[n - k];
        }
        e[n] = s / n as f64;
    }
    e
}

/// Coefficients `c_{m,j}` with `v[m] = Σ_{j=m}^{j_max} c_{m,j} v(j)` for `v` of
/// weight `wt`, where `Y(e^{y·wt}v, e^y − 1) = Σ v[m] y^{−m−1}`.
pub fn square_bracket_coefficients(wt: f64, m: i64, j_max: i64) -> Vec<(i64, f64)> {
    if j_max < m {
        return Vec::new();
    }
    let len = (j_max - m + 1) as usize;
    let log_g = series_log_g(len);
    let mut out = Vec::with_capacity(len);
    for j in m..=j_max {
        // c_{m,j} = [y^{j−m}] exp(wt·y − (j+1) log g(y))
        let order = (j - m) as usize + 1;
        let mut p: Vec<f64> = log_g[..order].iter().map(|x| x * -(j + 1) as f64).collect();
        if order > 1 {
            p[1] += wt;
        }
        let e = series_exp(&p);
        out.push((j, e[order - 1]));
    }
    out
}

fn check_insertion_weight(wt: f64) -> Result<()> {
    if wt > MAX_INSERTION_WEIGHT + 1e-9 {
        return Err(Error::UnsupportedInsertion(format!(
            "weight {wt} exceeds {MAX_INSERTION_WEIGHT}"
        )));
    }
    Ok(())
}

/// `v[m]·ψ`, exact on Fock states (only finitely many `v(j)` act).
pub fn square_mode(spec: &AlgebraSpec, sector: &Sector, v: &AlgebraElement, m: i64, target: &AlgebraElement) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero();
    for (wt, part) in homogeneous_parts(spec, v) {
        check_insertion_weight(wt)?;
        let j_max = (max_level(spec, target) + wt - 1.0).floor() as i64;
        for (j, c) in square_bracket_coefficients(wt, m, j_max) {
            if c != 0.0 {
                out.add_scaled(&vertex_mode(spec, sector, &part, j, target), Complex64::new(c, 0.0));
            }
        }
    }
    Ok(out)
}

/// `v[n]_h·ψ = Σ_{m≥0} λ^m/m! v[n+m]·ψ`, the square bracket for the shifted
/// grading `L_h(0) = L(0) + (λ/α)J(0)`.
pub fn shifted_square_mode(
    spec: &AlgebraSpec,
    sector: &Sector,
    v: &AlgebraElement,
    n: i64,
    lambda: i64,
    target: &AlgebraElement,
) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero();
    for (wt, part) in homogeneous_parts(spec, v) {
        let j_max = (max_level(spec, target) + wt - 1.0).floor() as i64;
        let mut coeff = 1.0;
        let mut m = 0i64;
        while n + m <= j_max {
            if coeff != 0.0 {
                out.add_scaled(&square_mode(spec, sector, &part, n + m, target)?, Complex64::new(coeff, 0.0));
            }
            m += 1;
            coeff *= lambda as f64 / m as f64;
            if lambda == 0 {
                break;
            }
        }
    }
    Ok(out)
}
