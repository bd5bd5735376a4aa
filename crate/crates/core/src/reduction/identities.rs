//! Trace identities checked on direct traces. Each function returns
//! `|Σ terms| / Σ |terms|`, or 0 when every term vanishes.

use super::branch::{Branch, BranchSelector};
use super::NPointRequest;
use crate::specfun::{e, CompensatedSum};
use crate::voa::{
    element_parity, homogeneous_weight, npoint_oracle_sided, square_mode, state_charge, AlgebraElement,
    Insertion, Sector, TraceKind, TraceOp,
};
use crate::{Complex64, Error, Result};

struct Terms {
    sum: CompensatedSum,
    scale: f64,
}

impl Terms {
    fn new() -> Self {
        Self { sum: CompensatedSum::new(), scale: 0.0 }
    }

    fn add(&mut self, t: Complex64) {
        self.sum.add(t);
        self.scale += t.norm();
    }

    fn residual(&self) -> f64 {
        let s = self.sum.value().norm();
        if s == 0.0 {
            0.0
        } else {
            s / self.scale
        }
    }
}

struct Vertex {
    v: AlgebraElement,
    weight: f64,
    alpha: f64,
    odd: bool,
}

fn vertex(req: &NPointRequest, v: &AlgebraElement) -> Result<Vertex> {
    let spec = req.module.spec();
    let weight = homogeneous_weight(spec, v)?
        .ok_or_else(|| Error::InvalidParameter("the vertex must be nonzero".into()))?;
    let mut alpha: Option<f64> = None;
    for (s, c) in v.terms() {
        if c.norm() == 0.0 {
            continue;
        }
        let q = state_charge(spec, s);
        if alpha.is_some_and(|a| (a - q).abs() > 1e-12) {
            return Err(Error::InvalidParameter("the vertex must be a J(0) eigenvector".into()));
        }
        alpha = Some(q);
    }
    let odd = element_parity(spec, v)?.is_odd();
    Ok(Vertex { v: v.clone(), weight, alpha: alpha.unwrap_or(0.0), odd })
}

/// `αz`, shifted by `1/2` for odd vertices under the plain trace.
fn alpha_z(req: &NPointRequest, g: &Vertex) -> Complex64 {
    let mut a = req.params.z() * g.alpha;
    if g.odd && req.kind == TraceKind::Trace {
        a += 0.5;
    }
    a
}

fn trace(req: &NPointRequest, insertions: &[Insertion], left: &[TraceOp]) -> Result<Complex64> {
    let mut o = req.oracle();
    o.insertions = insertions.to_vec();
    npoint_oracle_sided(&o, left, &[])
}

/// `p(v, v_1 … v_{k−1})` for `k = 1 … n`.
fn signs(req: &NPointRequest, odd: bool, insertions: &[Insertion]) -> Result<Vec<f64>> {
    let spec = req.module.spec();
    let mut out = Vec::with_capacity(insertions.len());
    let mut before = false;
    for ins in insertions {
        out.push(if odd && before { -1.0 } else { 1.0 });
        before ^= element_parity(spec, &ins.v)?.is_odd();
    }
    Ok(out)
}

/// Adds `Σ_k Σ_m p(v, v_{k−1}) e(w_k β) β^m/m! Z((v[m])_k x_n)` to `terms`.
fn commutator_terms(req: &NPointRequest, g: &Vertex, beta: i64, scale: Complex64, terms: &mut Terms) -> Result<()> {
    let spec = req.module.spec();
    let insertions = &req.insertions;
    let sg = signs(req, g.odd, insertions)?;
    let vac = Sector::vacuum();
    for (k, ins) in insertions.iter().enumerate() {
        let top = ins.v.terms().map(|(s, _)| crate::voa::state_level(spec, s)).fold(0.0, f64::max);
        let m_max = (g.weight + top - 1.0 + 1e-9).floor() as i64;
        let mut fact = 1.0;
        for m in 0..=m_max.max(0) {
            if m > 0 {
                fact *= m as f64;
            }
            let c = (beta as f64).powi(m as i32) / fact;
            if c == 0.0 {
                continue;
            }
            let img = square_mode(spec, &vac, &g.v, m, &ins.v)?;
            if img.max_abs() <= 1e-14 {
                continue;
            }
            let mut ins_k = insertions.clone();
            ins_k[k].v = img;
            let phase = e(ins.w * beta as f64);
            terms.add(scale * sg[k] * c * phase * trace(req, &ins_k, &[])?);
        }
    }
    Ok(())
}

/// `Σ_k p(v, v_{k−1}) Z((v[0])_k x_n)` for `v` the last insertion of `req`,
/// of integer weight, acting on the first `n`. The sum vanishes when
/// `ζ^α = 1` (in particular for `α = 0`).
pub fn identity_v0_sum(req: &NPointRequest) -> Result<f64> {
    let Some((last, rest)) = req.insertions.split_last() else {
        return Err(Error::InvalidParameter("the request needs the vertex as its last insertion".into()));
    };
    let g = vertex(req, &last.v)?;
    if (g.weight - g.weight.round()).abs() > 1e-12 {
        return Err(Error::NonIntegerWeight(format!("wt(v) = {}", g.weight)));
    }
    let sub = req.with_insertions(rest.to_vec());
    sub.validate()?;
    let mut terms = Terms::new();
    commutator_terms(&sub, &g, 0, Complex64::new(1.0, 0.0), &mut terms)?;
    Ok(terms.residual())
}

/// `(1 − ζ^{−α}q^β) Tr(o_β(v) Y(x_1) ⋯ Y(x_n) ⋯) − Σ_k Σ_m e(w_k β) β^m/m! Z((v[m])_k x_n)`
/// with `o_β(v) = v(wt − 1 + β)` to the left of all fields.
pub fn identity_rec1(req: &NPointRequest, v: &AlgebraElement, beta: i64) -> Result<f64> {
    req.validate()?;
    let g = vertex(req, v)?;
    if (g.weight - g.weight.round()).abs() > 1e-12 {
        return Err(Error::NonIntegerWeight(format!("o_β(v) needs an integer weight, got {}", g.weight)));
    }
    let az = alpha_z(req, &g);
    let pref = Complex64::new(1.0, 0.0) - e(req.params.tau().tau() * beta as f64 - az);
    let n = g.weight.round() as i64 - 1 + beta;
    let mut terms = Terms::new();
    terms.add(pref * trace(req, &req.insertions, &[TraceOp::Vertex { v: g.v.clone(), n }])?);
    commutator_terms(req, &g, beta, Complex64::new(-1.0, 0.0), &mut terms)?;
    Ok(terms.residual())
}

/// `Σ_k Σ_m e(w_k λ) λ^m/m! Z((v[m])_k x_n)` where `αz = λτ + μ`.
pub fn identity_zero_res(req: &NPointRequest, v: &AlgebraElement) -> Result<f64> {
    req.validate()?;
    let g = vertex(req, v)?;
    let az = alpha_z(req, &g);
    let lambda = match BranchSelector::classify(az, &req.params.tau()) {
        Ok(Branch::Lattice { lambda, .. }) => lambda,
        Ok(Branch::Generic { .. }) | Err(Error::BranchUnresolved(_)) => {
            return Err(Error::NotOnLattice(format!("αz = {az}")));
        }
        Err(err) => return Err(err),
    };
    let mut terms = Terms::new();
    commutator_terms(req, &g, lambda, Complex64::new(1.0, 0.0), &mut terms)?;
    Ok(terms.residual())
}
