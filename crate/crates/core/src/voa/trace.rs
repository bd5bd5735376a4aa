use super::fock::level;
use super::vertex::{homogeneous_parts, homogeneous_weight};
use super::{apply_mode, square_mode, vertex_mode, AlgebraElement, AlgebraSpec, ModeOp, ModuleSpace};
use crate::specfun::{e, CompensatedSum, ModularPoint};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Trace or supertrace (`σ` inserted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Trace,
    Supertrace,
}

/// An operator on Fock states used inside [`graded_trace`].
#[derive(Clone)]
pub enum TraceOp {
    Mode(ModeOp),
    /// Round mode `v(n)` of a state.
    Vertex { v: AlgebraElement, n: i64 },
    /// Square-bracket mode `v[m]`.
    Square { v: AlgebraElement, m: i64 },
    Custom(Arc<dyn Fn(&AlgebraElement) -> AlgebraElement + Send + Sync>),
}

impl std::fmt::Debug for TraceOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceOp::Mode(op) => write!(f, "Mode({op:?})"),
            TraceOp::Vertex { n, .. } => write!(f, "Vertex(n = {n})"),
            TraceOp::Square { m, .. } => write!(f, "Square(m = {m})"),
            TraceOp::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl TraceOp {
    pub fn apply(&self, module: &ModuleSpace, x: &AlgebraElement) -> Result<AlgebraElement> {
        let (spec, sector) = (module.spec(), module.sector());
        Ok(match self {
            TraceOp::Mode(op) => apply_mode(spec, sector, *op, x),
            TraceOp::Vertex { v, n } => vertex_mode(spec, sector, v, *n, x),
            TraceOp::Square { v, m } => square_mode(spec, sector, v, *m, x)?,
            TraceOp::Custom(f) => f(x),
        })
    }
}

/// Per-state weight `±ζ^{J(0)} q^{L(0) − c/24}` for the `i`-th basis state.
fn boltzmann(module: &ModuleSpace, i: usize, kind: TraceKind, z: Complex64, tau: &ModularPoint) -> Complex64 {
    let c = module.spec().central_charge_f64();
    let sign = if kind == TraceKind::Supertrace && module.parity_of(i).is_odd() { -1.0 } else { 1.0 };
    e(z * module.charge_of(i) + tau.tau() * (module.weight_of(i) - c / 24.0)) * sign
}

/// `Tr/STr (O_1 ⋯ O_r ζ^{J(0)} q^{L(0) − c/24})` over the basis of the module,
/// with `ζ = e(z)`. Operators act on the full Fock space, so intermediate
/// states may leave the level cap; only the diagonal is restricted to it.
pub fn graded_trace(module: &ModuleSpace, ops: &[TraceOp], kind: TraceKind, z: Complex64, tau: &ModularPoint) -> Result<Complex64> {
    let terms: Vec<Result<Complex64>> = (0..module.dim())
        .into_par_iter()
        .map(|i| {
            let psi = &module.basis()[i];
            let mut x = AlgebraElement::basis(psi.clone());
            for op in ops.iter().rev() {
                x = op.apply(module, &x)?;
                if x.is_empty() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
            }
            Ok(x.coeff(psi) * boltzmann(module, i, kind, z, tau))
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t?);
    }
    Ok(acc.value())
}

/// One vertex-operator insertion `Y(x^{L(0)}v, x)` at `x = e(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insertion {
    pub v: AlgebraElement,
    pub w: Complex64,
}

/// Inputs of [`npoint_oracle`].
#[derive(Debug, Clone)]
pub struct OracleRequest<'a> {
    pub module: &'a ModuleSpace,
    pub insertions: Vec<Insertion>,
    pub z: Complex64,
    pub tau: ModularPoint,
    pub kind: TraceKind,
    /// Largest weight raise `wt − j − 1` kept for each inner insertion.
    pub n_mode: usize,
}

/// Checks `0 < Im w_1 < ⋯ < Im w_n < Im τ`, i.e. `|q| < |x_n| < ⋯ < |x_1| < 1`.
pub fn check_nested(insertions: &[Insertion], tau: &ModularPoint) -> Result<()> {
    let mut prev = 0.0;
    for (i, ins) in insertions.iter().enumerate() {
        let im = ins.w.im;
        if !(im > prev) {
            return Err(Error::DomainViolation(format!(
                "insertion {} breaks the nested ordering (Im w = {im})",
                i + 1
            )));
        }
        prev = im;
    }
    if prev >= tau.tau().im {
        return Err(Error::DomainViolation("innermost insertion outside |q| < |x|".into()));
    }
    Ok(())
}

/// `Σ_j x^{wt − j − 1} v(j)·state`, keeping level changes in `[−level, n_mode]`.
fn apply_field(module: &ModuleSpace, ins: &Insertion, x: &AlgebraElement, n_mode: usize) -> AlgebraElement {
    let (spec, sector) = (module.spec(), module.sector());
    let top = x.terms().map(|(s, _)| level(spec, s)).fold(0.0, f64::max);
    let mut out = AlgebraElement::zero();
    for (wt, part) in homogeneous_parts(spec, &ins.v) {
        let j_lo = (wt - 1.0 - n_mode as f64).ceil() as i64;
        let j_hi = (wt - 1.0 + top).floor() as i64;
        for j in j_lo..=j_hi {
            let d = wt - j as f64 - 1.0;
            let img = vertex_mode(spec, sector, &part, j, x);
            if !img.is_empty() {
                out.add_scaled(&img, e(ins.w * d));
            }
        }
    }
    out
}

/// Applies the field of `ins` keeping only the image at oscillator level `target`.
fn apply_field_to_level(module: &ModuleSpace, ins: &Insertion, x: &AlgebraElement, target: f64) -> AlgebraElement {
    let (spec, sector) = (module.spec(), module.sector());
    let mut out = AlgebraElement::zero();
    for (s, c) in x.terms() {
        let single = AlgebraElement::from_terms([(s.clone(), *c)]);
        let d = target - level(spec, s);
        for (wt, part) in homogeneous_parts(spec, &ins.v) {
            let j = wt - 1.0 - d;
            if (j - j.round()).abs() > 1e-9 {
                continue;
            }
            let img = vertex_mode(spec, sector, &part, j.round() as i64, &single);
            if !img.is_empty() {
                out.add_scaled(&img, e(ins.w * d));
            }
        }
    }
    out
}

fn op_level_change(spec: &AlgebraSpec, op: &TraceOp) -> Option<f64> {
    match op {
        TraceOp::Mode(m) => Some(spec.species_weight(m.species) - 1.0 - m.n as f64),
        TraceOp::Vertex { v, n } => homogeneous_weight(spec, v).ok().flatten().map(|wt| wt - 1.0 - *n as f64),
        _ => None,
    }
}

/// Direct truncated evaluation of
/// `Tr/STr Y(x_1^{L(0)}v_1, x_1) ⋯ Y(x_n^{L(0)}v_n, x_n) ζ^{J(0)} q^{L(0) − c/24}`.
pub fn npoint_oracle(req: &OracleRequest<'_>) -> Result<Complex64> {
    npoint_oracle_with_ops(req, &[])
}

/// Like [`npoint_oracle`] with `ops` (applied right to left) inserted between
/// the innermost field and the grading operator.
pub fn npoint_oracle_with_ops(req: &OracleRequest<'_>, ops: &[TraceOp]) -> Result<Complex64> {
    npoint_oracle_sided(req, &[], ops)
}

/// Like [`npoint_oracle_with_ops`] with `left` (applied right to left)
/// inserted before the outermost field as well.
pub fn npoint_oracle_sided(req: &OracleRequest<'_>, left: &[TraceOp], ops: &[TraceOp]) -> Result<Complex64> {
    check_nested(&req.insertions, &req.tau)?;
    if !left.is_empty() && !req.insertions.is_empty() {
        let module = req.module;
        // Total level raised by the left operators, when each has a definite one.
        let shift = left.iter().map(|op| op_level_change(module.spec(), op)).sum::<Option<f64>>();
        let terms: Vec<Result<Complex64>> = (0..module.dim())
            .into_par_iter()
            .map(|i| {
                let psi = &module.basis()[i];
                let mut x = AlgebraElement::basis(psi.clone());
                for op in ops.iter().rev() {
                    x = op.apply(module, &x)?;
                }
                let (first, rest) = req.insertions.split_first().unwrap();
                for ins in rest.iter().rev() {
                    if x.is_empty() {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    x = apply_field(module, ins, &x, req.n_mode);
                }
                x = match shift {
                    Some(d) => apply_field_to_level(module, first, &x, module.level_of(i) - d),
                    None => apply_field(module, first, &x, req.n_mode),
                };
                for op in left.iter().rev() {
                    x = op.apply(module, &x)?;
                }
                Ok(x.coeff(psi) * boltzmann(module, i, req.kind, req.z, &req.tau))
            })
            .collect();
        let mut acc = CompensatedSum::new();
        for t in terms {
            acc.add(t?);
        }
        return Ok(acc.value());
    }
    let module = req.module;
    let spec = module.spec();
    if req.insertions.is_empty() {
        return graded_trace(module, ops, req.kind, req.z, &req.tau);
    }
    let (first, rest) = req.insertions.split_first().unwrap();
    let first_parts = homogeneous_parts(spec, &first.v);
    let terms: Vec<Result<Complex64>> = (0..module.dim())
        .into_par_iter()
        .map(|i| {
            let psi = &module.basis()[i];
            let h = module.level_of(i);
            let mut x = AlgebraElement::basis(psi.clone());
            for op in ops.iter().rev() {
                x = op.apply(module, &x)?;
            }
            for ins in rest.iter().rev() {
                if x.is_empty() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                x = apply_field(module, ins, &x, req.n_mode);
            }
            // The outermost field only needs the mode returning to level h.
            let mut acc = CompensatedSum::new();
            for (s, c) in x.terms() {
                let l = level(spec, s);
                let single = AlgebraElement::from_terms([(s.clone(), *c)]);
                for (wt, part) in &first_parts {
                    let d = h - l;
                    let j = wt - 1.0 - d;
                    if (j - j.round()).abs() > 1e-9 {
                        continue;
                    }
                    let img = vertex_mode(spec, module.sector(), part, j.round() as i64, &single);
                    let coeff = img.coeff(psi);
                    if coeff != Complex64::new(0.0, 0.0) {
                        acc.add(coeff * e(first.w * d));
                    }
                }
            }
            Ok(acc.value() * boltzmann(module, i, req.kind, req.z, &req.tau))
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t?);
    }
    Ok(acc.value())
}
