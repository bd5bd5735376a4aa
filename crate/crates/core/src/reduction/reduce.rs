use super::branch::ReducedVertex;
use super::ledger::{CoefficientLedger, LedgerChild, LedgerNode, NodeKey, SpecialFunction, SpecialValue};
use super::NPointRequest;
use crate::specfun::{ModularPoint, Truncation};
use crate::voa::{
    apply_mode, element_parity, graded_trace, npoint_oracle_with_ops, square_mode, state_level, AlgebraElement,
    AlgebraKind, AlgebraSpec, BasisState, Insertion, ModeOp, ModuleSpace, OracleRequest, Sector, TraceKind, TraceOp,
};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative size below which state coefficients produced by mode algebra are
/// treated as cancellation noise.
const STATE_EPS: f64 = 1e-13;

/// What a reduction term multiplies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionTarget {
    /// The Jacobi function of these insertions.
    Request { insertions: Vec<Insertion> },
    /// `Tr(σ U o_λ(g) G)`: the zero mode acts before the fields `U`.
    ZeroMode { op: ModeOp, insertions: Vec<Insertion> },
}

/// One weighted term `factor · special · target` of a reduction stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTerm {
    pub key: NodeKey,
    pub factor: Complex64,
    pub special: Option<SpecialValue>,
    pub target: ReductionTarget,
}

impl ReductionTerm {
    pub fn coefficient(&self) -> Complex64 {
        self.factor * self.special.as_ref().map_or(Complex64::new(1.0, 0.0), |s| s.value)
    }
}

struct Ctx<'a> {
    module: &'a ModuleSpace,
    z: Complex64,
    tau: ModularPoint,
    tr: Truncation,
    kind: TraceKind,
    partition: Complex64,
}

impl<'a> Ctx<'a> {
    fn new(req: &'a NPointRequest) -> Result<Self> {
        let partition = graded_trace(&req.module, &[], req.kind, req.params.z(), &req.params.tau())?;
        Ok(Self::with_partition(req, partition))
    }

    fn with_partition(req: &'a NPointRequest, partition: Complex64) -> Self {
        Self {
            module: &req.module,
            z: req.params.z(),
            tau: req.params.tau(),
            tr: req.truncation,
            kind: req.kind,
            partition,
        }
    }

    fn spec(&self) -> &AlgebraSpec {
        self.module.spec()
    }
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn max_level(spec: &AlgebraSpec, v: &AlgebraElement) -> f64 {
    v.terms().map(|(s, _)| state_level(spec, s)).fold(0.0, f64::max)
}

fn clean(v: AlgebraElement) -> AlgebraElement {
    let scale = v.max_abs();
    v.pruned(STATE_EPS * scale)
}

/// Strips insertions proportional to the vacuum (`Y(𝟙, x) = 1`). Returns the
/// product of their coefficients, or `None` if an insertion is zero.
fn normalize(insertions: Vec<Insertion>) -> Option<(Complex64, Vec<Insertion>)> {
    let mut factor = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(insertions.len());
    for ins in insertions {
        let v = clean(ins.v);
        if v.is_empty() {
            return None;
        }
        let vac = BasisState::vacuum();
        if v.len() == 1 && v.terms().next().map(|(s, _)| s) == Some(&vac) {
            factor *= v.coeff(&vac);
        } else {
            out.push(Insertion { v, w: ins.w });
        }
    }
    Some((factor, out))
}

/// `v = c·𝟙 + Σ_t c_t g_t[−l_t] s_t`, found by peeling the leftmost creator
/// of the heaviest monomial: `g(−l)s = g[−l]s − Σ_{j>−l} c_{−l,j} g(j)s`.
struct Descendant {
    coef: Complex64,
    species: u8,
    l: u32,
    rest: AlgebraElement,
}

fn decompose(spec: &AlgebraSpec, v: &AlgebraElement) -> Result<(Complex64, Vec<Descendant>)> {
    let vac = Sector::vacuum();
    let mut u = clean(v.clone());
    let mut scalar = Complex64::new(0.0, 0.0);
    let mut out = Vec::new();
    let scale = u.max_abs();
    while !u.is_empty() {
        let (s, c) = u
            .terms()
            .max_by(|a, b| state_level(spec, a.0).total_cmp(&state_level(spec, b.0)))
            .map(|(s, c)| (s.clone(), *c))
            .unwrap();
        let Some((cr, rest)) = s.split_first() else {
            scalar += c;
            u = AlgebraElement::from_terms(u.terms().filter(|(t, _)| **t != s).map(|(t, c)| (t.clone(), *c)));
            continue;
        };
        let rest = AlgebraElement::basis(rest);
        let lifted = apply_mode(spec, &vac, ModeOp { species: cr.species, n: -(cr.k as i64) }, &rest);
        let eps = lifted.coeff(&s);
        if eps.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("cannot peel a creator from {s:?}")));
        }
        let coef = c / eps;
        let sq = square_mode(spec, &vac, &spec.generator(cr.species), -(cr.k as i64), &rest)?;
        u.add_scaled(&sq, -coef);
        u = AlgebraElement::from_terms(u.terms().filter(|(t, _)| **t != s).map(|(t, c)| (t.clone(), *c)))
            .pruned(STATE_EPS * scale);
        out.push(Descendant { coef, species: cr.species, l: cr.k, rest });
    }
    Ok((scalar, out))
}

fn parity_bits(spec: &AlgebraSpec, insertions: &[Insertion]) -> Result<Vec<bool>> {
    insertions.iter().map(|i| Ok(element_parity(spec, &i.v)?.is_odd())).collect()
}

/// `Z(…, g[−l]s, …)` with `s` already at position `i`:
/// same-point terms `(−1)^{m+1} C(m+l−1, m) c_{m+l} Z(…, g[m]s, …)`, cross
/// terms `ε_{ik} (−1)^{l−1} C(m+l−1, m) F_{m+l}(w_i − w_k) Z(…, g[m]u_k, …)`
/// and, on the lattice branch, `ε_i (−λ)^{l−1}/(l−1)! e(−λw_i) Tr(σ U o_λ(g) G)`.
/// `ε` collects `(−1)^{p(g)p(u_j)}` over the insertions `g` passes.
fn expand(
    ctx: &Ctx<'_>,
    insertions: &[Insertion],
    i: usize,
    g: &ReducedVertex,
    l: u32,
    coef: Complex64,
) -> Result<Vec<ReductionTerm>> {
    let spec = ctx.spec();
    let vac = Sector::vacuum();
    let gstate = spec.generator(g.species);
    let bits = parity_bits(spec, insertions)?;
    let sign_over = |a: usize, b: usize| -> f64 {
        if !g.odd {
            return 1.0;
        }
        let n = bits[a..b].iter().filter(|x| **x).count();
        if n % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let n = insertions.len();
    let w_i = insertions[i].w;
    let lu = l as u64;
    let mut terms = Vec::new();

    if let (Some(lambda), Some(mode)) = (g.zero_mode_lambda, g.zero_mode_index()) {
        let f = coef * sign_over(i, n) * (-(lambda as f64)).powi(l as i32 - 1) / factorial(lu - 1);
        if f.norm() != 0.0 {
            let special = if lambda != 0 {
                Some(SpecialValue::compute(SpecialFunction::Phase { lambda, w: w_i }, &ctx.tau, &ctx.tr)?)
            } else {
                None
            };
            terms.push(ReductionTerm {
                key: NodeKey { k: 0, m: 0, l: l as i64 },
                factor: f,
                special,
                target: ReductionTarget::ZeroMode {
                    op: ModeOp { species: g.species, n: mode },
                    insertions: insertions.to_vec(),
                },
            });
        }
    }

    for k in 0..n {
        let u = &insertions[k].v;
        let m_max = (g.weight + max_level(spec, u) - 1.0 + 1e-9).floor() as i64;
        for m in 0..=m_max.max(-1) {
            let img = clean(square_mode(spec, &vac, &gstate, m, u)?);
            if img.is_empty() {
                continue;
            }
            let mu = m as u64;
            let b = binom(mu + lu - 1, mu);
            let (factor, function) = if k == i {
                let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
                (coef * sign * b, SpecialFunction::Laurent { family: g.family, k: m as usize + l as usize })
            } else {
                let sign = if (l - 1) % 2 == 0 { 1.0 } else { -1.0 };
                let eps = sign_over(i.min(k), i.max(k));
                let w = w_i - insertions[k].w;
                (coef * sign * eps * b, SpecialFunction::Weierstrass { family: g.family, k: m as usize + l as usize, w })
            };
            let mut target = insertions.to_vec();
            target[k].v = img;
            terms.push(ReductionTerm {
                key: NodeKey { k: k + 1, m, l: l as i64 },
                factor,
                special: Some(SpecialValue::compute(function, &ctx.tau, &ctx.tr)?),
                target: ReductionTarget::Request { insertions: target },
            });
        }
    }
    Ok(terms)
}

/// One reduction stage of the last insertion.
fn stage_terms(ctx: &Ctx<'_>, insertions: &[Insertion]) -> Result<Vec<ReductionTerm>> {
    let spec = ctx.spec();
    let n = insertions.len();
    let last = &insertions[n - 1];
    let (scalar, parts) = decompose(spec, &last.v)?;
    let mut terms = Vec::new();
    if scalar.norm() != 0.0 {
        terms.push(ReductionTerm {
            key: NodeKey { k: n, m: -1, l: 0 },
            factor: scalar,
            special: None,
            target: ReductionTarget::Request { insertions: insertions[..n - 1].to_vec() },
        });
    }
    for d in parts {
        let g = ReducedVertex::resolve(spec, d.species, ctx.z, &ctx.tau, ctx.kind)?;
        let mut ins = insertions.to_vec();
        ins[n - 1].v = d.rest;
        terms.extend(expand(ctx, &ins, n - 1, &g, d.l, d.coef)?);
    }
    Ok(terms)
}

fn build_node(ctx: &Ctx<'_>, term: ReductionTerm) -> Result<Option<LedgerNode>> {
    let ReductionTerm { key, factor, special, target } = term;
    let (insertions, op) = match target {
        ReductionTarget::Request { insertions } => (insertions, None),
        ReductionTarget::ZeroMode { op, insertions } => (insertions, Some(op)),
    };
    let Some((scale, insertions)) = normalize(insertions) else {
        return Ok(None);
    };
    let mut factor = factor * scale;
    let child = match op {
        None => LedgerChild::Reduced { ledger: Box::new(reduce_rec(ctx, insertions)?) },
        Some(op) if matches!(ctx.spec().kind(), AlgebraKind::Heisenberg { .. }) && op.n == 0 => {
            // a^i(0) is the scalar α_i on a Heisenberg Fock module.
            factor *= ctx.module.sector().alpha_of(op.species);
            if factor.norm() == 0.0 {
                return Ok(None);
            }
            LedgerChild::Reduced { ledger: Box::new(reduce_rec(ctx, insertions)?) }
        }
        Some(op) => {
            let req = OracleRequest {
                module: ctx.module,
                insertions: insertions.clone(),
                z: ctx.z,
                tau: ctx.tau,
                kind: ctx.kind,
                n_mode: ctx.tr.n_mode,
            };
            let value = npoint_oracle_with_ops(&req, &[TraceOp::Mode(op)])?;
            LedgerChild::Trace { operator: format!("g{}({})", op.species, op.n), insertions, value }
        }
    };
    if factor.norm() == 0.0 {
        return Ok(None);
    }
    Ok(Some(LedgerNode { key, factor, special, child }))
}

fn reduce_rec(ctx: &Ctx<'_>, insertions: Vec<Insertion>) -> Result<CoefficientLedger> {
    if insertions.is_empty() {
        return Ok(CoefficientLedger::partition(ctx.partition));
    }
    let terms = stage_terms(ctx, &insertions)?;
    let nodes: Vec<Option<LedgerNode>> =
        terms.into_par_iter().map(|t| build_node(ctx, t)).collect::<Result<_>>()?;
    Ok(CoefficientLedger::from_nodes(insertions, nodes.into_iter().flatten().collect()))
}

/// One reduction stage of the last insertion of `req`: the weighted list of
/// functions with fewer insertions (or a lighter last insertion), plus the
/// zero-mode trace term on the lattice branch.
pub fn reduce_step(req: &NPointRequest) -> Result<Vec<ReductionTerm>> {
    req.validate()?;
    if req.insertions.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = Ctx::with_partition(req, Complex64::new(0.0, 0.0));
    stage_terms(&ctx, &req.insertions)
}

/// Expansion of `Z(g[−l].x_1, x_2, …, x_n)` for the generator `g` of
/// `species` and `l ≥ 1`, where `x_1` is the first insertion of `req`.
pub fn reduce_negative_mode(req: &NPointRequest, species: u8, l: u32) -> Result<Vec<ReductionTerm>> {
    req.validate()?;
    if l == 0 {
        return Err(Error::InvalidParameter("negative-mode reduction needs l ≥ 1".into()));
    }
    if req.insertions.is_empty() {
        return Err(Error::InvalidParameter("negative-mode reduction needs an insertion".into()));
    }
    let ctx = Ctx::with_partition(req, Complex64::new(0.0, 0.0));
    let g = ReducedVertex::resolve(ctx.spec(), species, ctx.z, &ctx.tau, ctx.kind)?;
    expand(&ctx, &req.insertions, 0, &g, l, Complex64::new(1.0, 0.0))
}

fn first_empty_stage(ledger: &CoefficientLedger) -> Option<usize> {
    if ledger.nodes.is_empty() {
        return (!ledger.insertions.is_empty()).then(|| ledger.arity());
    }
    ledger.nodes.iter().find_map(|n| match &n.child {
        LedgerChild::Reduced { ledger } => first_empty_stage(ledger),
        LedgerChild::Trace { .. } => None,
    })
}

/// Reduces `req` to partition functions (and direct zero-mode traces where
/// the zero mode is not a scalar), returning the value and its ledger.
pub fn reduce_full(req: &NPointRequest) -> Result<(Complex64, CoefficientLedger)> {
    req.validate()?;
    let ctx = Ctx::new(req)?;
    let n = req.insertions.len();
    let Some((scale, insertions)) = normalize(req.insertions.clone()) else {
        return Err(Error::DegenerateInsertion { stage: n, detail: "an insertion is the zero state".into() });
    };
    let inner = reduce_rec(&ctx, insertions)?;
    let ledger = if inner.insertions.len() == n {
        inner
    } else {
        let node = LedgerNode {
            key: NodeKey { k: 0, m: -1, l: 0 },
            factor: scale,
            special: None,
            child: LedgerChild::Reduced { ledger: Box::new(inner) },
        };
        CoefficientLedger::from_nodes(req.insertions.clone(), vec![node])
    };
    if ledger.leaf_count() == 0 {
        let stage = first_empty_stage(&ledger).unwrap_or(n);
        return Err(Error::DegenerateInsertion {
            stage,
            detail: "every reduction term vanishes identically".into(),
        });
    }
    let mass: f64 = ledger.nodes.iter().map(|x| x.contribution().norm()).sum();
    if n > 0 && ledger.value.norm() <= req.truncation.tol * mass {
        return Err(Error::DegenerateInsertion {
            stage: n,
            detail: format!("reduction terms cancel to {:.3e}", ledger.value.norm()),
        });
    }
    Ok((ledger.value, ledger))
}
