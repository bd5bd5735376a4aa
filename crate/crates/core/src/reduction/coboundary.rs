use super::branch::{Branch, BranchSelector, FunctionFamily, ReducedVertex};
use super::reduce::reduce_full;
use super::NPointRequest;
use crate::specfun::{e, CompensatedSum, ModularPoint};
use crate::voa::{
    element_parity, homogeneous_weight, npoint_oracle_with_ops, shifted_square_mode, square_mode, state_charge, AlgebraElement,
    AlgebraKind, AlgebraSpec, Insertion, ModeOp, OracleRequest, Sector, TraceKind, TraceOp,
};
use crate::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Seed of the residual sample grids.
pub const GRID_SEED: u64 = 0x4A43;

/// Zero-mode operator `g(n)` of a generator, inserted between the fields and
/// the grading operator.
pub type ZeroModeOp = TraceOp;

/// A function of `n` insertions that can also be evaluated with zero-mode
/// operators acting first, i.e. `Tr(σ U o_1 ⋯ o_r G)`.
pub trait NPointEvaluable: Send + Sync {
    fn arity(&self) -> usize;
    /// Module, parameters, trace kind and truncation; its insertions are unused.
    fn template(&self) -> &NPointRequest;
    fn eval(&self, insertions: &[Insertion], ops: &[ZeroModeOp]) -> Result<Complex64>;
}

fn check_arity(f: &dyn NPointEvaluable, insertions: &[Insertion]) -> Result<()> {
    if insertions.len() != f.arity() {
        return Err(Error::InvalidParameter(format!(
            "expected {} insertions, got {}",
            f.arity(),
            insertions.len()
        )));
    }
    Ok(())
}

fn oracle_with_ops(template: &NPointRequest, insertions: &[Insertion], ops: &[ZeroModeOp]) -> Result<Complex64> {
    let req = OracleRequest {
        module: &template.module,
        insertions: insertions.to_vec(),
        z: template.params.z(),
        tau: template.params.tau(),
        kind: template.kind,
        n_mode: template.truncation.n_mode,
    };
    npoint_oracle_with_ops(&req, ops)
}

/// The zero function.
pub struct ZeroFunction {
    pub arity: usize,
    pub template: NPointRequest,
}

impl NPointEvaluable for ZeroFunction {
    fn arity(&self) -> usize {
        self.arity
    }

    fn template(&self) -> &NPointRequest {
        &self.template
    }

    fn eval(&self, insertions: &[Insertion], _ops: &[ZeroModeOp]) -> Result<Complex64> {
        check_arity(self, insertions)?;
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// Direct truncated trace.
pub struct OracleFunction {
    pub arity: usize,
    pub template: NPointRequest,
}

impl NPointEvaluable for OracleFunction {
    fn arity(&self) -> usize {
        self.arity
    }

    fn template(&self) -> &NPointRequest {
        &self.template
    }

    fn eval(&self, insertions: &[Insertion], ops: &[ZeroModeOp]) -> Result<Complex64> {
        check_arity(self, insertions)?;
        oracle_with_ops(&self.template, insertions, ops)
    }
}

/// Evaluation by full reduction. Heisenberg zero modes `a^i(0)` act as the
/// scalars `α_i`; other zero modes fall back to the direct trace.
pub struct ReducedFunction {
    pub arity: usize,
    pub template: NPointRequest,
}

impl NPointEvaluable for ReducedFunction {
    fn arity(&self) -> usize {
        self.arity
    }

    fn template(&self) -> &NPointRequest {
        &self.template
    }

    fn eval(&self, insertions: &[Insertion], ops: &[ZeroModeOp]) -> Result<Complex64> {
        check_arity(self, insertions)?;
        let module = &self.template.module;
        let heisenberg = matches!(module.spec().kind(), AlgebraKind::Heisenberg { .. });
        let mut scalar = 1.0;
        for op in ops {
            match op {
                TraceOp::Mode(m) if heisenberg && m.n == 0 => scalar *= module.sector().alpha_of(m.species),
                _ => return oracle_with_ops(&self.template, insertions, ops),
            }
        }
        if scalar == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match reduce_full(&self.template.with_insertions(insertions.to_vec())) {
            Ok((v, _)) => Ok(v * scalar),
            Err(Error::DegenerateInsertion { .. }) => Ok(Complex64::new(0.0, 0.0)),
            Err(err) => Err(err),
        }
    }
}

/// The shifted-grading function
/// `Tr(Y(x^{L_h(0)}v_1, x_1) ⋯ g q^{L_h(0)})` with `L_h(0) = L(0) + (λ/α)J(0)`
/// and `g = e((μ/α)J(0))`, expressed through `inner`, the Jacobi function at
/// `z = (λτ + μ)/α`: each insertion of charge `α_k` gains `e(w_k λ α_k/α)`.
pub struct ShiftedFunction {
    pub inner: Arc<dyn NPointEvaluable>,
    pub lambda: i64,
    pub mu: i64,
    pub alpha: f64,
}

impl ShiftedFunction {
    /// Wraps the reduced Jacobi function of `template`, whose `z` must
    /// satisfy `αz = λτ + μ` (after the supertrace shift for odd vertices).
    pub fn reduced(template: &NPointRequest, arity: usize, lambda: i64, mu: i64, alpha: f64) -> Result<Self> {
        if alpha == 0.0 {
            return Err(Error::AdmissibilityViolation("the shifted grading needs α ≠ 0".into()));
        }
        let params = template.params.with_shift(lambda, mu);
        let inner = ReducedFunction { arity, template: NPointRequest { params, ..template.clone() } };
        Ok(Self { inner: Arc::new(inner), lambda, mu, alpha })
    }

    fn prefactor(&self, insertions: &[Insertion]) -> Result<Complex64> {
        let spec = self.inner.template().module.spec();
        let mut f = Complex64::new(1.0, 0.0);
        for ins in insertions {
            let a = element_charge(spec, &ins.v)?;
            f *= e(ins.w * (self.lambda as f64 * a / self.alpha));
        }
        Ok(f)
    }
}

impl NPointEvaluable for ShiftedFunction {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn template(&self) -> &NPointRequest {
        self.inner.template()
    }

    fn eval(&self, insertions: &[Insertion], ops: &[ZeroModeOp]) -> Result<Complex64> {
        Ok(self.prefactor(insertions)? * self.inner.eval(insertions, ops)?)
    }
}

/// Common `J(0)` charge of an element.
fn element_charge(spec: &AlgebraSpec, v: &AlgebraElement) -> Result<f64> {
    let mut charge: Option<f64> = None;
    for (s, c) in v.terms() {
        if c.norm() == 0.0 {
            continue;
        }
        let q = state_charge(spec, s);
        match charge {
            None => charge = Some(q),
            Some(x) if (x - q).abs() < 1e-12 => {}
            Some(_) => {
                return Err(Error::AdmissibilityViolation("insertion is not a J(0) eigenvector".into()));
            }
        }
    }
    Ok(charge.unwrap_or(0.0))
}

/// The four coboundary operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CoboundaryVariant {
    /// Generic or lattice Jacobi reduction with `v[l].v_k = 0` for `l ≥ 1`.
    Main,
    /// Generic or lattice Jacobi reduction.
    Simplest,
    /// Shifted grading `L_h(0)` and automorphism `e((μ/α)J(0))`.
    Shifted { lambda: i64, mu: i64 },
    /// Superalgebra reduction with deformed Weierstrass coefficients.
    Super,
}

/// Data a variant resolves for a vertex: charge, lattice point, twists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantData {
    pub alpha: f64,
    pub lambda: Option<i64>,
    pub mu: Option<i64>,
    pub theta: Complex64,
    pub phi: Complex64,
}

/// `v = c·g` for a generator `g`; returns `(c, species)`.
fn as_generator(v: &AlgebraElement) -> Option<(Complex64, u8)> {
    let mut it = v.terms().filter(|(_, c)| c.norm() != 0.0);
    let (s, c) = it.next()?;
    if it.next().is_some() {
        return None;
    }
    match s.modes() {
        [cr] if cr.k == 1 => Some((*c, cr.species)),
        _ => None,
    }
}

/// `v = c·𝟙`; the zero element counts with `c = 0`.
fn vacuum_multiple(v: &AlgebraElement) -> Option<Complex64> {
    let mut c = Complex64::new(0.0, 0.0);
    for (s, x) in v.terms() {
        if x.norm() == 0.0 {
            continue;
        }
        if !s.is_vacuum() {
            return None;
        }
        c += x;
    }
    Some(c)
}

fn max_level(spec: &AlgebraSpec, v: &AlgebraElement) -> f64 {
    v.terms().map(|(s, _)| crate::voa::state_level(spec, s)).fold(0.0, f64::max)
}

/// Weight, charge and parity of a coboundary vertex.
#[derive(Debug, Clone, Copy)]
struct VertexData {
    weight: f64,
    alpha: f64,
    odd: bool,
}

fn vertex_data(spec: &AlgebraSpec, v: &AlgebraElement) -> Result<VertexData> {
    let weight = homogeneous_weight(spec, v)
        .map_err(|_| Error::AdmissibilityViolation("the coboundary vertex must be L(0)-homogeneous".into()))?
        .ok_or_else(|| Error::AdmissibilityViolation("the coboundary vertex is zero".into()))?;
    let alpha = element_charge(spec, v)?;
    let odd = element_parity(spec, v)?.is_odd();
    Ok(VertexData { weight, alpha, odd })
}

struct Resolved {
    family: FunctionFamily,
    data: VariantData,
    /// Zero-mode term: round-mode index `wt − 1 + λ` and `λ` of the phase `e(−λw)`.
    zero: Option<(i64, i64)>,
}

impl CoboundaryVariant {
    fn resolve(&self, g: VertexData, template: &NPointRequest) -> Result<Resolved> {
        let p = template.params;
        let tau = p.tau();
        let mut alpha_z = p.z() * g.alpha;
        if g.odd && template.kind == TraceKind::Trace {
            alpha_z += 0.5;
        }
        let phi = e(Complex64::new(g.weight, 0.0));
        let theta = e(alpha_z).inv();
        let mut data = VariantData { alpha: g.alpha, lambda: None, mu: None, theta, phi };
        let wt = g.weight.round() as i64;
        let (family, zero) = match *self {
            CoboundaryVariant::Main | CoboundaryVariant::Simplest => {
                let (family, lambda) =
                    ReducedVertex::family_for(g.weight, g.alpha, g.odd, p.z(), &tau, template.kind)?;
                if lambda.is_some() {
                    if let Ok(Branch::Lattice { lambda, mu }) = BranchSelector::classify(alpha_z, &tau) {
                        data.lambda = Some(lambda);
                        data.mu = Some(mu);
                    }
                }
                (family, lambda.map(|l| (wt - 1 + l, l)))
            }
            CoboundaryVariant::Super => {
                if (theta.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::AdmissibilityViolation(format!(
                        "superalgebra variant needs θ ∈ U(1), got |θ| = {}",
                        theta.norm()
                    )));
                }
                if let Some(t) = p.twist() {
                    if (t.theta() - theta).norm() > 1e-9 || (t.phi() - phi).norm() > 1e-9 {
                        return Err(Error::AdmissibilityViolation(format!(
                            "vertex has (θ, φ) = ({theta}, {phi}), request twist is ({}, {})",
                            t.theta(),
                            t.phi()
                        )));
                    }
                }
                let frac = g.weight - g.weight.floor();
                let lambda = if frac.abs() < 1e-12 { 0.0 } else { frac };
                let trivial = (theta - 1.0).norm() < 1e-12 && (phi - 1.0).norm() < 1e-12;
                (FunctionFamily::Deformed { theta, lambda }, trivial.then_some((wt - 1, 0)))
            }
            CoboundaryVariant::Shifted { lambda, mu } => {
                if g.alpha == 0.0 {
                    return Err(Error::AdmissibilityViolation(
                        "shifted variant needs a vertex with J(0)-charge α ≠ 0".into(),
                    ));
                }
                if let Some(s) = p.shift() {
                    if s != (lambda, mu) {
                        return Err(Error::AdmissibilityViolation(format!(
                            "request shift {s:?} differs from variant ({lambda}, {mu})"
                        )));
                    }
                }
                let want = tau.tau() * lambda as f64 + mu as f64;
                if (alpha_z - want).norm() > super::TOL_LATTICE * (1.0 + want.norm()) {
                    return Err(Error::AdmissibilityViolation(format!(
                        "shifted variant needs αz = λτ + μ = {want}, got {alpha_z}"
                    )));
                }
                if (g.weight - g.weight.round()).abs() > 1e-12 {
                    return Err(Error::AdmissibilityViolation(format!(
                        "shifted variant needs an integer-weight vertex, got {}",
                        g.weight
                    )));
                }
                data.lambda = Some(lambda);
                data.mu = Some(mu);
                (FunctionFamily::Plain, Some((wt - 1 + lambda, 0)))
            }
        };
        Ok(Resolved { family, data, zero })
    }
}

/// `δ^n(x_{n+1})` applied to an n-point function; the result takes `n + 1`
/// insertions, the last being `x_{n+1}`.
pub struct Coboundary {
    variant: CoboundaryVariant,
    target: Arc<dyn NPointEvaluable>,
    vertex: AlgebraElement,
    n: usize,
}

impl Coboundary {
    pub fn variant(&self) -> CoboundaryVariant {
        self.variant
    }

    /// Variant data resolved for the vertex given to [`coboundary_apply`].
    pub fn data(&self) -> Result<VariantData> {
        let t = self.target.template();
        let g = vertex_data(t.module.spec(), &self.vertex)?;
        Ok(self.variant.resolve(g, t)?.data)
    }

    /// Zero-mode operator `o_λ(v) = v(wt − 1 + λ)`; Heisenberg generators
    /// use their mode so that [`ReducedFunction`] can act by the sector charge.
    fn zero_op(spec: &AlgebraSpec, v: &AlgebraElement, n: i64) -> (Complex64, ZeroModeOp) {
        if let (AlgebraKind::Heisenberg { .. }, Some((c, species))) = (spec.kind(), as_generator(v)) {
            return (c, TraceOp::Mode(ModeOp { species, n }));
        }
        (Complex64::new(1.0, 0.0), TraceOp::Vertex { v: v.clone(), n })
    }
}

impl NPointEvaluable for Coboundary {
    fn arity(&self) -> usize {
        self.n + 1
    }

    fn template(&self) -> &NPointRequest {
        self.target.template()
    }

    fn eval(&self, insertions: &[Insertion], ops: &[ZeroModeOp]) -> Result<Complex64> {
        check_arity(self, insertions)?;
        let template = self.target.template();
        let spec = template.module.spec();
        let tau = template.params.tau();
        let tr = template.truncation;
        let (head, last) = insertions.split_at(self.n);
        let last = &last[0];
        if let Some(c) = vacuum_multiple(&last.v) {
            return Ok(c * self.target.eval(head, ops)?);
        }
        let v = &last.v;
        let g = vertex_data(spec, v)?;
        let r = self.variant.resolve(g, template)?;
        let vac = Sector::vacuum();
        if self.variant == CoboundaryVariant::Main {
            for (k, u) in head.iter().enumerate() {
                let top = (g.weight + max_level(spec, &u.v)).floor() as i64;
                for l in 1..=top.max(1) {
                    if square_mode(spec, &vac, v, l, &u.v)?.max_abs() > 1e-12 {
                        return Err(Error::AdmissibilityViolation(format!(
                            "v[{l}].v_{} ≠ 0 for the main coboundary",
                            k + 1
                        )));
                    }
                }
            }
        }
        let bits: Vec<bool> =
            head.iter().map(|u| Ok(element_parity(spec, &u.v)?.is_odd())).collect::<Result<_>>()?;
        let mut acc = CompensatedSum::new();
        if let Some((mode, lambda)) = r.zero {
            let (c, op) = Self::zero_op(spec, v, mode);
            let mut all_ops = vec![op];
            all_ops.extend_from_slice(ops);
            let phase = e(-last.w * lambda as f64);
            acc.add(c * phase * self.target.eval(head, &all_ops)?);
        }
        for k in 0..self.n {
            let u = &head[k].v;
            let sign = if g.odd && bits[k..].iter().filter(|b| **b).count() % 2 == 1 { -1.0 } else { 1.0 };
            let m_max = (g.weight + max_level(spec, u) - 1.0 + 1e-9).floor() as i64;
            for m in 0..=m_max {
                let img = match self.variant {
                    CoboundaryVariant::Shifted { lambda, .. } => shifted_square_mode(spec, &vac, v, m, lambda, u)?,
                    _ => square_mode(spec, &vac, v, m, u)?,
                };
                if img.max_abs() <= 1e-14 {
                    continue;
                }
                let f = r.family.eval(m as usize + 1, last.w - head[k].w, &tau, &tr)?;
                let mut ins = head.to_vec();
                ins[k].v = img;
                acc.add(f * sign * self.target.eval(&ins, ops)?);
            }
        }
        Ok(acc.value())
    }
}

/// `δ^n(x_{n+1})·target` for the vertex `x_next`, a homogeneous `J(0)`
/// eigenvector.
pub fn coboundary_apply(
    n: usize,
    x_next: &AlgebraElement,
    variant: CoboundaryVariant,
    target: Arc<dyn NPointEvaluable>,
) -> Result<Coboundary> {
    if target.arity() != n {
        return Err(Error::InvalidParameter(format!("target has arity {}, expected {n}", target.arity())));
    }
    let t = target.template();
    let g = vertex_data(t.module.spec(), x_next)?;
    variant.resolve(g, t)?;
    Ok(Coboundary { variant, target, vertex: x_next.clone(), n })
}

/// `count` nested position tuples `0 < Im w_1 < ⋯ < Im w_points < Im τ`
/// with gaps of at least `0.04 Im τ`, from the fixed seed [`GRID_SEED`].
pub fn sample_grid(points: usize, count: usize, tau: &ModularPoint) -> Result<Vec<Vec<Complex64>>> {
    if count == 0 || points == 0 || points > 12 {
        return Err(Error::GridDegenerate(format!("{count} samples of {points} points")));
    }
    let t = tau.tau().im;
    let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED);
    let slot = 0.9 / points as f64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let pts = (0..points)
            .map(|i| {
                let im = (0.05 + slot * (i as f64 + 0.2 + 0.6 * rng.gen::<f64>())) * t;
                Complex64::new(rng.gen::<f64>(), im)
            })
            .collect();
        out.push(pts);
    }
    Ok(out)
}

fn with_positions(states: &[AlgebraElement], ws: &[Complex64]) -> Vec<Insertion> {
    states.iter().zip(ws).map(|(v, w)| Insertion { v: v.clone(), w: *w }).collect()
}

/// `max_s |δ^{n+1}(x_{n+2})δ^n(x_{n+1})·target| / max_s |target|` over the
/// grid, with insertion states `states` (length n) followed by `x1`, `x2`.
pub fn chain_condition_residual(
    n: usize,
    states: &[AlgebraElement],
    x1: &AlgebraElement,
    x2: &AlgebraElement,
    variant: CoboundaryVariant,
    target: Arc<dyn NPointEvaluable>,
    grid: &[Vec<Complex64>],
) -> Result<f64> {
    if states.len() != n {
        return Err(Error::InvalidParameter(format!("{} states for n = {n}", states.len())));
    }
    if grid.is_empty() || grid.iter().any(|g| g.len() != n + 2) {
        return Err(Error::GridDegenerate(format!("grid points must carry {} positions", n + 2)));
    }
    let first: Arc<dyn NPointEvaluable> = Arc::new(coboundary_apply(n, x1, variant, target.clone())?);
    let second = coboundary_apply(n + 1, x2, variant, first)?;
    let mut all = states.to_vec();
    all.push(x1.clone());
    all.push(x2.clone());
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for ws in grid {
        num = num.max(second.eval(&with_positions(&all, ws), &[])?.norm());
        den = den.max(target.eval(&with_positions(states, &ws[..n]), &[])?.norm());
    }
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den.max(f64::MIN_POSITIVE))
}

fn kz_parts(req: &NPointRequest, variant: CoboundaryVariant, perturb: f64) -> Result<(Complex64, Complex64)> {
    req.validate()?;
    let n1 = req.insertions.len();
    if n1 == 0 {
        return Err(Error::InvalidParameter("the KZ residual needs at least one insertion".into()));
    }
    let n = n1 - 1;
    let x_next = &req.insertions[n].v;
    let spec = req.module.spec();
    let (lhs, target): (Complex64, Arc<dyn NPointEvaluable>) = match variant {
        CoboundaryVariant::Shifted { lambda, mu } => {
            let alpha = element_charge(spec, x_next)?;
            let odd = element_parity(spec, x_next)?.is_odd();
            let mut alpha_z = req.params.z() * alpha;
            if odd && req.kind == TraceKind::Trace {
                alpha_z += 0.5;
            }
            let want = req.params.tau().tau() * lambda as f64 + mu as f64;
            if (alpha_z - want).norm() > 1e-9 * (1.0 + want.norm()) {
                return Err(Error::AdmissibilityViolation(format!(
                    "shifted variant needs αz = λτ + μ = {want}, got {alpha_z}"
                )));
            }
            let full = ShiftedFunction::reduced(req, n1, lambda, mu, alpha)?;
            let target = ShiftedFunction::reduced(req, n, lambda, mu, alpha)?;
            let inner = full.inner.template().with_insertions(req.insertions.clone());
            let value = reduced_value(&inner, perturb)?;
            (value * full.prefactor(&req.insertions)?, Arc::new(target))
        }
        _ => {
            let target = ReducedFunction { arity: n, template: req.clone() };
            (reduced_value(req, perturb)?, Arc::new(target))
        }
    };
    let op = coboundary_apply(n, x_next, variant, target)?;
    let rhs = op.eval(&req.insertions, &[])?;
    Ok((lhs, rhs))
}

fn reduced_value(req: &NPointRequest, perturb: f64) -> Result<Complex64> {
    match reduce_full(req) {
        Ok((_, ledger)) if perturb != 1.0 => Ok(ledger.perturbed(perturb).value),
        Ok((v, _)) => Ok(v),
        Err(Error::DegenerateInsertion { .. }) => Ok(Complex64::new(0.0, 0.0)),
        Err(err) => Err(err),
    }
}

fn relative(lhs: Complex64, rhs: Complex64) -> f64 {
    let d = (lhs - rhs).norm();
    if d == 0.0 {
        return 0.0;
    }
    d / lhs.norm().max(rhs.norm())
}

/// `|𝒵(x_{n+1}) − δ^n(x_{n+1})𝒵(x_n)| / |𝒵(x_{n+1})|`, both sides from
/// [`reduce_full`]: the reduction-generated function solves the KZ-type
/// equation of the variant.
pub fn kz_residual(req: &NPointRequest, variant: CoboundaryVariant) -> Result<f64> {
    let (lhs, rhs) = kz_parts(req, variant, 1.0)?;
    Ok(relative(lhs, rhs))
}

/// [`kz_residual`] with the dominant top-level ledger coefficient of the
/// `(n+1)`-point function scaled by `scale`.
pub fn kz_residual_perturbed(req: &NPointRequest, variant: CoboundaryVariant, scale: f64) -> Result<f64> {
    let (lhs, rhs) = kz_parts(req, variant, scale)?;
    Ok(relative(lhs, rhs))
}
