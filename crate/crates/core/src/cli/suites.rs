//! Verification suites behind `jrl verify`. Items run in parallel; checks are
//! reported in declaration order.

use super::report::{cjson, Bound, Check, Report};
use crate::reduction::{
    chain_condition_residual, identity_rec1, identity_v0_sum, identity_zero_res, kz_residual, kz_residual_perturbed,
    reduce_full, sample_grid, CoboundaryVariant, JacobiParams, NPointEvaluable, NPointRequest, ReducedFunction,
    SpecialFunction,
};
use crate::specfun::{
    bernoulli_f64, e, eisenstein, eisenstein_tilde, eisenstein_twisted, laurent_coeffs_p1, p1_twisted_laurent,
    weier_p, weier_p_deformed, weier_p_tilde, weier_p_twisted, AnnulusPoint, LaurentKind, ModularPoint, Truncation,
    TwistPair,
};
use crate::voa::{
    check_nested, enumerate_basis, graded_trace, npoint_oracle, AlgebraElement, AlgebraSpec, BasisState, Creator,
    Insertion, Sector, TraceKind,
};
use crate::{Complex64, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Specfun,
    Voa,
    Reduction,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Voa => "voa",
            Suite::Reduction => "reduction",
            Suite::All => "all",
        }
    }
}

type Item = fn() -> Vec<Check>;

const SPECFUN: &[Item] = &[
    eisenstein_exact,
    p1_twisted_shift,
    gkl_expansion,
    derivative_chains,
    laurent_fits,
    modular_anomaly,
];

const VOA: &[Item] = &[dimensions, partition_functions, one_point_translation, nesting_guard];

const REDUCTION: &[Item] = &[
    oracle_heisenberg,
    oracle_complex_fermion,
    oracle_real_fermion,
    identities_v0,
    identities_rec1,
    identities_zero_res,
    chain_condition,
];

fn items(suite: Suite) -> Vec<Item> {
    match suite {
        Suite::Specfun => SPECFUN.to_vec(),
        Suite::Voa => VOA.to_vec(),
        Suite::Reduction => REDUCTION.to_vec(),
        Suite::All => [SPECFUN, VOA, REDUCTION].concat(),
    }
}

/// Runs `suite` on the current rayon pool. `tol` replaces the tolerance of
/// every upper-bound check.
pub fn run_suite(suite: Suite, tol: Option<f64>) -> Report {
    let batches: Vec<Vec<Check>> = items(suite).par_iter().map(|f| f()).collect();
    let mut checks: Vec<Check> = batches.into_iter().flatten().collect();
    if let Some(t) = tol {
        for c in &mut checks {
            c.override_tolerance(t);
        }
    }
    Report::new("verify", Some(suite.name()), checks)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn guard(name: &str, params: Value, tol: f64, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|err| Check::failed(name, params, tol, &err))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}

fn half_i() -> ModularPoint {
    ModularPoint::new(c(0.0, 0.5)).expect("τ = 0.5i")
}

// special functions

fn eisenstein_exact() -> Vec<Check> {
    let tau = half_i();
    let tr = Truncation::default();
    let odd = (1..=9).step_by(2).map(|k| eisenstein(k, &tau, &tr).norm()).fold(0.0, f64::max);
    let e0 = eisenstein(0, &tau, &tr);
    vec![
        Check::new("specfun.odd_eisenstein_vanish", json!({"k": [1, 3, 5, 7, 9], "tau": [0.0, 0.5]}), json!(odd), odd, 0.0),
        Check::new("specfun.e0_is_minus_one", json!({"tau": [0.0, 0.5]}), cjson(e0), (e0 + 1.0).norm(), 0.0),
    ]
}

fn p1_twisted_shift() -> Vec<Check> {
    let tau = half_i();
    let tr = Truncation::default();
    let w = c(0.31, 0.07);
    (-2..=3i64)
        .map(|l| {
            let params = json!({"lambda": l, "w": [w.re, w.im], "tau": [0.0, 0.5]});
            guard("specfun.p1_twisted_shift", params.clone(), 1e-12, || {
                let p = AnnulusPoint::new(w, tau)?;
                let lhs = weier_p_twisted(1, l, &p, &tr)?;
                let rhs = e(-w * l as f64) * (weier_p(1, &p, &tr)? + 0.5);
                Ok(Check::new("specfun.p1_twisted_shift", params, cjson(lhs), (lhs - rhs).norm(), 1e-12))
            })
        })
        .collect()
}

/// `E_k` from its Lambert series, summed directly.
fn lambert_eisenstein(k: usize, q: Complex64, n_q: usize) -> Complex64 {
    if k == 0 {
        return c(-1.0, 0.0);
    }
    if k % 2 == 1 {
        return c(0.0, 0.0);
    }
    let fact = |n: usize| (1..=n).fold(1.0, |a, i| a * i as f64);
    let mut s = c(0.0, 0.0);
    for n in (1..=n_q).rev() {
        let qn = q.powi(n as i32);
        s += qn / (1.0 - qn) * (n as f64).powi(k as i32 - 1);
    }
    s * (2.0 / fact(k - 1)) - bernoulli_f64(k) / fact(k)
}

fn gkl_expansion() -> Vec<Check> {
    let tau = ModularPoint::new(c(0.1, 0.8)).expect("τ");
    let tr = Truncation::default();
    (-2..=3i64)
        .map(|l| {
            let mut worst = 0.0f64;
            for k in 0..=8usize {
                let got = eisenstein_twisted(k, l, &tau, &tr);
                let mut want = c(0.0, 0.0);
                let mut fact = 1.0;
                for j in 0..=k {
                    if j > 0 {
                        fact *= j as f64;
                    }
                    want += lambert_eisenstein(k - j, tau.nome(), 200) * ((l as f64).powi(j as i32) / fact);
                }
                worst = worst.max((got - want).norm() / want.norm().max(1.0));
            }
            Check::new(
                "specfun.twisted_eisenstein_expansion",
                json!({"lambda": l, "k_max": 8, "tau": [0.1, 0.8]}),
                json!(null),
                worst,
                1e-12,
            )
        })
        .collect()
}

fn derivative_chains() -> Vec<Check> {
    let tau = half_i();
    let tr = Truncation::default();
    let w0 = c(0.31, 0.07);
    let z = c(0.21, 0.13);
    let twist = TwistPair::new(c(0.6, 0.8), 0.5).expect("twist");
    type Eval = Box<dyn Fn(usize, Complex64) -> Result<Complex64>>;
    let fams: Vec<(&str, Eval)> = vec![
        ("P", Box::new(move |m, w| weier_p(m, &AnnulusPoint::new(w, tau)?, &tr))),
        ("P_lambda", Box::new(move |m, w| weier_p_twisted(m, 2, &AnnulusPoint::new(w, tau)?, &tr))),
        ("P_tilde", Box::new(move |m, w| weier_p_tilde(m, &AnnulusPoint::new(w, tau)?, z, &tr))),
        ("P_deformed", Box::new(move |m, w| weier_p_deformed(m, &twist, &AnnulusPoint::new(w, tau)?, &tr))),
    ];
    let h = 1e-3;
    fams.iter()
        .map(|(name, f)| {
            let params = json!({"family": name, "m": [1, 2, 3, 4], "w": [w0.re, w0.im], "tau": [0.0, 0.5], "h": h});
            guard("specfun.derivative_chain", params.clone(), 1e-6, || {
                let mut worst = 0.0f64;
                for m in 1..=4 {
                    let next = f(m + 1, w0)?;
                    let num = -f(m, w0 + 2.0 * h)? + f(m, w0 + h)? * 8.0 - f(m, w0 - h)? * 8.0 + f(m, w0 - 2.0 * h)?;
                    let fd = num / (12.0 * h) / c(0.0, 2.0 * PI) * (-1.0 / m as f64);
                    worst = worst.max(rel(next, fd));
                }
                Ok(Check::new("specfun.derivative_chain", params, json!(null), worst, 1e-6))
            })
        })
        .collect()
}

fn laurent_fits() -> Vec<Check> {
    let tau = half_i();
    let tr = Truncation::default();
    let mut out: Vec<Check> = (-2..=3i64)
        .map(|l| {
            let params = json!({"kind": "plain_twisted", "lambda": l, "k_max": 6, "tau": [0.0, 0.5]});
            guard("specfun.laurent_twisted", params.clone(), 1e-8, || {
                let fit = laurent_coeffs_p1(LaurentKind::PlainTwisted(l), &tau, 6, &tr)?;
                let mut worst = (fit.residue - 1.0).norm();
                for (i, got) in fit.coeffs.iter().enumerate() {
                    worst = worst.max((got + p1_twisted_laurent(i + 1, l, &tau, &tr)).norm());
                }
                Ok(Check::new("specfun.laurent_twisted", params, json!(null), worst, 1e-8))
            })
        })
        .collect();
    let z = c(0.21, 0.13);
    let params = json!({"kind": "tilde", "z": [z.re, z.im], "k_max": 6, "tau": [0.0, 0.5]});
    out.push(guard("specfun.laurent_tilde", params.clone(), 1e-8, || {
        let fit = laurent_coeffs_p1(LaurentKind::Tilde(z), &tau, 6, &tr)?;
        let mut worst = (fit.residue - 1.0).norm();
        for (i, got) in fit.coeffs.iter().enumerate() {
            worst = worst.max((got + eisenstein_tilde(i + 1, z, &tau, &tr)?).norm());
        }
        Ok(Check::new("specfun.laurent_tilde", params, json!(null), worst, 1e-8))
    }));
    out
}

fn modular_anomaly() -> Vec<Check> {
    let t = c(0.0, 1.0);
    let tr = Truncation::new(60, 64, 1e-12).expect("truncation");
    let (tau, s_tau) = (ModularPoint::new(t).expect("τ"), ModularPoint::new(-t.inv()).expect("−1/τ"));
    let e2 = eisenstein(2, &s_tau, &tr) - t * t * eisenstein(2, &tau, &tr) + t / c(0.0, 2.0 * PI);
    let e4 = eisenstein(4, &s_tau, &tr) - t.powi(4) * eisenstein(4, &tau, &tr);
    let params = json!({"tau": [0.0, 1.0], "n_q": 60});
    vec![
        Check::new("specfun.e2_anomaly", params.clone(), cjson(e2), e2.norm(), 1e-10),
        Check::new("specfun.e4_modularity", params, cjson(e4), e4.norm(), 1e-10),
    ]
}

// Fock modules and direct traces

fn partitions(n: usize) -> usize {
    let mut p = vec![0usize; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for m in part..=n {
            p[m] += p[m - part];
        }
    }
    p[n]
}

fn dimensions() -> Vec<Check> {
    let name = "voa.heisenberg_dimensions";
    let params = json!({"rank": 1, "level_cap": 10});
    vec![guard(name, params.clone(), 0.0, || {
        let m = enumerate_basis(&AlgebraSpec::heisenberg(1)?, &Sector::vacuum(), 10.0)?;
        let bad = m.graded_dimensions().iter().filter(|(l, d)| *d != partitions(*l as usize)).count();
        Ok(Check::new(name, params, json!(m.dim()), bad as f64, 0.0))
    })]
}

fn partition_functions() -> Vec<Check> {
    let tau = ModularPoint::new(c(0.05, 0.5)).expect("τ");
    let q = tau.nome();
    let mut out = Vec::new();
    let name = "voa.heisenberg_partition";
    let (alpha, z) = (0.8, c(0.13, 0.02));
    let params = json!({"alpha": alpha, "z": [z.re, z.im], "tau": [0.05, 0.5], "level_cap": 10});
    out.push(guard(name, params.clone(), 1e-12, || {
        let m = enumerate_basis(&AlgebraSpec::heisenberg(1)?, &Sector::heisenberg(vec![alpha]), 10.0)?;
        let got = graded_trace(&m, &[], TraceKind::Trace, z, &tau)?;
        let mut want = c(0.0, 0.0);
        for n in 0..=10 {
            want += q.powi(n) * partitions(n as usize) as f64;
        }
        want *= e(z * alpha + tau.tau() * (alpha * alpha / 2.0 - 1.0 / 24.0));
        Ok(Check::new(name, params, cjson(got), rel(got, want), 1e-12))
    }));
    let name = "voa.real_fermion_supertrace";
    let params = json!({"tau": [0.05, 0.5], "level_cap": 6});
    out.push(guard(name, params.clone(), 1e-12, || {
        let m = enumerate_basis(&AlgebraSpec::real_fermion(), &Sector::vacuum(), 6.0)?;
        let got = graded_trace(&m, &[], TraceKind::Supertrace, c(0.0, 0.0), &tau)?;
        // Π (1 − q^{n−1/2}) in powers of q^{1/2}
        let mut coeffs = vec![0i64; 13];
        coeffs[0] = 1;
        for part in (1..=11).step_by(2) {
            for k in (part..=12).rev() {
                coeffs[k] -= coeffs[k - part];
            }
        }
        let mut want = c(0.0, 0.0);
        for (i, a) in coeffs.iter().enumerate() {
            want += e(tau.tau() * (i as f64 / 2.0)) * *a as f64;
        }
        want *= e(-tau.tau() / 48.0);
        Ok(Check::new(name, params, cjson(got), rel(got, want), 1e-12))
    }));
    out
}

fn one_point_translation() -> Vec<Check> {
    let name = "voa.one_point_translation";
    let params = json!({"algebra": "heisenberg", "alpha": 0.7, "w": [[0.03, 0.12], [0.37, 0.42]], "level_cap": 12});
    vec![guard(name, params.clone(), 1e-12, || {
        let (spec, sector) = (AlgebraSpec::heisenberg(1)?, Sector::heisenberg(vec![0.7]));
        let req = request(&spec, sector, 12, vec![at(&spec.generator(0), W1)], Z_GENERIC, TraceKind::Trace)?;
        let a = npoint_oracle(&req.oracle())?;
        let b = npoint_oracle(&req.with_insertions(vec![at(&spec.generator(0), W3)]).oracle())?;
        Ok(Check::new(name, params, cjson(a), rel(a, b), 1e-12))
    })]
}

fn nesting_guard() -> Vec<Check> {
    let spec = AlgebraSpec::real_fermion();
    let g = spec.generator(0);
    let bad = [vec![at(&g, W2), at(&g, W1)], vec![at(&g, c(0.1, 0.6))]];
    let rejected = bad.iter().filter(|ins| check_nested(ins, &half_i()).is_err()).count();
    let missed = (bad.len() - rejected) as f64;
    vec![Check::new("voa.nesting_guard", json!({"cases": bad.len()}), json!(rejected), missed, 0.0)]
}

// reduction

const W1: Complex64 = Complex64::new(0.03, 0.12);
const W2: Complex64 = Complex64::new(0.21, 0.31);
const W3: Complex64 = Complex64::new(0.37, 0.42);
const Z_GENERIC: Complex64 = Complex64::new(0.13, 0.07);

fn at(v: &AlgebraElement, w: Complex64) -> Insertion {
    Insertion { v: v.clone(), w }
}

fn request(
    spec: &AlgebraSpec,
    sector: Sector,
    cap: usize,
    insertions: Vec<Insertion>,
    z: Complex64,
    kind: TraceKind,
) -> Result<NPointRequest> {
    let module = Arc::new(enumerate_basis(spec, &sector, cap as f64)?);
    Ok(NPointRequest::new(module, insertions, JacobiParams::new(z, half_i()), kind)
        .with_truncation(Truncation::new(cap, 64, 1e-12)?))
}

fn describe(req: &NPointRequest, case: &str) -> Value {
    json!({
        "case": case,
        "level_cap": req.module.cap(),
        "n_q": req.truncation.n_q,
        "z": [req.params.z().re, req.params.z().im],
        "tau": [req.params.tau().tau().re, req.params.tau().tau().im],
        "trace": req.kind,
    })
}

/// Oracle agreement, then the KZ residual and its perturbed counterpart.
fn oracle_and_kz(req: &NPointRequest, case: &str, variant: CoboundaryVariant) -> Vec<Check> {
    let params = describe(req, case);
    let name = "reduction.oracle_equivalence";
    let mut out = vec![guard(name, params.clone(), 1e-4, || {
        let o = npoint_oracle(&req.oracle())?;
        let (v, _) = reduce_full(req)?;
        Ok(Check::new(name, params.clone(), json!({"reduced": cjson(v), "oracle": cjson(o)}), rel(o, v), 1e-4))
    })];
    let mut kp = params.clone();
    kp["variant"] = serde_json::to_value(variant).expect("variant");
    let name = "reduction.kz";
    out.push(guard(name, kp.clone(), 1e-8, || Ok(Check::new(name, kp.clone(), json!(null), kz_residual(req, variant)?, 1e-8))));
    let mut pp = kp.clone();
    pp["scale"] = json!(1.01);
    let name = "reduction.kz_perturbed";
    out.push(guard(name, pp.clone(), 1e-3, || {
        let r = kz_residual_perturbed(req, variant, 1.01)?;
        Ok(Check::bounded(name, pp.clone(), json!(null), r, 1e-3, Bound::Lower))
    }));
    out
}

fn oracle_heisenberg() -> Vec<Check> {
    let run = || -> Result<Vec<Check>> {
        let (spec, sector) = (AlgebraSpec::heisenberg(1)?, Sector::heisenberg(vec![0.7]));
        let j = spec.generator(0);
        let one = request(&spec, sector, 12, vec![at(&j, W1)], Z_GENERIC, TraceKind::Trace)?;
        let two = one.with_insertions(vec![at(&j, W1), at(&j, W2)]);
        let mut out = oracle_and_kz(&one, "heisenberg <J>", CoboundaryVariant::Main);
        out.extend(oracle_and_kz(&two, "heisenberg <JJ>", CoboundaryVariant::Simplest));
        Ok(out)
    };
    run().unwrap_or_else(|err| vec![Check::failed("reduction.oracle_equivalence", json!({"case": "heisenberg"}), 1e-4, &err)])
}

fn oracle_complex_fermion() -> Vec<Check> {
    let run = || -> Result<Vec<Check>> {
        let spec = AlgebraSpec::complex_fermion();
        let (b, cc) = (spec.generator(0), spec.generator(1));
        let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], Z_GENERIC, TraceKind::Supertrace)?;
        let mut out = oracle_and_kz(&req, "complex fermion <bc>", CoboundaryVariant::Main);
        let name = "reduction.ledger_names_p_tilde";
        let params = describe(&req, "complex fermion <bc>");
        out.push(guard(name, params.clone(), 0.0, || {
            let (_, ledger) = reduce_full(&req)?;
            let found = ledger
                .specials()
                .iter()
                .any(|s| s.name == "P_tilde" && matches!(s.function, SpecialFunction::Weierstrass { k: 1, .. }));
            Ok(Check::new(name, params.clone(), json!(found), if found { 0.0 } else { 1.0 }, 0.0))
        }));
        Ok(out)
    };
    run().unwrap_or_else(|err| vec![Check::failed("reduction.oracle_equivalence", json!({"case": "complex fermion"}), 1e-4, &err)])
}

fn oracle_real_fermion() -> Vec<Check> {
    let run = || -> Result<Vec<Check>> {
        let spec = AlgebraSpec::real_fermion();
        let g = spec.generator(0);
        let req = request(&spec, Sector::vacuum(), 12, vec![at(&g, W1), at(&g, W2)], c(0.0, 0.0), TraceKind::Supertrace)?;
        let mut out = oracle_and_kz(&req, "real fermion <bb>", CoboundaryVariant::Super);
        let name = "reduction.deformed_zero_mode_absent";
        let params = describe(&req, "real fermion <bb>");
        out.push(guard(name, params.clone(), 0.0, || {
            let (_, ledger) = reduce_full(&req)?;
            let stray = ledger.nodes.iter().filter(|n| n.key.k == 0).count()
                + ledger.specials().iter().filter(|s| s.name != "P_deformed").count();
            Ok(Check::new(name, params.clone(), json!(ledger.nodes.len()), stray as f64, 0.0))
        }));
        Ok(out)
    };
    run().unwrap_or_else(|err| vec![Check::failed("reduction.oracle_equivalence", json!({"case": "real fermion"}), 1e-4, &err)])
}

fn monomial(spec: &AlgebraSpec, modes: &[(u8, u32)]) -> AlgebraElement {
    let cr = modes.iter().map(|&(species, k)| Creator { species, k }).collect();
    let (s, sign) = BasisState::from_creators(cr, spec.is_fermionic()).expect("distinct fermion modes");
    AlgebraElement::basis(s).scaled(c(sign, 0.0))
}

fn identity_check(name: &str, params: Value, tol: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    guard(name, params.clone(), tol, || Ok(Check::new(name, params.clone(), json!(null), f()?, tol)))
}

fn identities_v0() -> Vec<Check> {
    let name = "reduction.identity_v0";
    let mut out = vec![identity_check(name, json!({"case": "rank-2 heisenberg (a2, a1 a2[-2], a1)", "level_cap": 6}), 1e-10, || {
        let (spec, sector) = (AlgebraSpec::heisenberg(2)?, Sector::heisenberg(vec![0.3, 0.4]));
        let (a1, a2) = (spec.generator(0), spec.generator(1));
        let mixed = monomial(&spec, &[(0, 1), (1, 2)]);
        identity_v0_sum(&request(&spec, sector, 6, vec![at(&a2, W1), at(&mixed, W2), at(&a1, W3)], Z_GENERIC, TraceKind::Trace)?)
    })];
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        out.push(identity_check(name, json!({"case": "complex fermion (b, c, J)", "trace": kind, "level_cap": 12}), 1e-10, || {
            let cf = AlgebraSpec::complex_fermion();
            let j = cf.current_state().expect("J");
            let ins = vec![at(&cf.generator(0), W1), at(&cf.generator(1), W2), at(&j, W3)];
            identity_v0_sum(&request(&cf, Sector::vacuum(), 12, ins, Z_GENERIC, kind)?)
        }));
    }
    out
}

fn identities_rec1() -> Vec<Check> {
    let name = "reduction.identity_rec1";
    let mut out = Vec::new();
    for beta in [1, 2] {
        out.push(identity_check(name, json!({"case": "rank-2 heisenberg v = a1 on (a1, a1 a2[-2])", "beta": beta, "level_cap": 6}), 1e-6, || {
            let (spec, sector) = (AlgebraSpec::heisenberg(2)?, Sector::heisenberg(vec![0.3, 0.4]));
            let a1 = spec.generator(0);
            let mixed = monomial(&spec, &[(0, 1), (1, 2)]);
            let req = request(&spec, sector, 6, vec![at(&a1, W1), at(&mixed, W2)], Z_GENERIC, TraceKind::Trace)?;
            identity_rec1(&req, &a1, beta)
        }));
    }
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        for beta in [1, 2] {
            out.push(identity_check(name, json!({"case": "complex fermion v = b on (J, c)", "beta": beta, "trace": kind, "level_cap": 12}), 1e-6, || {
                let cf = AlgebraSpec::complex_fermion();
                let j = cf.current_state().expect("J");
                let req = request(&cf, Sector::vacuum(), 12, vec![at(&j, W1), at(&cf.generator(1), W2)], Z_GENERIC, kind)?;
                identity_rec1(&req, &cf.generator(0), beta)
            }));
        }
    }
    out
}

fn identities_zero_res() -> Vec<Check> {
    let name = "reduction.identity_zero_res";
    let t = half_i().tau();
    let mut out = Vec::new();
    for (label, z) in [("tau", t), ("tau+1", t + 1.0)] {
        for order in ["(J, c)", "(c, J)"] {
            out.push(identity_check(name, json!({"case": format!("complex fermion v = b on {order}"), "alpha_z": label, "level_cap": 12}), 1e-8, || {
                let cf = AlgebraSpec::complex_fermion();
                let (j, cc) = (cf.current_state().expect("J"), cf.generator(1));
                let ins = if order == "(J, c)" { vec![at(&j, W1), at(&cc, W2)] } else { vec![at(&cc, W1), at(&j, W2)] };
                identity_zero_res(&request(&cf, Sector::vacuum(), 12, ins, z, TraceKind::Supertrace)?, &cf.generator(0))
            }));
        }
    }
    out
}

fn chain_condition() -> Vec<Check> {
    let name = "reduction.chain_condition";
    let mut out = Vec::new();
    for n in 0..=2usize {
        for (x1, x2) in [(0u8, 1u8), (1, 0)] {
            let params = json!({"n": n, "states": vec!["a2"; n], "x1": format!("a{}", x1 + 1), "x2": format!("a{}", x2 + 1), "grid": 8, "level_cap": 6});
            out.push(identity_check(name, params, 1e-8, || {
                let (spec, sector) = (AlgebraSpec::heisenberg(2)?, Sector::heisenberg(vec![0.0, 0.4]));
                let tmpl = request(&spec, sector, 6, vec![], Z_GENERIC, TraceKind::Trace)?;
                let states = vec![spec.generator(1); n];
                let grid = sample_grid(n + 2, 8, &half_i())?;
                let target: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: n, template: tmpl });
                chain_condition_residual(
                    n,
                    &states,
                    &spec.generator(x1),
                    &spec.generator(x2),
                    CoboundaryVariant::Simplest,
                    target,
                    &grid,
                )
            }));
        }
    }
    // The same flavor twice violates the chain hypothesis; the residual must
    // then be visibly nonzero.
    let name = "reduction.chain_condition_same_flavor";
    let params = json!({"n": 0, "x1": "a2", "x2": "a2", "grid": 8, "level_cap": 6});
    out.push(guard(name, params.clone(), 1e-3, || {
        let (spec, sector) = (AlgebraSpec::heisenberg(2)?, Sector::heisenberg(vec![0.0, 0.4]));
        let tmpl = request(&spec, sector, 6, vec![], Z_GENERIC, TraceKind::Trace)?;
        let a2 = spec.generator(1);
        let grid = sample_grid(2, 8, &half_i())?;
        let target: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: 0, template: tmpl });
        let r = chain_condition_residual(0, &[], &a2, &a2, CoboundaryVariant::Simplest, target, &grid)?;
        Ok(Check::bounded(name, params.clone(), json!(null), r, 1e-3, Bound::Lower))
    }));
    out
}
