mod common;

use common::*;
use jacobi_reduction::reduction::*;
use jacobi_reduction::voa::{npoint_oracle, npoint_oracle_with_ops, AlgebraSpec, Sector, TraceKind, TraceOp};
use jacobi_reduction::{Complex64, Error};
use std::sync::Arc;

fn oracle_vs_reduce(req: &NPointRequest) -> f64 {
    let o = npoint_oracle(&req.oracle()).unwrap();
    let (v, ledger) = reduce_full(req).unwrap();
    assert_eq!(v, ledger.value);
    rel(o, v)
}

#[test]
fn heisenberg_one_and_two_point_match_oracle() {
    let (spec, sector) = heisenberg(0.7);
    let j = spec.generator(0);
    let one = request(&spec, sector.clone(), 12, vec![at(&j, W1)], Z_GENERIC, TraceKind::Trace);
    assert!(oracle_vs_reduce(&one) < 1e-10);
    let two = request(&spec, sector.clone(), 12, vec![at(&j, W1), at(&j, W2)], Z_GENERIC, TraceKind::Trace);
    assert!(oracle_vs_reduce(&two) < 1e-8);
    let desc = monomial(&spec, &[(0, 2)]);
    let three = request(&spec, sector, 12, vec![at(&j, W1), at(&desc, W2)], Z_GENERIC, TraceKind::Trace);
    assert!(oracle_vs_reduce(&three) < 1e-7);
}

#[test]
fn complex_fermion_matches_oracle_on_both_branches() {
    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let t = tau().tau();
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        for z in [Z_GENERIC, t, t + 1.0, c(0.0, 0.0)] {
            let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], z, kind);
            assert!(oracle_vs_reduce(&req) < 1e-8, "z = {z}, {kind:?}");
            let req = request(&spec, Sector::vacuum(), 12, vec![at(&cc, W1), at(&b, W2)], z, kind);
            assert!(oracle_vs_reduce(&req) < 1e-8, "z = {z}, {kind:?}");
        }
    }
}

#[test]
fn real_fermion_two_point_matches_oracle() {
    let spec = AlgebraSpec::real_fermion();
    let b = spec.generator(0);
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&b, W2)], c(0.0, 0.0), kind);
        assert!(oracle_vs_reduce(&req) < 1e-8, "{kind:?}");
        let (_, ledger) = reduce_full(&req).unwrap();
        // Weight 1/2 has φ ≠ 1: no zero-mode term.
        assert!(ledger.nodes.iter().all(|n| n.key.k != 0));
        assert!(ledger.specials().iter().all(|s| s.name == "P_deformed"));
    }
}

#[test]
fn ledger_reevaluation_is_faithful() {
    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], Z_GENERIC, TraceKind::Supertrace);
    let (v, ledger) = reduce_full(&req).unwrap();
    let again = ledger.reevaluate(&req.params.tau(), &req.truncation).unwrap();
    assert!(rel(v, again) <= 1e-12);
    assert!(rel(v, ledger.evaluate()) <= 1e-12);
    let json = serde_json::to_string(&ledger).unwrap();
    let back: CoefficientLedger = serde_json::from_str(&json).unwrap();
    assert_eq!(back, ledger);
}

#[test]
fn complex_fermion_ledger_names_tilde_coefficient() {
    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], Z_GENERIC, TraceKind::Supertrace);
    let (_, ledger) = reduce_full(&req).unwrap();
    let found = ledger.specials().iter().any(|s| {
        s.name == "P_tilde" && matches!(s.function, SpecialFunction::Weierstrass { k: 1, .. })
    });
    assert!(found);
}

#[test]
fn zero_point_request_is_the_partition_function() {
    let (spec, sector) = heisenberg(0.7);
    let req = request(&spec, sector, 12, vec![], Z_GENERIC, TraceKind::Trace);
    let (v, ledger) = reduce_full(&req).unwrap();
    assert!(ledger.nodes.is_empty());
    assert_eq!(ledger.leaf_count(), 1);
    assert_eq!(v, npoint_oracle(&req.oracle()).unwrap());
    assert!(reduce_step(&req).unwrap().is_empty());
}

#[test]
fn negative_mode_binomial_coefficients() {
    // Z(J[−2]J, J): only J[1]J = 𝟙 survives, so m = 1, l = 2. The same-point
    // term carries (−1)^{m+1} C(m+l−1, m) c_{m+l} = 2 c_3, the cross term
    // (−1)^{l−1} C(m+l−1, m) F_{m+l}(w_1 − w_2) = −2 F_3.
    let (spec, sector) = heisenberg(0.7);
    let j = spec.generator(0);
    let req = request(&spec, sector, 12, vec![at(&j, W1), at(&j, W2)], Z_GENERIC, TraceKind::Trace);
    let terms = reduce_negative_mode(&req, 0, 2).unwrap();
    let same = terms.iter().find(|t| t.key == NodeKey { k: 1, m: 1, l: 2 }).expect("same-point term");
    assert_eq!(same.factor, c(2.0, 0.0));
    assert!(matches!(same.special.as_ref().unwrap().function, SpecialFunction::Laurent { k: 3, .. }));
    let cross = terms.iter().find(|t| t.key == NodeKey { k: 2, m: 1, l: 2 }).expect("cross term");
    assert_eq!(cross.factor, c(-2.0, 0.0));
    assert!(matches!(
        cross.special.as_ref().unwrap().function,
        SpecialFunction::Weierstrass { k: 3, w, .. } if w == W1 - W2
    ));
    assert!(terms.iter().all(|t| t.key.m == 1 || t.key.k == 0));
}

#[test]
fn charged_one_point_function_is_degenerate() {
    let spec = AlgebraSpec::complex_fermion();
    let b = spec.generator(0);
    let req = request(&spec, Sector::vacuum(), 8, vec![at(&b, W1)], Z_GENERIC, TraceKind::Supertrace);
    assert!(matches!(reduce_full(&req), Err(Error::DegenerateInsertion { stage: 1, .. })));
}

#[test]
fn one_point_functions_do_not_depend_on_position() {
    let (spec, sector) = heisenberg(0.7);
    let j = spec.generator(0);
    let a = request(&spec, sector.clone(), 12, vec![at(&j, W1)], Z_GENERIC, TraceKind::Trace);
    let b = a.with_insertions(vec![at(&j, W3)]);
    let (ra, _) = reduce_full(&a).unwrap();
    let (rb, _) = reduce_full(&b).unwrap();
    assert!(rel(ra, rb) <= 1e-12);
    let oa = npoint_oracle(&a.oracle()).unwrap();
    let ob = npoint_oracle(&b.oracle()).unwrap();
    assert!(rel(oa, ob) <= 1e-12);
}

#[test]
fn reduction_is_deterministic_across_thread_counts() {
    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let req = request(&spec, Sector::vacuum(), 10, vec![at(&b, W1), at(&cc, W2)], tau().tau(), TraceKind::Trace);
    let (v, ledger) = reduce_full(&req).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (v1, ledger1) = pool.install(|| reduce_full(&req)).unwrap();
    assert_eq!(v.re.to_bits(), v1.re.to_bits());
    assert_eq!(v.im.to_bits(), v1.im.to_bits());
    assert_eq!(serde_json::to_string(&ledger).unwrap(), serde_json::to_string(&ledger1).unwrap());
}

#[test]
fn kz_residuals_of_reduced_functions() {
    let (spec, sector) = heisenberg(0.7);
    let j = spec.generator(0);
    let one = request(&spec, sector.clone(), 12, vec![at(&j, W1)], Z_GENERIC, TraceKind::Trace);
    let two = one.with_insertions(vec![at(&j, W1), at(&j, W2)]);
    for req in [&one, &two] {
        assert!(kz_residual(req, CoboundaryVariant::Simplest).unwrap() <= 1e-8);
        assert!(kz_residual_perturbed(req, CoboundaryVariant::Simplest, 1.01).unwrap() > 1e-3);
    }
    assert!(kz_residual(&one, CoboundaryVariant::Main).unwrap() <= 1e-8);
    assert!(matches!(kz_residual(&two, CoboundaryVariant::Main), Err(Error::AdmissibilityViolation(_))));

    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let t = tau().tau();
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        for z in [Z_GENERIC, t] {
            let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], z, kind);
            for v in [CoboundaryVariant::Main, CoboundaryVariant::Simplest] {
                assert!(kz_residual(&req, v).unwrap() <= 1e-8);
                assert!(kz_residual_perturbed(&req, v, 1.01).unwrap() > 1e-3);
            }
        }
    }
}

#[test]
fn kz_residual_of_the_zero_function_vanishes() {
    let spec = AlgebraSpec::complex_fermion();
    let b = spec.generator(0);
    let req = request(&spec, Sector::vacuum(), 8, vec![at(&b, W1)], Z_GENERIC, TraceKind::Supertrace);
    assert_eq!(kz_residual(&req, CoboundaryVariant::Simplest).unwrap(), 0.0);
}

#[test]
fn shifted_variant_solves_the_shifted_kz_equation() {
    // c has charge −1: αz = λτ + μ fixes z. Under the plain trace the odd
    // vertex shifts αz by 1/2.
    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let t = tau().tau();
    let cases = [
        (TraceKind::Supertrace, 1, 0, -t),
        (TraceKind::Supertrace, -1, 0, t),
        (TraceKind::Supertrace, 1, 1, -t - 1.0),
        (TraceKind::Trace, 1, 0, -t + 0.5),
    ];
    for (kind, lambda, mu, z) in cases {
        let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], z, kind);
        let v = CoboundaryVariant::Shifted { lambda, mu };
        let r = kz_residual(&req, v).unwrap();
        assert!(r <= 1e-8, "λ = {lambda}, μ = {mu}, {kind:?}: {r:e}");
    }
    let req = request(&spec, Sector::vacuum(), 8, vec![at(&b, W1), at(&cc, W2)], Z_GENERIC, TraceKind::Supertrace);
    let v = CoboundaryVariant::Shifted { lambda: 1, mu: 0 };
    assert!(matches!(kz_residual(&req, v), Err(Error::AdmissibilityViolation(_))));
    let (h, sector) = heisenberg(0.7);
    let j = h.generator(0);
    let req = request(&h, sector, 8, vec![at(&j, W1)], c(0.0, 0.0), TraceKind::Trace);
    let v = CoboundaryVariant::Shifted { lambda: 0, mu: 0 };
    assert!(matches!(kz_residual(&req, v), Err(Error::AdmissibilityViolation(_))));
}

#[test]
fn super_variant_matches_reduce_step() {
    let spec = AlgebraSpec::real_fermion();
    let b = spec.generator(0);
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&b, W2)], c(0.0, 0.0), kind);
        let target = Arc::new(OracleFunction { arity: 1, template: req.clone() });
        let d = coboundary_apply(1, &b, CoboundaryVariant::Super, target).unwrap();
        let via_delta = d.eval(&req.insertions, &[]).unwrap();
        let mut via_step = Complex64::new(0.0, 0.0);
        for t in reduce_step(&req).unwrap() {
            let inner = match &t.target {
                ReductionTarget::Request { insertions } => {
                    npoint_oracle(&req.with_insertions(insertions.clone()).oracle()).unwrap()
                }
                ReductionTarget::ZeroMode { op, insertions } => {
                    let o = req.with_insertions(insertions.clone());
                    npoint_oracle_with_ops(&o.oracle(), &[TraceOp::Mode(*op)]).unwrap()
                }
            };
            via_step += t.coefficient() * inner;
        }
        assert!(rel(via_delta, via_step) <= 1e-10, "{kind:?}");
        assert!(kz_residual(&req, CoboundaryVariant::Super).unwrap() <= 1e-8);
    }
}

#[test]
fn super_variant_requires_unimodular_theta() {
    let spec = AlgebraSpec::complex_fermion();
    let (b, cc) = (spec.generator(0), spec.generator(1));
    let req = request(&spec, Sector::vacuum(), 8, vec![at(&b, W1), at(&cc, W2)], Z_GENERIC, TraceKind::Supertrace);
    assert!(matches!(kz_residual(&req, CoboundaryVariant::Super), Err(Error::AdmissibilityViolation(_))));
    let req = request(&spec, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2)], c(0.0, 0.0), TraceKind::Supertrace);
    assert!(kz_residual(&req, CoboundaryVariant::Super).unwrap() <= 1e-8);
}

#[test]
fn cross_flavor_coboundary_keeps_only_the_zero_mode_term() {
    let (spec, sector) = rank2([0.3, 0.4]);
    let (a1, a2) = (spec.generator(0), spec.generator(1));
    let tmpl = request(&spec, sector, 6, vec![], Z_GENERIC, TraceKind::Trace);
    let target = Arc::new(ReducedFunction { arity: 1, template: tmpl.clone() });
    let d = coboundary_apply(1, &a1, CoboundaryVariant::Main, target.clone()).unwrap();
    let x = vec![at(&a2, W1), at(&a1, W2)];
    let lhs = d.eval(&x, &[]).unwrap();
    let rhs = 0.3 * target.eval(&x[..1], &[]).unwrap();
    assert!(rel(lhs, rhs) <= 1e-14);
}

#[test]
fn chain_condition_on_cross_flavor_configurations() {
    let (spec, sector) = rank2([0.0, 0.4]);
    let (a1, a2) = (spec.generator(0), spec.generator(1));
    let tmpl = request(&spec, sector, 6, vec![], Z_GENERIC, TraceKind::Trace);
    for n in 0..=2usize {
        let states = vec![a2.clone(); n];
        let grid = sample_grid(n + 2, 8, &tau()).unwrap();
        let target: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: n, template: tmpl.clone() });
        for (x1, x2) in [(&a1, &a2), (&a2, &a1)] {
            let r = chain_condition_residual(n, &states, x1, x2, CoboundaryVariant::Simplest, target.clone(), &grid)
                .unwrap();
            assert!(r <= 1e-8, "n = {n}: {r:e}");
        }
    }
    // Same flavor twice is not a chain configuration.
    let grid = sample_grid(2, 8, &tau()).unwrap();
    let target: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: 0, template: tmpl.clone() });
    let r = chain_condition_residual(0, &[], &a2, &a2, CoboundaryVariant::Simplest, target, &grid).unwrap();
    assert!(r > 1e-3);
}

#[test]
fn chain_condition_edge_cases() {
    let (spec, sector) = rank2([0.0, 0.4]);
    let (a1, a2) = (spec.generator(0), spec.generator(1));
    let tmpl = request(&spec, sector, 6, vec![], Z_GENERIC, TraceKind::Trace);
    let grid = sample_grid(3, 8, &tau()).unwrap();
    let zero: Arc<dyn NPointEvaluable> = Arc::new(ZeroFunction { arity: 1, template: tmpl.clone() });
    let r = chain_condition_residual(1, &[a2.clone()], &a1, &a2, CoboundaryVariant::Simplest, zero, &grid).unwrap();
    assert_eq!(r, 0.0);
    let target: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: 1, template: tmpl });
    let r = chain_condition_residual(1, &[a2.clone()], &a2, &a1, CoboundaryVariant::Main, target.clone(), &grid);
    assert!(matches!(r, Err(Error::AdmissibilityViolation(_))));
    let r = chain_condition_residual(1, &[a2.clone()], &a1, &a2, CoboundaryVariant::Simplest, target, &[]);
    assert!(matches!(r, Err(Error::GridDegenerate(_))));
}

#[test]
fn sample_grid_is_nested_and_reproducible() {
    let g = sample_grid(4, 8, &tau()).unwrap();
    assert_eq!(g, sample_grid(4, 8, &tau()).unwrap());
    for pts in &g {
        for w in pts.windows(2) {
            assert!(w[0].im > 0.0 && w[0].im < w[1].im && w[1].im < 0.5);
        }
    }
    assert!(matches!(sample_grid(4, 0, &tau()), Err(Error::GridDegenerate(_))));
}

#[test]
fn identity_v0_sum_vanishes() {
    let (spec, sector) = rank2([0.3, 0.4]);
    let (a1, a2) = (spec.generator(0), spec.generator(1));
    let mixed = monomial(&spec, &[(0, 1), (1, 2)]);
    let req = request(&spec, sector, 6, vec![at(&a2, W1), at(&mixed, W2), at(&a1, W3)], Z_GENERIC, TraceKind::Trace);
    assert!(identity_v0_sum(&req).unwrap() <= 1e-10);

    let cf = AlgebraSpec::complex_fermion();
    let (b, cc) = (cf.generator(0), cf.generator(1));
    let j = cf.current_state().unwrap();
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        let req = request(&cf, Sector::vacuum(), 12, vec![at(&b, W1), at(&cc, W2), at(&j, W3)], Z_GENERIC, kind);
        assert!(identity_v0_sum(&req).unwrap() <= 1e-10);
    }
    let rf = AlgebraSpec::real_fermion();
    let g = rf.generator(0);
    let req = request(&rf, Sector::vacuum(), 6, vec![at(&g, W1), at(&g, W2)], c(0.0, 0.0), TraceKind::Supertrace);
    assert!(matches!(identity_v0_sum(&req), Err(Error::NonIntegerWeight(_))));
}

#[test]
fn identity_rec1_holds() {
    let (spec, sector) = rank2([0.3, 0.4]);
    let a1 = spec.generator(0);
    let mixed = monomial(&spec, &[(0, 1), (1, 2)]);
    let req = request(&spec, sector, 6, vec![at(&a1, W1), at(&mixed, W2)], Z_GENERIC, TraceKind::Trace);
    for beta in [1, 2] {
        assert!(identity_rec1(&req, &a1, beta).unwrap() <= 1e-6, "β = {beta}");
    }
    let cf = AlgebraSpec::complex_fermion();
    let (b, cc) = (cf.generator(0), cf.generator(1));
    let j = cf.current_state().unwrap();
    for kind in [TraceKind::Supertrace, TraceKind::Trace] {
        let req = request(&cf, Sector::vacuum(), 12, vec![at(&j, W1), at(&cc, W2)], Z_GENERIC, kind);
        for beta in [1, 2] {
            assert!(identity_rec1(&req, &b, beta).unwrap() <= 1e-6, "β = {beta}, {kind:?}");
        }
    }
}

#[test]
fn identity_zero_res_on_the_lattice() {
    let cf = AlgebraSpec::complex_fermion();
    let (b, cc) = (cf.generator(0), cf.generator(1));
    let j = cf.current_state().unwrap();
    let t = tau().tau();
    for z in [t, t + 1.0] {
        for ins in [vec![at(&j, W1), at(&cc, W2)], vec![at(&cc, W1), at(&j, W2)]] {
            let req = request(&cf, Sector::vacuum(), 12, ins, z, TraceKind::Supertrace);
            assert!(identity_zero_res(&req, &b).unwrap() <= 1e-8, "z = {z}");
        }
    }
    let req = request(&cf, Sector::vacuum(), 8, vec![at(&j, W1), at(&cc, W2)], Z_GENERIC, TraceKind::Supertrace);
    assert!(matches!(identity_zero_res(&req, &b), Err(Error::NotOnLattice(_))));
}

#[test]
fn cohomology_probe_ranks() {
    let cf = AlgebraSpec::complex_fermion();
    let j = cf.current_state().unwrap();
    let tmpl = request(&cf, Sector::vacuum(), 8, vec![], Z_GENERIC, TraceKind::Supertrace);
    let grid = sample_grid(1, 8, &tau()).unwrap();
    let z: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: 0, template: tmpl.clone() });
    let est = cohomology_probe(0, &j, CoboundaryVariant::Simplest, &[z.clone()], &[], &grid).unwrap();
    assert_eq!((est.kernel_dim, est.image_dim), (0, 1));
    let dup = cohomology_probe(0, &j, CoboundaryVariant::Simplest, &[z.clone(), z.clone()], &[], &grid).unwrap();
    assert_eq!(dup.image_dim, 1);
    let zero: Arc<dyn NPointEvaluable> = Arc::new(ZeroFunction { arity: 0, template: tmpl });
    let est = cohomology_probe(0, &j, CoboundaryVariant::Simplest, &[zero.clone(), zero], &[], &grid).unwrap();
    assert_eq!((est.kernel_dim, est.image_dim), (2, 0));
    assert!(matches!(
        cohomology_probe(0, &j, CoboundaryVariant::Simplest, &[z], &[], &[]),
        Err(Error::GridDegenerate(_))
    ));
}

mod invariants {
    use super::*;
    use proptest::prelude::*;

    fn nested(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-0.5f64..0.5, 0.0f64..1.0), n).prop_map(move |raw| {
            // Imaginary parts spread over disjoint bands of (0.05, 0.45).
            let band = 0.4 / raw.len().max(1) as f64;
            raw.iter()
                .enumerate()
                .map(|(i, &(re, t))| c(re, 0.05 + band * (i as f64 + 0.1 + 0.8 * t)))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn one_point_functions_ignore_the_position(w in nested(2)) {
            let (spec, sector) = heisenberg(0.7);
            let j = spec.generator(0);
            let a = request(&spec, sector, 8, vec![at(&j, w[0])], Z_GENERIC, TraceKind::Trace);
            let b = a.with_insertions(vec![at(&j, w[1])]);
            let (ra, _) = reduce_full(&a).unwrap();
            let (rb, _) = reduce_full(&b).unwrap();
            prop_assert!(rel(ra, rb) <= 1e-12);
        }

        #[test]
        fn ledger_reevaluates_to_the_reduced_value(w in nested(2), sup in any::<bool>()) {
            let spec = AlgebraSpec::complex_fermion();
            let (b, cc) = (spec.generator(0), spec.generator(1));
            let kind = if sup { TraceKind::Supertrace } else { TraceKind::Trace };
            let req = request(&spec, Sector::vacuum(), 8, vec![at(&b, w[0]), at(&cc, w[1])], Z_GENERIC, kind);
            let (v, ledger) = reduce_full(&req).unwrap();
            let again = ledger.reevaluate(&req.params.tau(), &req.truncation).unwrap();
            prop_assert!(rel(v, again) <= 1e-12);
        }

        #[test]
        fn chain_condition_at_random_positions(grid in prop::collection::vec(nested(3), 2)) {
            let (spec, sector) = rank2([0.0, 0.4]);
            let (a1, a2) = (spec.generator(0), spec.generator(1));
            let tmpl = request(&spec, sector, 6, vec![], Z_GENERIC, TraceKind::Trace);
            let target: Arc<dyn NPointEvaluable> = Arc::new(ReducedFunction { arity: 1, template: tmpl });
            let r = chain_condition_residual(1, &[a2.clone()], &a1, &a2, CoboundaryVariant::Simplest, target, &grid)
                .unwrap();
            prop_assert!(r <= 1e-8);
        }
    }
}
