mod common;

use common::*;
use jacobi_reduction::cli::{RequestFile, Report};
use jacobi_reduction::reduction::{JacobiParams, NPointRequest};
use jacobi_reduction::specfun::{ModularPoint, Truncation, TwistPair};
use jacobi_reduction::voa::{enumerate_basis, AlgebraSpec, Insertion, Sector, TraceKind};
use jacobi_reduction::Complex64;
use proptest::prelude::*;
use serde_json::Value;
use std::process::Command;
use std::sync::Arc;

fn jrl(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jrl"));
    cmd.args(args).env_remove("JRL_DEFAULT_NQ").env_remove("JRL_DEFAULT_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("jrl runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("stdout is JSON")
}

fn value(doc: &Value) -> Complex64 {
    c(doc["value"][0].as_f64().unwrap(), doc["value"][1].as_f64().unwrap())
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn eval_examples() {
    let (code, out, _) = jrl(&["eval", "--fn", "E", "--k", "3", "--tau", "0.5i"], &[]);
    assert_eq!(code, 0);
    let doc = json(&out);
    assert_eq!(doc["schema"], 1);
    assert_eq!(value(&doc), c(0.0, 0.0));
    assert!(doc["truncation_error"].as_f64().unwrap() < 1e-50);

    let (code, out, _) = jrl(&["eval", "--fn", "Etwist", "--k", "1", "--lambda", "2"], &[]);
    assert_eq!(code, 0);
    assert_eq!(value(&json(&out)), c(-2.0, 0.0));

    let a = jrl(&["eval", "--fn", "P", "--m", "1", "--w", "1.30+0.05i", "--tau", "0.4i"], &[]);
    let b = jrl(&["eval", "--fn", "P", "--m", "1", "--w", "0.30+0.05i", "--tau", "0.4i"], &[]);
    assert_eq!((a.0, b.0), (0, 0));
    assert!((value(&json(&a.1)) - value(&json(&b.1))).norm() < 1e-12);
}

#[test]
fn eval_covers_every_family() {
    let cases: [&[&str]; 5] = [
        &["--fn", "Etilde", "--k", "2", "--z", "0.21+0.13i"],
        &["--fn", "Ptwist", "--m", "2", "--lambda", "-1", "--w", "0.31+0.07i"],
        &["--fn", "Ptilde", "--m", "1", "--w", "0.31+0.07i", "--z", "0.21+0.13i"],
        &["--fn", "Pdeformed", "--k", "1", "--theta", "0.6+0.8i", "--phi", "-1", "--w", "0.31+0.07i"],
        &["--fn", "P", "--k", "3", "--w", "0.31+0.07i", "--tau", "0.1+0.5i"],
    ];
    for args in cases {
        let mut full = vec!["eval"];
        full.extend_from_slice(args);
        let (code, out, err) = jrl(&full, &[]);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert!(value(&json(&out)).is_finite());
    }
}

#[test]
fn eval_errors_and_exit_codes() {
    // outside the annulus
    let (code, out, err) = jrl(&["eval", "--fn", "P", "--m", "1", "--w", "0.3+0.9i", "--tau", "0.4i"], &[]);
    assert_eq!(code, 1);
    assert!(out.is_empty() && err.contains("annulus"));
    // pole of the tilde family at z = τ
    let (code, _, err) = jrl(&["eval", "--fn", "Ptilde", "--m", "1", "--w", "0.3+0.1i", "--z", "0.5i"], &[]);
    assert_eq!(code, 1, "{err}");
    // configuration errors
    assert_eq!(jrl(&["eval", "--fn", "Bogus", "--k", "1"], &[]).0, 2);
    assert_eq!(jrl(&["eval", "--fn", "P", "--m", "1"], &[]).0, 2);
    assert_eq!(jrl(&["eval", "--fn", "E", "--k", "2", "--tau", "-0.5i"], &[]).0, 2);
    assert_eq!(jrl(&["eval", "--fn", "E", "--k", "2", "--m", "4"], &[]).0, 2);
    assert_eq!(jrl(&["frobnicate"], &[]).0, 2);
}

#[test]
fn environment_defaults_yield_to_flags() {
    let n_q = |out: &str| json(out)["truncation"]["n_q"].as_u64().unwrap();
    let (_, out, _) = jrl(&["eval", "--fn", "E", "--k", "2"], &[]);
    assert_eq!(n_q(&out), 60);
    let (_, out, _) = jrl(&["eval", "--fn", "E", "--k", "2"], &[("JRL_DEFAULT_NQ", "17")]);
    assert_eq!(n_q(&out), 17);
    let (_, out, _) = jrl(&["eval", "--fn", "E", "--k", "2", "--n-q", "9"], &[("JRL_DEFAULT_NQ", "17")]);
    assert_eq!(n_q(&out), 9);

    let (code, out, _) = jrl(&["verify", "--suite", "voa"], &[("JRL_DEFAULT_TOL", "1e-30")]);
    assert_eq!(code, 0, "the voa checks are exact");
    assert!(out.contains("1e-30"));
    let (code, out, _) = jrl(&["verify", "--suite", "specfun"], &[("JRL_DEFAULT_TOL", "1e-30")]);
    assert_eq!(code, 1);
    assert!(!json(&out)["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let (code, _, _) = jrl(&["verify", "--suite", "specfun", "--tol", "1e-5"], &[("JRL_DEFAULT_TOL", "1e-30")]);
    assert_eq!(code, 0);
}

#[test]
fn reduce_zero_point_request() {
    let (code, out, err) = jrl(&["reduce", &data("partition.json"), "--ledger", "--oracle"], &[]);
    assert_eq!(code, 0, "{err}");
    let doc = json(&out);
    assert!(doc["ledger"]["nodes"].as_array().unwrap().is_empty());
    let o = &doc["checks"][0]["value"]["oracle"];
    assert_eq!(doc["value"], *o);
}

#[test]
fn reduce_matches_oracle_and_reports_kz() {
    let (code, out, err) = jrl(&["reduce", &data("heisenberg_jj.json"), "--oracle", "--variant", "simplest"], &[]);
    assert_eq!(code, 0, "{err}");
    let doc = json(&out);
    let checks = doc["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["oracle_equivalence", "kz", "kz_perturbed"]);
    assert!(checks[0]["residual"].as_f64().unwrap() <= 1e-4);
    assert!(doc.get("ledger").is_none());
    // Main is inadmissible on ⟨JJ⟩.
    let (code, _, err) = jrl(&["reduce", &data("heisenberg_jj.json"), "--variant", "main"], &[]);
    assert_eq!(code, 1);
    assert!(err.contains("admissibility"), "{err}");
}

#[test]
fn reduce_ledger_names_tilde_coefficient() {
    let (code, out, err) = jrl(&["reduce", &data("complex_fermion_bc.json"), "--ledger"], &[]);
    assert_eq!(code, 0, "{err}");
    let doc = json(&out);
    let ledger: jacobi_reduction::reduction::CoefficientLedger =
        serde_json::from_value(doc["ledger"].clone()).unwrap();
    assert!(ledger.specials().iter().any(|s| s.name == "P_tilde"));
    assert_eq!(ledger.value, value(&doc));
}

#[test]
fn reduce_failures() {
    let dir = std::env::temp_dir().join(format!("jrl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let base = std::fs::read_to_string(data("complex_fermion_bc.json")).unwrap();
    // ⟨b⟩ carries charge: degenerate at the first stage.
    let one: Value = {
        let mut v = json(&base);
        v["insertions"].as_array_mut().unwrap().truncate(1);
        v
    };
    let (code, _, err) = jrl(&["reduce", &write("one.json", &one.to_string())], &[]);
    assert_eq!(code, 1);
    assert!(err.contains("stage 1"), "{err}");

    let mut unknown = json(&base);
    unknown["colour"] = Value::from("blue");
    assert_eq!(jrl(&["reduce", &write("unknown.json", &unknown.to_string())], &[]).0, 2);
    let mut schema = json(&base);
    schema["schema"] = Value::from(2);
    assert_eq!(jrl(&["reduce", &write("schema.json", &schema.to_string())], &[]).0, 2);
    let mut unnested = json(&base);
    unnested["insertions"][1]["w"] = serde_json::json!([0.2, 0.05]);
    assert_eq!(jrl(&["reduce", &write("unnested.json", &unnested.to_string())], &[]).0, 2);
    let mut state = json(&base);
    state["insertions"][0]["state"] = Value::from("psi");
    assert_eq!(jrl(&["reduce", &write("state.json", &state.to_string())], &[]).0, 2);
    assert_eq!(jrl(&["reduce", &dir.join("missing.json").to_string_lossy()], &[]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = jrl(&["verify", "--suite", "specfun"], &[]);
    assert_eq!(code, 0);
    let report: Report = serde_json::from_str(&out).unwrap();
    assert!(report.all_pass() && report.summary.passed > 0);
    assert_eq!(report.summary.runtime, None);

    let (code, out, _) = jrl(&["verify", "--suite", "reduction", "--tol", "1e-30"], &[]);
    assert_eq!(code, 1);
    let report: Report = serde_json::from_str(&out).unwrap();
    assert!(report.summary.failed > 0);

    assert_eq!(jrl(&["verify", "--suite", "everything"], &[]).0, 2);
    assert_eq!(jrl(&["verify", "--suite", "voa", "--tol", "-1"], &[]).0, 2);
    let (code, out, _) = jrl(&["verify", "--suite", "voa", "--timing"], &[]);
    assert_eq!(code, 0);
    assert!(json(&out)["summary"]["runtime"].as_f64().is_some());
}

#[test]
fn verify_reports_are_byte_stable() {
    let a = jrl(&["verify", "--suite", "all"], &[]);
    let b = jrl(&["verify", "--suite", "all", "--threads", "1"], &[]);
    let c4 = jrl(&["verify", "--suite", "all", "--threads", "4"], &[]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1, c4.1);
}

#[test]
fn request_file_parses_named_and_explicit_states() {
    let text = std::fs::read_to_string(data("complex_fermion_bc.json")).unwrap();
    let req = RequestFile::from_json(&text).unwrap().to_request(60).unwrap();
    let spec = AlgebraSpec::complex_fermion();
    assert_eq!(req.insertions[0].v, spec.generator(0));
    assert_eq!(req.insertions[1].v, spec.generator(1));
    assert_eq!(req.kind, TraceKind::Supertrace);
    assert_eq!(req.truncation.n_q, 12);

    let text = std::fs::read_to_string(data("partition.json")).unwrap();
    let req = RequestFile::from_json(&text).unwrap().to_request(60).unwrap();
    assert!((req.params.zeta() - c(0.8, 0.3)).norm() < 1e-14);
}

fn any_request() -> impl Strategy<Value = NPointRequest> {
    let algebra = prop_oneof![
        Just((AlgebraSpec::heisenberg(1).unwrap(), vec![0.7])),
        Just((AlgebraSpec::heisenberg_with_current(2, vec![0.5, -1.0]).unwrap(), vec![0.3, -0.4])),
        Just((AlgebraSpec::real_fermion(), vec![])),
        Just((AlgebraSpec::complex_fermion(), vec![])),
        Just((AlgebraSpec::complex_fermion_graded(0.0), vec![])),
    ];
    (
        algebra,
        prop::collection::vec((0usize..4, -2.0f64..2.0, -2.0f64..2.0, -0.5f64..0.5), 0..4),
        (-1.0f64..1.0, -0.3f64..0.3),
        (-0.5f64..0.5, 0.3f64..1.5),
        prop::option::of((0.0f64..6.28, 0.0f64..1.0)),
        prop::option::of((-3i64..3, -3i64..3)),
        any::<bool>(),
    )
        .prop_map(|((spec, alpha), ins, z, tau, twist, shift, sup)| {
            let module = Arc::new(enumerate_basis(&spec, &Sector::heisenberg(alpha), 3.0).unwrap());
            let pool = [
                spec.generator(0),
                spec.current_state().unwrap_or_else(|| spec.generator(0)),
                monomial(&spec, &[(0, 2)]),
                monomial(&spec, &[(spec.n_species() - 1, 1), (0, 3)]),
            ];
            let tau = ModularPoint::new(c(tau.0, tau.1)).unwrap();
            let n = ins.len() as f64;
            let insertions = ins
                .iter()
                .enumerate()
                .map(|(i, &(pick, cr, ci, re))| Insertion {
                    v: pool[pick].scaled(c(cr, ci)),
                    w: c(re, tau.tau().im * (i as f64 + 1.0) / (n + 1.0)),
                })
                .collect();
            let mut params = JacobiParams::new(c(z.0, z.1), tau);
            if let Some((arg, lambda)) = twist {
                params = params.with_twist(TwistPair::new(Complex64::from_polar(1.0, arg), lambda).unwrap());
            }
            if let Some((l, m)) = shift {
                params = params.with_shift(l, m);
            }
            let kind = if sup { TraceKind::Supertrace } else { TraceKind::Trace };
            NPointRequest::new(module, insertions, params, kind)
                .with_truncation(Truncation::new(12, 40, 1e-11).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn request_round_trip(req in any_request()) {
        let text = RequestFile::from_request(&req).to_json();
        let back = RequestFile::from_json(&text).unwrap().to_request(60).unwrap();
        prop_assert_eq!(back.module.spec(), req.module.spec());
        prop_assert_eq!(back.module.sector(), req.module.sector());
        prop_assert_eq!(back.module.cap(), req.module.cap());
        prop_assert_eq!(back.module.basis(), req.module.basis());
        prop_assert_eq!(&back.insertions, &req.insertions);
        prop_assert_eq!(back.params, req.params);
        prop_assert_eq!(back.truncation, req.truncation);
        prop_assert_eq!(back.kind, req.kind);
        prop_assert_eq!(RequestFile::from_request(&back).to_json(), text);
    }
}
