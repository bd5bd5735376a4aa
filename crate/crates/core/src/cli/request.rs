//! JSON request files describing an n-point function.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "algebra": {"kind": "complex_fermion"},
//!   "level_cap": 12,
//!   "trace": "supertrace",
//!   "insertions": [
//!     {"state": "b", "w": [0.03, 0.12]},
//!     {"state": {"modes": [[1, 1]]}, "coefficient": [2.0, 0.0], "w": [0.21, 0.31]}
//!   ],
//!   "params": {"z": [0.13, 0.07], "tau": [0.0, 0.5]},
//!   "truncation": {"n_q": 12}
//! }
//! ```
//!
//! States are either a name (`"J"`, `"b"`, `"c"`, `"psi"`, `"a1"`, `"a2"`,
//! `"vac"`), a monomial `{"modes": [[species, k], ...]}` standing for
//! `g(−k) ⋯ 𝟙`, or a linear combination
//! `{"terms": [{"modes": [...], "coeff": [re, im]}, ...]}`.

use crate::reduction::{JacobiParams, NPointRequest};
use crate::specfun::{ModularPoint, Truncation, TwistPair};
use crate::voa::{
    enumerate_basis, AlgebraElement, AlgebraKind, AlgebraSpec, BasisState, Creator, Insertion, Sector, TraceKind,
};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub schema: u32,
    pub algebra: AlgebraDesc,
    /// Heisenberg charges `α_i`; empty for fermions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sector: Vec<f64>,
    pub level_cap: f64,
    #[serde(default = "default_trace")]
    pub trace: TraceKind,
    #[serde(default)]
    pub insertions: Vec<InsertionDesc>,
    pub params: ParamsDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationDesc>,
}

fn default_trace() -> TraceKind {
    TraceKind::Trace
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraDesc {
    Heisenberg {
        rank: u8,
        /// `J = Σ β_i a^i(−1)𝟙`; defaults to the first flavor.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        current: Option<Vec<f64>>,
    },
    RealFermion,
    ComplexFermion {
        /// Grading shift `s`; `1/2` gives `wt b = 1`, `wt c = 0`.
        #[serde(default = "default_grading")]
        grading: f64,
    },
}

fn default_grading() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertionDesc {
    pub state: StateDesc,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub coefficient: Complex64,
    /// Insertion point `w`, with `x = e(w)`.
    pub w: Complex64,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn is_one(c: &Complex64) -> bool {
    *c == one()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDesc {
    Name(String),
    Monomial(MonomialDesc),
    Combination(CombinationDesc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDesc {
    pub modes: Vec<(u8, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationDesc {
    pub terms: Vec<TermDesc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDesc {
    pub modes: Vec<(u8, u32)>,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Complex64>,
    /// `ζ = e(z)`, accepted in place of `z` (principal logarithm).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Complex64>,
    pub tau: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<(i64, i64)>,
}

/// `(θ, φ)` with `φ` given directly or as `φ = e(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistDesc {
    pub theta: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_mode: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl RequestFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {} (expected {SCHEMA})", file.schema)));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("request files serialize")
    }

    /// Builds the request; `default_nq` fills a missing `truncation.n_q`.
    pub fn to_request(&self, default_nq: usize) -> Result<NPointRequest> {
        let spec = match &self.algebra {
            AlgebraDesc::Heisenberg { rank, current: None } => AlgebraSpec::heisenberg(*rank)?,
            AlgebraDesc::Heisenberg { rank, current: Some(beta) } => {
                AlgebraSpec::heisenberg_with_current(*rank, beta.clone())?
            }
            AlgebraDesc::RealFermion => AlgebraSpec::real_fermion(),
            AlgebraDesc::ComplexFermion { grading } => AlgebraSpec::complex_fermion_graded(*grading),
        };
        let sector = Sector::heisenberg(self.sector.clone());
        sector.check(&spec)?;
        if !(self.level_cap >= 0.0) {
            return Err(Error::Parse(format!("level_cap must be ≥ 0, got {}", self.level_cap)));
        }
        let module = Arc::new(enumerate_basis(&spec, &sector, self.level_cap)?);
        let insertions = self
            .insertions
            .iter()
            .map(|ins| {
                let v = state(&spec, &ins.state)?.scaled(ins.coefficient);
                Ok(Insertion { v, w: ins.w })
            })
            .collect::<Result<Vec<_>>>()?;
        let z = match (self.params.z, self.params.zeta) {
            (Some(z), None) => z,
            (None, Some(zeta)) if zeta.norm() > 0.0 => zeta.ln() / Complex64::new(0.0, 2.0 * PI),
            (None, Some(_)) => return Err(Error::Parse("ζ must be nonzero".into())),
            (None, None) => Complex64::new(0.0, 0.0),
            (Some(_), Some(_)) => return Err(Error::Parse("give either z or zeta, not both".into())),
        };
        let mut params = JacobiParams::new(z, ModularPoint::new(self.params.tau)?);
        if let Some(t) = &self.params.twist {
            let pair = match (t.phi, t.lambda) {
                (Some(phi), None) => TwistPair::from_phi(t.theta, phi)?,
                (None, Some(l)) => TwistPair::new(t.theta, l)?,
                (None, None) => TwistPair::new(t.theta, 0.0)?,
                (Some(_), Some(_)) => return Err(Error::Parse("give either phi or lambda, not both".into())),
            };
            params = params.with_twist(pair);
        }
        if let Some((l, m)) = self.params.shift {
            params = params.with_shift(l, m);
        }
        let d = Truncation::default();
        let t = self.truncation.clone().unwrap_or(TruncationDesc { n_q: None, n_mode: None, tol: None });
        let truncation = Truncation::new(
            t.n_q.unwrap_or(default_nq),
            t.n_mode.unwrap_or(d.n_mode),
            t.tol.unwrap_or(d.tol),
        )?;
        let req = NPointRequest::new(module, insertions, params, self.trace).with_truncation(truncation);
        req.validate()?;
        Ok(req)
    }

    /// The request file describing `req`, with every state written out as a
    /// combination of monomials.
    pub fn from_request(req: &NPointRequest) -> Self {
        let spec = req.module.spec();
        let algebra = match spec.kind() {
            AlgebraKind::Heisenberg { rank } => {
                AlgebraDesc::Heisenberg { rank, current: spec.current().map(<[f64]>::to_vec) }
            }
            AlgebraKind::RealFermion => AlgebraDesc::RealFermion,
            AlgebraKind::ComplexFermion => AlgebraDesc::ComplexFermion { grading: spec.grading_shift() },
        };
        let insertions = req
            .insertions
            .iter()
            .map(|ins| InsertionDesc {
                state: StateDesc::Combination(CombinationDesc {
                    terms: ins
                        .v
                        .terms()
                        .map(|(s, c)| TermDesc { modes: s.modes().iter().map(|m| (m.species, m.k)).collect(), coeff: *c })
                        .collect(),
                }),
                coefficient: one(),
                w: ins.w,
            })
            .collect();
        let p = &req.params;
        Self {
            schema: SCHEMA,
            algebra,
            sector: req.module.sector().alpha().to_vec(),
            level_cap: req.module.cap(),
            trace: req.kind,
            insertions,
            params: ParamsDesc {
                z: Some(p.z()),
                zeta: None,
                tau: p.tau().tau(),
                twist: p.twist().map(|t| TwistDesc { theta: t.theta(), phi: None, lambda: Some(t.lambda()) }),
                shift: p.shift(),
            },
            truncation: Some(TruncationDesc {
                n_q: Some(req.truncation.n_q),
                n_mode: Some(req.truncation.n_mode),
                tol: Some(req.truncation.tol),
            }),
        }
    }
}

fn monomial(spec: &AlgebraSpec, modes: &[(u8, u32)]) -> Result<AlgebraElement> {
    let mut cr = Vec::with_capacity(modes.len());
    for &(species, k) in modes {
        spec.check_species(species)?;
        if k == 0 {
            return Err(Error::Parse("creation modes need k ≥ 1".into()));
        }
        cr.push(Creator { species, k });
    }
    match BasisState::from_creators(cr, spec.is_fermionic()) {
        Some((s, sign)) => Ok(AlgebraElement::basis(s).scaled(Complex64::new(sign, 0.0))),
        None => Ok(AlgebraElement::zero()),
    }
}

fn state(spec: &AlgebraSpec, desc: &StateDesc) -> Result<AlgebraElement> {
    match desc {
        StateDesc::Monomial(m) => monomial(spec, &m.modes),
        StateDesc::Combination(c) => {
            let mut v = AlgebraElement::zero();
            for t in &c.terms {
                v.add_scaled(&monomial(spec, &t.modes)?, t.coeff);
            }
            Ok(v)
        }
        StateDesc::Name(name) => {
            let kind = spec.kind();
            let gen = |s: u8| Ok(spec.generator(s));
            match (name.as_str(), kind) {
                ("vac" | "1", _) => Ok(AlgebraElement::vacuum()),
                ("J", _) => spec
                    .current_state()
                    .ok_or_else(|| Error::Parse("this algebra has no current J".into())),
                ("b", AlgebraKind::ComplexFermion) => gen(0),
                ("c", AlgebraKind::ComplexFermion) => gen(1),
                ("psi", AlgebraKind::RealFermion) => gen(0),
                ("a" | "a1", AlgebraKind::Heisenberg { .. }) => gen(0),
                ("a2", AlgebraKind::Heisenberg { rank: 2 }) => gen(1),
                _ => Err(Error::Parse(format!("unknown state {name:?} for {kind:?}"))),
            }
        }
    }
}
