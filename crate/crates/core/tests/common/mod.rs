#![allow(dead_code)]

use jacobi_reduction::reduction::{JacobiParams, NPointRequest};
use jacobi_reduction::specfun::{ModularPoint, Truncation};
use jacobi_reduction::voa::{
    enumerate_basis, AlgebraElement, AlgebraSpec, BasisState, Creator, Insertion, Sector, TraceKind,
};
use jacobi_reduction::Complex64;
use std::sync::Arc;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn tau() -> ModularPoint {
    ModularPoint::new(c(0.0, 0.5)).unwrap()
}

pub const W1: Complex64 = Complex64::new(0.03, 0.12);
pub const W2: Complex64 = Complex64::new(0.21, 0.31);
pub const W3: Complex64 = Complex64::new(0.37, 0.42);
pub const Z_GENERIC: Complex64 = Complex64::new(0.13, 0.07);

pub fn at(v: &AlgebraElement, w: Complex64) -> Insertion {
    Insertion { v: v.clone(), w }
}

/// A monomial `g_1(−k_1) ⋯ g_r(−k_r)𝟙`, normalized to coefficient 1.
pub fn monomial(spec: &AlgebraSpec, modes: &[(u8, u32)]) -> AlgebraElement {
    let cr = modes.iter().map(|&(species, k)| Creator { species, k }).collect();
    let (s, sign) = BasisState::from_creators(cr, spec.is_fermionic()).unwrap();
    AlgebraElement::basis(s).scaled(c(sign, 0.0))
}

/// Request at `τ = 0.5i` with level cap and `n_q` equal to `cap`.
pub fn request(
    spec: &AlgebraSpec,
    sector: Sector,
    cap: usize,
    insertions: Vec<Insertion>,
    z: Complex64,
    kind: TraceKind,
) -> NPointRequest {
    let module = Arc::new(enumerate_basis(spec, &sector, cap as f64).unwrap());
    NPointRequest::new(module, insertions, JacobiParams::new(z, tau()), kind)
        .with_truncation(Truncation::new(cap, 64, 1e-12).unwrap())
}

pub fn heisenberg(alpha: f64) -> (AlgebraSpec, Sector) {
    (AlgebraSpec::heisenberg(1).unwrap(), Sector::heisenberg(vec![alpha]))
}

pub fn rank2(alpha: [f64; 2]) -> (AlgebraSpec, Sector) {
    (AlgebraSpec::heisenberg(2).unwrap(), Sector::heisenberg(alpha.to_vec()))
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}
