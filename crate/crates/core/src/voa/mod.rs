//! Free-field vertex operator (super)algebras on truncated Fock modules:
//! rank-1/2 Heisenberg, the real free fermion and the complex (bc) fermion.
//!
//! Mode labels are integers throughout, `Y(v, x) = Σ v(n) x^{−n−1}`, so
//! `v(n)` shifts the weight by `wt v − n − 1`. Fermions satisfy
//! `{b(m), b(n)} = δ_{m+n,−1}` (real) and `{b(m), c(n)} = δ_{m+n,−1}`
//! (complex), with `b(n)𝟙 = 0` for `n ≥ 0`.

mod fock;
mod state;
mod trace;
mod vertex;

pub(crate) use fock::{charge as state_charge, level as state_level};
pub use fock::{apply_mode, enumerate_basis, weight_charge, ModeOp, ModuleSpace, Parity, DEFAULT_BASIS_BUDGET};
pub use state::{AlgebraElement, BasisState, Creator};
pub use trace::{check_nested, graded_trace, npoint_oracle, npoint_oracle_sided, npoint_oracle_with_ops, Insertion, OracleRequest, TraceKind, TraceOp};
pub(crate) use vertex::{element_parity, homogeneous_weight};
pub use vertex::{
    shifted_square_mode, square_bracket_coefficients, square_mode, vertex_mode, zero_mode, MAX_INSERTION_WEIGHT,
};

use crate::{Error, Result};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// Which free-field algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    Heisenberg { rank: u8 },
    RealFermion,
    ComplexFermion,
}

/// An algebra together with its charge current `J` and grading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    kind: AlgebraKind,
    central_charge: Rational64,
    /// Heisenberg: `J = Σ β_i a^i(−1)𝟙`. Complex fermion: `[1.0]` for the bc
    /// current. Real fermion: none.
    current: Option<Vec<f64>>,
    /// Complex fermion only: `L_s(0) = L(0) + s J(0)`, giving
    /// `wt b = 1/2 + s`, `wt c = 1/2 − s`.
    grading_shift: f64,
    parity_support: bool,
}

impl AlgebraSpec {
    /// Rank-`r` Heisenberg algebra with `J = a^1(−1)𝟙`.
    pub fn heisenberg(rank: u8) -> Result<Self> {
        let mut beta = vec![0.0; rank as usize];
        if let Some(b) = beta.first_mut() {
            *b = 1.0;
        }
        Self::heisenberg_with_current(rank, beta)
    }

    /// Rank-`r` Heisenberg algebra with `J = Σ β_i a^i(−1)𝟙`.
    pub fn heisenberg_with_current(rank: u8, beta: Vec<f64>) -> Result<Self> {
        if !(1..=2).contains(&rank) || beta.len() != rank as usize {
            return Err(Error::InvalidParameter(format!(
                "Heisenberg rank must be 1 or 2 with one β per flavor (rank {rank}, {} β)",
                beta.len()
            )));
        }
        Ok(Self {
            kind: AlgebraKind::Heisenberg { rank },
            central_charge: Rational64::from_integer(rank as i64),
            current: Some(beta),
            grading_shift: 0.0,
            parity_support: false,
        })
    }

    pub fn real_fermion() -> Self {
        Self {
            kind: AlgebraKind::RealFermion,
            central_charge: Rational64::new(1, 2),
            current: None,
            grading_shift: 0.0,
            parity_support: true,
        }
    }

    /// Complex fermion in the integral bc grading `s = 1/2` (`wt b = 1`,
    /// `wt c = 0`).
    pub fn complex_fermion() -> Self {
        Self::complex_fermion_graded(0.5)
    }

    /// Complex fermion with grading shift `s`; `s = 0` is the NS grading.
    pub fn complex_fermion_graded(s: f64) -> Self {
        Self {
            kind: AlgebraKind::ComplexFermion,
            central_charge: Rational64::from_integer(1),
            current: Some(vec![1.0]),
            grading_shift: s,
            parity_support: true,
        }
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn central_charge(&self) -> Rational64 {
        self.central_charge
    }

    pub fn central_charge_f64(&self) -> f64 {
        *self.central_charge.numer() as f64 / *self.central_charge.denom() as f64
    }

    pub fn current(&self) -> Option<&[f64]> {
        self.current.as_deref()
    }

    pub fn grading_shift(&self) -> f64 {
        self.grading_shift
    }

    pub fn parity_support(&self) -> bool {
        self.parity_support
    }

    pub fn is_fermionic(&self) -> bool {
        !matches!(self.kind, AlgebraKind::Heisenberg { .. })
    }

    pub fn n_species(&self) -> u8 {
        match self.kind {
            AlgebraKind::Heisenberg { rank } => rank,
            AlgebraKind::RealFermion => 1,
            AlgebraKind::ComplexFermion => 2,
        }
    }

    pub fn check_species(&self, species: u8) -> Result<()> {
        if species >= self.n_species() {
            return Err(Error::InvalidParameter(format!("species {species} not in this algebra")));
        }
        Ok(())
    }

    /// Weight of the generating state `g(−1)𝟙` of a species.
    pub fn species_weight(&self, species: u8) -> f64 {
        match self.kind {
            AlgebraKind::Heisenberg { .. } => 1.0,
            AlgebraKind::RealFermion => 0.5,
            AlgebraKind::ComplexFermion => {
                if species == 0 {
                    0.5 + self.grading_shift
                } else {
                    0.5 - self.grading_shift
                }
            }
        }
    }

    /// `J(0)`-charge carried by one mode of the species.
    pub fn species_charge(&self, species: u8) -> f64 {
        match self.kind {
            AlgebraKind::ComplexFermion => {
                if species == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => 0.0,
        }
    }

    /// Species whose creators a nonnegative mode of `species` removes.
    pub fn partner(&self, species: u8) -> u8 {
        match self.kind {
            AlgebraKind::ComplexFermion => 1 - species,
            _ => species,
        }
    }

    /// Weight added by the creator `g(−k)`.
    pub fn creator_weight(&self, c: &Creator) -> f64 {
        self.species_weight(c.species) + c.k as f64 - 1.0
    }

    /// The generating state `g(−1)𝟙`.
    pub fn generator(&self, species: u8) -> AlgebraElement {
        AlgebraElement::basis(BasisState::from_creators(vec![Creator { species, k: 1 }], false).unwrap().0)
    }

    /// The current `J` as a state, if defined.
    pub fn current_state(&self) -> Option<AlgebraElement> {
        let beta = self.current.as_ref()?;
        match self.kind {
            AlgebraKind::Heisenberg { .. } => {
                let mut j = AlgebraElement::zero();
                for (i, b) in beta.iter().enumerate() {
                    j.add_scaled(&self.generator(i as u8), crate::Complex64::new(*b, 0.0));
                }
                Some(j)
            }
            AlgebraKind::ComplexFermion => {
                // J = b(−1)c(−1)𝟙
                let (s, sign) = BasisState::from_creators(
                    vec![Creator { species: 0, k: 1 }, Creator { species: 1, k: 1 }],
                    true,
                )?;
                Some(AlgebraElement::basis(s).scaled(crate::Complex64::new(sign * beta[0], 0.0)))
            }
            AlgebraKind::RealFermion => None,
        }
    }
}

/// Fock sector: Heisenberg charges `α_i = a^i(0)`; empty for fermions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Sector {
    alpha: Vec<f64>,
}

impl Sector {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn heisenberg(alpha: Vec<f64>) -> Self {
        Self { alpha }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `a^i(0)` eigenvalue.
    pub fn alpha_of(&self, species: u8) -> f64 {
        self.alpha.get(species as usize).copied().unwrap_or(0.0)
    }

    pub fn check(&self, spec: &AlgebraSpec) -> Result<()> {
        match spec.kind() {
            AlgebraKind::Heisenberg { rank } if self.alpha.len() <= rank as usize => Ok(()),
            AlgebraKind::Heisenberg { .. } => {
                Err(Error::InvalidParameter("more sector charges than flavors".into()))
            }
            _ if self.alpha.iter().all(|a| *a == 0.0) => Ok(()),
            _ => Err(Error::InvalidParameter("fermion modules carry no sector charge".into())),
        }
    }

    /// Highest weight `Σ α_i²/2`.
    pub fn weight(&self) -> f64 {
        self.alpha.iter().map(|a| a * a / 2.0).sum()
    }

    /// `J(0)` on the highest-weight vector.
    pub fn charge(&self, spec: &AlgebraSpec) -> f64 {
        match (spec.kind(), spec.current()) {
            (AlgebraKind::Heisenberg { .. }, Some(beta)) => {
                beta.iter().enumerate().map(|(i, b)| b * self.alpha_of(i as u8)).sum()
            }
            _ => 0.0,
        }
    }
}
