use super::{AlgebraElement, AlgebraKind, AlgebraSpec, BasisState, Creator, Sector};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Largest basis [`enumerate_basis`] builds.
pub const DEFAULT_BASIS_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_count(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(−1)^{p q}`.
    pub fn sign_with(self, other: Parity) -> f64 {
        if self.is_odd() && other.is_odd() {
            -1.0
        } else {
            1.0
        }
    }
}

/// A single mode `g(n)` of a generating field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeOp {
    pub species: u8,
    pub n: i64,
}

/// Oscillator level of a monomial (sector weight excluded).
pub(crate) fn level(spec: &AlgebraSpec, s: &BasisState) -> f64 {
    s.modes().iter().map(|c| spec.creator_weight(c)).sum()
}

pub(crate) fn charge(spec: &AlgebraSpec, s: &BasisState) -> f64 {
    s.modes().iter().map(|c| spec.species_charge(c.species)).sum()
}

pub(crate) fn parity(spec: &AlgebraSpec, s: &BasisState) -> Parity {
    if spec.is_fermionic() {
        Parity::of_count(s.len())
    } else {
        Parity::Even
    }
}

/// `(L(0) weight, J(0) charge, parity)` of a monomial in the given sector.
pub fn weight_charge(spec: &AlgebraSpec, sector: &Sector, s: &BasisState) -> (f64, f64, Parity) {
    (
        level(spec, s) + sector.weight(),
        charge(spec, s) + sector.charge(spec),
        parity(spec, s),
    )
}

fn apply_to_basis(spec: &AlgebraSpec, sector: &Sector, op: ModeOp, s: &BasisState, c: Complex64, out: &mut AlgebraElement) {
    let fermionic = spec.is_fermionic();
    if op.n < 0 {
        let cr = Creator { species: op.species, k: (-op.n) as u32 };
        match s.position(&cr) {
            Ok(_) if fermionic => {}
            Ok(at) | Err(at) => {
                let sign = if fermionic && at % 2 == 1 { -1.0 } else { 1.0 };
                out.add_term(s.inserted(at, cr), c * sign);
            }
        }
        return;
    }
    if !fermionic {
        if op.n == 0 {
            out.add_term(s.clone(), c * sector.alpha_of(op.species));
            return;
        }
        let cr = Creator { species: op.species, k: op.n as u32 };
        let mult = s.count(&cr);
        if mult > 0 {
            let at = s.position(&cr).unwrap_or_else(|_| unreachable!());
            out.add_term(s.removed(at), c * (op.n as f64 * mult as f64));
        }
        return;
    }
    let cr = Creator { species: spec.partner(op.species), k: (op.n + 1) as u32 };
    if let Ok(at) = s.position(&cr) {
        let sign = if at % 2 == 1 { -1.0 } else { 1.0 };
        out.add_term(s.removed(at), c * sign);
    }
}

/// Applies a single mode to an element, with no level cap.
pub fn apply_mode(spec: &AlgebraSpec, sector: &Sector, op: ModeOp, elem: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (s, c) in elem.terms() {
        apply_to_basis(spec, sector, op, s, *c, &mut out);
    }
    out
}

/// Fock module truncated at oscillator level `L`, with its ordered basis.
#[derive(Debug, Clone)]
pub struct ModuleSpace {
    spec: AlgebraSpec,
    sector: Sector,
    cap: f64,
    basis: Vec<BasisState>,
    levels: Vec<f64>,
    charges: Vec<f64>,
    parities: Vec<Parity>,
    index: HashMap<BasisState, usize>,
}

impl ModuleSpace {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Oscillator level of the `i`-th basis state.
    pub fn level_of(&self, i: usize) -> f64 {
        self.levels[i]
    }

    /// Full `L(0)` weight (level plus sector weight) of the `i`-th state.
    pub fn weight_of(&self, i: usize) -> f64 {
        self.levels[i] + self.sector.weight()
    }

    pub fn charge_of(&self, i: usize) -> f64 {
        self.charges[i] + self.sector.charge(&self.spec)
    }

    pub fn parity_of(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Number of basis states at each level `0, δ, 2δ, …` (δ = 1/2 for
    /// half-integral gradings, 1 otherwise).
    pub fn graded_dimensions(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &l in &self.levels {
            match out.iter_mut().find(|(x, _)| *x == l) {
                Some(e) => e.1 += 1,
                None => out.push((l, 1)),
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// [`apply_mode`] with a `TruncationLoss` error when the image leaves
    /// the level cap.
    pub fn apply_mode(&self, op: ModeOp, elem: &AlgebraElement) -> Result<AlgebraElement> {
        self.spec.check_species(op.species)?;
        let out = apply_mode(&self.spec, &self.sector, op, elem);
        for (s, c) in out.terms() {
            if c.norm() > 0.0 && level(&self.spec, s) > self.cap + 1e-9 {
                return Err(Error::TruncationLoss(format!(
                    "mode {:?} maps above level cap {}",
                    op, self.cap
                )));
            }
        }
        Ok(out)
    }
}

/// Enumerates every Fock monomial of oscillator level `≤ L`, ordered by
/// level and then lexicographically.
pub fn enumerate_basis(spec: &AlgebraSpec, sector: &Sector, cap: f64) -> Result<ModuleSpace> {
    enumerate_basis_with_budget(spec, sector, cap, DEFAULT_BASIS_BUDGET)
}

pub(crate) fn enumerate_basis_with_budget(spec: &AlgebraSpec, sector: &Sector, cap: f64, budget: usize) -> Result<ModuleSpace> {
    if !(cap >= 0.0) {
        return Err(Error::InvalidParameter(format!("level cap must be ≥ 0, got {cap}")));
    }
    sector.check(spec)?;
    let mut creators = Vec::new();
    for species in 0..spec.n_species() {
        let mut k = 1u32;
        while spec.creator_weight(&Creator { species, k }) <= cap + 1e-9 {
            creators.push(Creator { species, k });
            k += 1;
        }
    }
    if matches!(spec.kind(), AlgebraKind::ComplexFermion) {
        // a zero-weight creator would make levels infinite-dimensional
        if creators.iter().any(|c| spec.creator_weight(c) < 0.0) {
            return Err(Error::InvalidParameter("grading shift gives negative weights".into()));
        }
    }
    let fermionic = spec.is_fermionic();
    let mut states: Vec<(f64, BasisState)> = Vec::new();
    let mut current = Vec::new();
    fn rec(
        spec: &AlgebraSpec,
        creators: &[Creator],
        start: usize,
        fermionic: bool,
        remaining: f64,
        current: &mut Vec<Creator>,
        out: &mut Vec<(f64, BasisState)>,
        budget: usize,
        cap: f64,
    ) -> Result<()> {
        if out.len() >= budget {
            return Err(Error::CapTooLarge(format!("more than {budget} states below level {cap}")));
        }
        let (s, _) = BasisState::from_creators(current.clone(), false).unwrap();
        out.push((level(spec, &s), s));
        for i in start..creators.len() {
            let w = spec.creator_weight(&creators[i]);
            if w > remaining + 1e-9 {
                continue;
            }
            current.push(creators[i]);
            let next = if fermionic { i + 1 } else { i };
            rec(spec, creators, next, fermionic, remaining - w, current, out, budget, cap)?;
            current.pop();
        }
        Ok(())
    }
    rec(spec, &creators, 0, fermionic, cap, &mut current, &mut states, budget, cap)?;
    states.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut module = ModuleSpace {
        spec: spec.clone(),
        sector: sector.clone(),
        cap,
        basis: Vec::with_capacity(states.len()),
        levels: Vec::with_capacity(states.len()),
        charges: Vec::with_capacity(states.len()),
        parities: Vec::with_capacity(states.len()),
        index: HashMap::with_capacity(states.len()),
    };
    for (l, s) in states {
        module.index.insert(s.clone(), module.basis.len());
        module.levels.push(l);
        module.charges.push(charge(spec, &s));
        module.parities.push(parity(spec, &s));
        module.basis.push(s);
    }
    Ok(module)
}
