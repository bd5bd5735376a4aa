use crate::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One creation operator `g(−k)`, `k ≥ 1`, of species `g`.
///
/// Species are Heisenberg flavors `0..r`, the real fermion `0`, or the
/// complex fermion pair `b = 0`, `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Creator {
    pub species: u8,
    pub k: u32,
}

/// Fock monomial `g_1(−k_1) ⋯ g_r(−k_r)|sector⟩` with factors sorted by
/// `(species, k)`. Bosonic factors may repeat; fermionic ones may not.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct BasisState {
    modes: Vec<Creator>,
}

impl BasisState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Builds a monomial from unsorted creators; returns the sorted state and
    /// the sign of the reordering when the factors anticommute, or `None` for
    /// a repeated fermionic factor.
    pub fn from_creators(mut modes: Vec<Creator>, fermionic: bool) -> Option<(Self, f64)> {
        let mut sign = 1.0;
        // insertion sort keeps track of transpositions
        for i in 1..modes.len() {
            let mut j = i;
            while j > 0 && modes[j - 1] > modes[j] {
                modes.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if fermionic {
            if modes.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
        } else {
            sign = 1.0;
        }
        Some((Self { modes }, sign))
    }

    pub fn modes(&self) -> &[Creator] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.modes.is_empty()
    }

    pub(crate) fn position(&self, c: &Creator) -> Result<usize, usize> {
        self.modes.binary_search(c)
    }

    pub(crate) fn count(&self, c: &Creator) -> usize {
        self.modes.iter().filter(|m| *m == c).count()
    }

    pub(crate) fn inserted(&self, at: usize, c: Creator) -> Self {
        let mut modes = self.modes.clone();
        modes.insert(at, c);
        Self { modes }
    }

    pub(crate) fn removed(&self, at: usize) -> Self {
        let mut modes = self.modes.clone();
        modes.remove(at);
        Self { modes }
    }

    /// Splits off the first factor: `g(−k) ⊗ rest`.
    pub fn split_first(&self) -> Option<(Creator, Self)> {
        let (first, rest) = self.modes.split_first()?;
        Some((*first, Self { modes: rest.to_vec() }))
    }
}

/// Finite linear combination of Fock monomials, kept in a fixed order.
/// Serialized as a list of `(state, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<(BasisState, Complex64)>", from = "Vec<(BasisState, Complex64)>")]
pub struct AlgebraElement {
    terms: BTreeMap<BasisState, Complex64>,
}

impl From<AlgebraElement> for Vec<(BasisState, Complex64)> {
    fn from(e: AlgebraElement) -> Self {
        e.terms.into_iter().collect()
    }
}

impl From<Vec<(BasisState, Complex64)>> for AlgebraElement {
    fn from(v: Vec<(BasisState, Complex64)>) -> Self {
        Self::from_terms(v)
    }
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(BasisState::vacuum())
    }

    pub fn basis(s: BasisState) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, Complex64::new(1.0, 0.0));
        Self { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (BasisState, Complex64)>) -> Self {
        let mut e = Self::zero();
        for (s, c) in it {
            e.add_term(s, c);
        }
        e
    }

    pub fn add_term(&mut self, s: BasisState, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(s).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
    }

    pub fn add_scaled(&mut self, other: &AlgebraElement, c: Complex64) {
        for (s, v) in &other.terms {
            self.add_term(s.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisState, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &BasisState) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Drops coefficients with `|c| ≤ eps`.
    pub fn pruned(mut self, eps: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > eps);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.norm() == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}
