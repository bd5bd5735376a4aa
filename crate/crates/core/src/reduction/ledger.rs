use super::branch::FunctionFamily;
use crate::specfun::{e, CompensatedSum, ModularPoint, Truncation};
use crate::voa::Insertion;
use crate::{Complex64, Result};
use serde::{Deserialize, Serialize};

/// A special-function coefficient that can be recomputed from its arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "snake_case")]
pub enum SpecialFunction {
    /// `F_k(w)` of a Weierstrass-type family.
    Weierstrass { family: FunctionFamily, k: usize, w: Complex64 },
    /// Laurent coefficient `c_k` of `F_1` at `w = 0`.
    Laurent { family: FunctionFamily, k: usize },
    /// `e(−λw)`.
    Phase { lambda: i64, w: Complex64 },
}

impl SpecialFunction {
    pub fn name(&self) -> &'static str {
        match self {
            SpecialFunction::Weierstrass { family, .. } => family.name(),
            SpecialFunction::Laurent { family, .. } => family.laurent_name(),
            SpecialFunction::Phase { .. } => "e",
        }
    }

    pub fn evaluate(&self, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
        match self {
            SpecialFunction::Weierstrass { family, k, w } => family.eval(*k, *w, tau, tr),
            SpecialFunction::Laurent { family, k } => family.laurent(*k, tau, tr),
            SpecialFunction::Phase { lambda, w } => Ok(e(-*w * *lambda as f64)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialValue {
    pub name: String,
    #[serde(flatten)]
    pub function: SpecialFunction,
    pub value: Complex64,
}

impl SpecialValue {
    pub fn compute(function: SpecialFunction, tau: &ModularPoint, tr: &Truncation) -> Result<Self> {
        let value = function.evaluate(tau, tr)?;
        Ok(Self { name: function.name().to_string(), function, value })
    }
}

/// Position `k` (1-based, 0 for the zero-mode term), mode `m` and descendant
/// depth `l` of a reduction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeKey {
    pub k: usize,
    pub m: i64,
    pub l: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LedgerChild {
    /// A function with fewer insertions (or lower total weight), reduced further.
    Reduced { ledger: Box<CoefficientLedger> },
    /// A trace with a zero-mode operator evaluated directly on the module.
    Trace { operator: String, insertions: Vec<Insertion>, value: Complex64 },
}

impl LedgerChild {
    pub fn value(&self) -> Complex64 {
        match self {
            LedgerChild::Reduced { ledger } => ledger.value,
            LedgerChild::Trace { value, .. } => *value,
        }
    }
}

/// One term `factor · special · child` of a reduction stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerNode {
    pub key: NodeKey,
    pub factor: Complex64,
    pub special: Option<SpecialValue>,
    pub child: LedgerChild,
}

impl LedgerNode {
    pub fn coefficient(&self) -> Complex64 {
        self.factor * self.special.as_ref().map_or(Complex64::new(1.0, 0.0), |s| s.value)
    }

    pub fn contribution(&self) -> Complex64 {
        self.coefficient() * self.child.value()
    }
}

/// The tree of coefficients produced by full reduction. A ledger without
/// nodes and without insertions is the partition function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientLedger {
    pub insertions: Vec<Insertion>,
    pub nodes: Vec<LedgerNode>,
    pub value: Complex64,
}

impl CoefficientLedger {
    pub fn partition(value: Complex64) -> Self {
        Self { insertions: Vec::new(), nodes: Vec::new(), value }
    }

    pub(crate) fn from_nodes(insertions: Vec<Insertion>, nodes: Vec<LedgerNode>) -> Self {
        let mut acc = CompensatedSum::new();
        for n in &nodes {
            acc.add(n.contribution());
        }
        Self { insertions, nodes, value: acc.value() }
    }

    pub fn arity(&self) -> usize {
        self.insertions.len()
    }

    /// Bottom-up sum of the stored values.
    pub fn evaluate(&self) -> Complex64 {
        if self.nodes.is_empty() {
            return self.value;
        }
        let mut acc = CompensatedSum::new();
        for n in &self.nodes {
            let child = match &n.child {
                LedgerChild::Reduced { ledger } => ledger.evaluate(),
                LedgerChild::Trace { value, .. } => *value,
            };
            acc.add(n.coefficient() * child);
        }
        acc.value()
    }

    /// Bottom-up sum with every special function recomputed from its
    /// arguments; leaves keep their stored values.
    pub fn reevaluate(&self, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
        if self.nodes.is_empty() {
            return Ok(self.value);
        }
        let mut acc = CompensatedSum::new();
        for n in &self.nodes {
            let special = match &n.special {
                Some(s) => s.function.evaluate(tau, tr)?,
                None => Complex64::new(1.0, 0.0),
            };
            let child = match &n.child {
                LedgerChild::Reduced { ledger } => ledger.reevaluate(tau, tr)?,
                LedgerChild::Trace { value, .. } => *value,
            };
            acc.add(n.factor * special * child);
        }
        Ok(acc.value())
    }

    /// Every special function in the tree, depth first.
    pub fn specials(&self) -> Vec<&SpecialValue> {
        let mut out = Vec::new();
        for n in &self.nodes {
            if let Some(s) = &n.special {
                out.push(s);
            }
            if let LedgerChild::Reduced { ledger } = &n.child {
                out.extend(ledger.specials());
            }
        }
        out
    }

    /// Number of leaves (partition functions and direct traces).
    pub fn leaf_count(&self) -> usize {
        if self.nodes.is_empty() {
            return usize::from(self.insertions.is_empty());
        }
        self.nodes
            .iter()
            .map(|n| match &n.child {
                LedgerChild::Reduced { ledger } => ledger.leaf_count(),
                LedgerChild::Trace { .. } => 1,
            })
            .sum()
    }

    /// The same tree with the coefficient of the dominant top-level node
    /// scaled by `s`, and values recomputed.
    pub fn perturbed(&self, s: f64) -> Self {
        let mut out = self.clone();
        if let Some(i) = (0..out.nodes.len()).max_by(|&a, &b| {
            out.nodes[a].contribution().norm().total_cmp(&out.nodes[b].contribution().norm())
        }) {
            out.nodes[i].factor *= s;
        }
        let nodes = std::mem::take(&mut out.nodes);
        Self::from_nodes(out.insertions, nodes)
    }
}
