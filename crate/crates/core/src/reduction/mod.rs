//! Zhu-type reduction of Jacobi n-point functions down to the partition
//! function, the four coboundary operators assembled from it, and numerical
//! probes of the chain condition, the KZ-type equation and the reduction
//! cohomology.
//!
//! Insertions are ordered as in [`crate::voa::npoint_oracle`]: the first is
//! outermost, `0 < Im w_1 < ⋯ < Im w_n < Im τ`. [`reduce_full`] always reduces
//! the last (innermost) insertion, so the graded sign attached to position `k`
//! collects the parities of insertions `k, …, n`.

mod branch;
mod coboundary;
mod cohomology;
mod identities;
mod ledger;
mod reduce;

pub use branch::{Branch, BranchSelector, FunctionFamily, ReducedVertex, TOL_LATTICE};
pub use coboundary::{
    chain_condition_residual, coboundary_apply, kz_residual, kz_residual_perturbed, sample_grid, Coboundary,
    CoboundaryVariant, NPointEvaluable, OracleFunction, ReducedFunction, ShiftedFunction, VariantData, ZeroFunction,
    ZeroModeOp, GRID_SEED,
};
pub use cohomology::{cohomology_probe, CohomologyEstimate, RANK_THRESHOLD};
pub use identities::{identity_rec1, identity_v0_sum, identity_zero_res};
pub use ledger::{CoefficientLedger, LedgerChild, LedgerNode, NodeKey, SpecialFunction, SpecialValue};
pub use reduce::{reduce_full, reduce_negative_mode, reduce_step, ReductionTarget, ReductionTerm};

use crate::specfun::{e, ModularPoint, Truncation, TwistPair};
use crate::voa::{Insertion, ModuleSpace, OracleRequest, TraceKind};
use crate::{Complex64, Error, Result};
use std::sync::Arc;

/// Parameters `B` of a Jacobi function: `z`, `τ`, and optional twist and
/// shift data used by the superalgebra and shifted-grading variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    z: Complex64,
    tau: ModularPoint,
    twist: Option<TwistPair>,
    shift: Option<(i64, i64)>,
}

impl JacobiParams {
    pub fn new(z: Complex64, tau: ModularPoint) -> Self {
        Self { z, tau, twist: None, shift: None }
    }

    pub fn with_twist(mut self, twist: TwistPair) -> Self {
        self.twist = Some(twist);
        self
    }

    /// Shift data `(λ, μ)` of the shifted grading.
    pub fn with_shift(mut self, lambda: i64, mu: i64) -> Self {
        self.shift = Some((lambda, mu));
        self
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn tau(&self) -> ModularPoint {
        self.tau
    }

    /// `ζ = e(z)`.
    pub fn zeta(&self) -> Complex64 {
        e(self.z)
    }

    pub fn twist(&self) -> Option<TwistPair> {
        self.twist
    }

    pub fn shift(&self) -> Option<(i64, i64)> {
        self.shift
    }
}

/// An n-point Jacobi function request `𝒵(x_1, …, x_n; B)` on a module.
#[derive(Debug, Clone)]
pub struct NPointRequest {
    pub module: Arc<ModuleSpace>,
    pub insertions: Vec<Insertion>,
    pub params: JacobiParams,
    pub truncation: Truncation,
    pub kind: TraceKind,
}

impl NPointRequest {
    pub fn new(module: Arc<ModuleSpace>, insertions: Vec<Insertion>, params: JacobiParams, kind: TraceKind) -> Self {
        Self { module, insertions, params, truncation: Truncation::default(), kind }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// The same request with other insertions.
    pub fn with_insertions(&self, insertions: Vec<Insertion>) -> Self {
        Self { insertions, ..self.clone() }
    }

    /// Checks distinct positions in the nested ordering.
    pub fn validate(&self) -> Result<()> {
        crate::voa::check_nested(&self.insertions, &self.params.tau)?;
        for (i, a) in self.insertions.iter().enumerate() {
            for b in &self.insertions[i + 1..] {
                if (a.w - b.w).norm() < self.truncation.tol {
                    return Err(Error::InvalidParameter("coincident insertion points".into()));
                }
            }
        }
        Ok(())
    }

    /// The direct-trace evaluation of the same request.
    pub fn oracle(&self) -> OracleRequest<'_> {
        OracleRequest {
            module: &self.module,
            insertions: self.insertions.clone(),
            z: self.params.z,
            tau: self.params.tau,
            kind: self.kind,
            n_mode: self.truncation.n_mode,
        }
    }
}
