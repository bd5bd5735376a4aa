use super::coboundary::{coboundary_apply, CoboundaryVariant, NPointEvaluable};
use crate::voa::{AlgebraElement, Insertion};
use crate::{Complex64, Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Numerical rank data of `δ^n` restricted to a finite candidate basis and
/// sampled on a finite grid. These are estimates, not cohomology groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologyEstimate {
    pub kernel_dim: usize,
    pub image_dim: usize,
    /// Singular values of the sampled matrix, in decreasing order.
    pub singular_values: Vec<f64>,
}

/// Samples `δ^n(x_next)·f_j` for each candidate `f_j` at every grid point
/// (insertion states `states`, then `x_next`) and reads off the numerical
/// rank of the resulting `samples × candidates` matrix.
pub fn cohomology_probe(
    n: usize,
    x_next: &AlgebraElement,
    variant: CoboundaryVariant,
    basis: &[Arc<dyn NPointEvaluable>],
    states: &[AlgebraElement],
    grid: &[Vec<Complex64>],
) -> Result<CohomologyEstimate> {
    if states.len() != n {
        return Err(Error::InvalidParameter(format!("{} states for n = {n}", states.len())));
    }
    if grid.is_empty() || grid.iter().any(|g| g.len() != n + 1 || g.iter().any(|w| !w.is_finite())) {
        return Err(Error::GridDegenerate(format!("grid points must carry {} finite positions", n + 1)));
    }
    if basis.is_empty() {
        return Ok(CohomologyEstimate { kernel_dim: 0, image_dim: 0, singular_values: Vec::new() });
    }
    let mut all = states.to_vec();
    all.push(x_next.clone());
    let mut m = DMatrix::<Complex64>::zeros(grid.len(), basis.len());
    for (j, f) in basis.iter().enumerate() {
        let d = coboundary_apply(n, x_next, variant, f.clone())?;
        for (i, ws) in grid.iter().enumerate() {
            let ins: Vec<Insertion> = all.iter().zip(ws).map(|(v, w)| Insertion { v: v.clone(), w: *w }).collect();
            m[(i, j)] = d.eval(&ins, &[])?;
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 { 0 } else { sv.iter().filter(|s| **s > RANK_THRESHOLD * top).count() };
    Ok(CohomologyEstimate { kernel_dim: basis.len() - rank, image_dim: rank, singular_values: sv })
}
