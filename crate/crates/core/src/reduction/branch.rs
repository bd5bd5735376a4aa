use crate::specfun::weierstrass::{evaluate, Family};
use crate::specfun::{
    e, eisenstein_tilde, laurent_coeffs_p1, p1_twisted_laurent, LaurentKind, ModularPoint, Truncation, TwistPair,
};
use crate::voa::{AlgebraSpec, TraceKind};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// Distance to `ℤτ + ℤ`, in lattice coordinates, below which `αz` is treated
/// as a lattice point.
pub const TOL_LATTICE: f64 = 1e-9;

/// Points closer than this to the lattice but farther than [`TOL_LATTICE`]
/// are rejected: the generic coefficients are too ill-conditioned there.
const UNRESOLVED_BAND: f64 = 1e-6;

/// Which reduction formula applies to a vertex of charge `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Branch {
    /// `αz ∉ ℤτ + ℤ`.
    Generic { alpha_z: Complex64 },
    /// `αz = λτ + μ`.
    Lattice { lambda: i64, mu: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSelector {
    pub alpha: Complex64,
    pub branch: Branch,
}

impl BranchSelector {
    pub fn resolve(alpha: Complex64, z: Complex64, tau: &ModularPoint) -> Result<Self> {
        Ok(Self { alpha, branch: Self::classify(alpha * z, tau)? })
    }

    /// Classifies a value of `αz` directly.
    pub fn classify(alpha_z: Complex64, tau: &ModularPoint) -> Result<Branch> {
        let t = tau.tau();
        let y = alpha_z.im / t.im;
        let x = alpha_z.re - y * t.re;
        let (ly, lx) = (y.round(), x.round());
        let d = (y - ly).abs().max((x - lx).abs());
        if d <= TOL_LATTICE {
            Ok(Branch::Lattice { lambda: ly as i64, mu: lx as i64 })
        } else if d <= UNRESOLVED_BAND {
            Err(Error::BranchUnresolved(format!(
                "αz = {alpha_z} lies {d:.3e} from {ly}τ + {lx} in lattice coordinates"
            )))
        } else {
            Ok(Branch::Generic { alpha_z })
        }
    }
}

/// Serializable description of a Weierstrass-type family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionFamily {
    Plain,
    Twisted { lambda: i64 },
    Tilde { z: Complex64 },
    Deformed { theta: Complex64, lambda: f64 },
}

impl FunctionFamily {
    pub fn family(&self) -> Result<Family> {
        Ok(match *self {
            FunctionFamily::Plain => Family::Plain,
            FunctionFamily::Twisted { lambda } => Family::Twisted(lambda),
            FunctionFamily::Tilde { z } => Family::Tilde(z),
            FunctionFamily::Deformed { theta, lambda } => Family::Deformed(TwistPair::new(theta, lambda)?),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionFamily::Plain => "P",
            FunctionFamily::Twisted { .. } => "P_lambda",
            FunctionFamily::Tilde { .. } => "P_tilde",
            FunctionFamily::Deformed { .. } => "P_deformed",
        }
    }

    /// Name of the Laurent coefficients `c_k` at `w = 0`.
    pub fn laurent_name(&self) -> &'static str {
        match self {
            FunctionFamily::Plain => "E",
            FunctionFamily::Twisted { .. } => "E_lambda",
            FunctionFamily::Tilde { .. } => "E_tilde",
            FunctionFamily::Deformed { .. } => "E_deformed",
        }
    }

    /// `F_k(w)`, continued to `|q| < |e(w)| < |q|^{−1}`.
    pub fn eval(&self, k: usize, w: Complex64, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
        evaluate(&self.family()?, k, w, tau, tr)
    }

    /// `c_k` in `F_1(w) = 1/X − Σ_{k≥1} c_k X^{k−1}`, `X = 2πi w`.
    pub fn laurent(&self, k: usize, tau: &ModularPoint, tr: &Truncation) -> Result<Complex64> {
        if k == 0 {
            return Err(Error::InvalidParameter("Laurent index must be ≥ 1".into()));
        }
        match *self {
            FunctionFamily::Plain => {
                let half = if k == 1 { 0.5 } else { 0.0 };
                Ok(p1_twisted_laurent(k, 0, tau, tr) + half)
            }
            FunctionFamily::Twisted { lambda } => Ok(p1_twisted_laurent(k, lambda, tau, tr)),
            FunctionFamily::Tilde { z } => eisenstein_tilde(k, z, tau, tr),
            FunctionFamily::Deformed { theta, lambda } => {
                let fit = laurent_coeffs_p1(LaurentKind::Deformed(TwistPair::new(theta, lambda)?), tau, k, tr)?;
                Ok(-fit.coeffs[k - 1])
            }
        }
    }
}

/// A generator `g` resolved for reduction: its weight, charge, parity and the
/// coefficient family of its reduction formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedVertex {
    pub species: u8,
    pub weight: f64,
    pub alpha: f64,
    pub odd: bool,
    pub family: FunctionFamily,
    /// `λ` of the zero-mode term `o_λ(g)`, present on the lattice branch.
    pub zero_mode_lambda: Option<i64>,
}

impl ReducedVertex {
    /// The plain trace differs from the supertrace by `σ`, which moves an odd
    /// `g` around the trace with an extra `−1`, i.e. shifts `αz` by `1/2`.
    pub fn resolve(spec: &AlgebraSpec, species: u8, z: Complex64, tau: &ModularPoint, kind: TraceKind) -> Result<Self> {
        spec.check_species(species)?;
        let weight = spec.species_weight(species);
        let alpha = spec.species_charge(species);
        let odd = spec.is_fermionic();
        let (family, zero_mode_lambda) = Self::family_for(weight, alpha, odd, z, tau, kind)?;
        Ok(Self { species, weight, alpha, odd, family, zero_mode_lambda })
    }

    /// Coefficient family and zero-mode `λ` for a homogeneous `J(0)`
    /// eigenvector of the given weight, charge and parity.
    pub fn family_for(
        weight: f64,
        alpha: f64,
        odd: bool,
        z: Complex64,
        tau: &ModularPoint,
        kind: TraceKind,
    ) -> Result<(FunctionFamily, Option<i64>)> {
        let mut alpha_z = z * alpha;
        if odd && kind == TraceKind::Trace {
            alpha_z += 0.5;
        }
        let frac = weight - weight.floor();
        if frac.abs() > 1e-12 {
            let a = e(alpha_z);
            if (a.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::UnsupportedInsertion(format!(
                    "non-integer weight {weight} needs |e(αz)| = 1, got {}",
                    a.norm()
                )));
            }
            return Ok((FunctionFamily::Deformed { theta: a.inv(), lambda: frac }, None));
        }
        Ok(match BranchSelector::classify(alpha_z, tau)? {
            Branch::Lattice { lambda, .. } => (FunctionFamily::Twisted { lambda }, Some(lambda)),
            Branch::Generic { alpha_z } => (FunctionFamily::Tilde { z: alpha_z }, None),
        })
    }

    /// Round-mode index of `o_λ(g) = g(wt − 1 + λ)`.
    pub fn zero_mode_index(&self) -> Option<i64> {
        self.zero_mode_lambda.map(|l| self.weight.round() as i64 - 1 + l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau() -> ModularPoint {
        ModularPoint::new(Complex64::new(0.1, 0.5)).unwrap()
    }

    #[test]
    fn lattice_detection() {
        let t = tau().tau();
        let b = BranchSelector::classify(t * 2.0 - 1.0, &tau()).unwrap();
        assert_eq!(b, Branch::Lattice { lambda: 2, mu: -1 });
        let b = BranchSelector::classify(Complex64::new(0.0, 0.0), &tau()).unwrap();
        assert_eq!(b, Branch::Lattice { lambda: 0, mu: 0 });
        let near = t + 1e-8;
        assert!(matches!(BranchSelector::classify(near, &tau()), Err(Error::BranchUnresolved(_))));
        let far = Complex64::new(0.21, 0.13);
        assert!(matches!(BranchSelector::classify(far, &tau()), Ok(Branch::Generic { .. })));
    }

    #[test]
    fn heisenberg_is_always_lattice() {
        let spec = AlgebraSpec::heisenberg(1).unwrap();
        let z = Complex64::new(0.3, 0.2);
        let g = ReducedVertex::resolve(&spec, 0, z, &tau(), TraceKind::Trace).unwrap();
        assert_eq!(g.family, FunctionFamily::Twisted { lambda: 0 });
        assert_eq!(g.zero_mode_index(), Some(0));
    }

    #[test]
    fn real_fermion_has_no_zero_mode_term() {
        let spec = AlgebraSpec::real_fermion();
        let g = ReducedVertex::resolve(&spec, 0, Complex64::new(0.0, 0.0), &tau(), TraceKind::Supertrace).unwrap();
        assert!(g.zero_mode_lambda.is_none());
        assert!(matches!(g.family, FunctionFamily::Deformed { lambda, .. } if lambda == 0.5));
    }

    #[test]
    fn plain_laurent_includes_the_half() {
        let tr = Truncation::default();
        let a = FunctionFamily::Plain.laurent(1, &tau(), &tr).unwrap();
        let b = FunctionFamily::Twisted { lambda: 0 }.laurent(1, &tau(), &tr).unwrap();
        assert!((a - b - 0.5).norm() < 1e-15);
    }
}
