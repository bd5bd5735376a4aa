use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the convergence annulus |q| < |q_w| < 1: {0}")]
    DomainViolation(String),
    #[error("denominator vanishes within tolerance: {0}")]
    PoleHit(String),
    #[error("Ẽ_1(z, τ) has a pole at q_z = 1")]
    PoleAtTrivialZ,
    #[error("Laurent fit is ill-conditioned: {0}")]
    FitIllConditioned(String),
    #[error("level cap exceeds the configured budget: {0}")]
    CapTooLarge(String),
    #[error("operator image leaves the truncated module: {0}")]
    TruncationLoss(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("αz lies within the lattice band but (λ, μ) are not integral: {0}")]
    BranchUnresolved(String),
    #[error("unsupported insertion: {0}")]
    UnsupportedInsertion(String),
    #[error("degenerate insertion at stage {stage}: {detail}")]
    DegenerateInsertion { stage: usize, detail: String },
    #[error("coboundary admissibility violated: {0}")]
    AdmissibilityViolation(String),
    #[error("insertion weight is not an integer: {0}")]
    NonIntegerWeight(String),
    #[error("αz is not on the lattice Zτ + Z: {0}")]
    NotOnLattice(String),
    #[error("sample grid is degenerate: {0}")]
    GridDegenerate(String),
    #[error("request parse error: {0}")]
    Parse(String),
}
