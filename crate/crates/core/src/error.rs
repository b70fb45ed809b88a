use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spinor has no nonzero component")]
    ZeroSpinor,
    #[error("rank {0} outside the supported range 2..=8")]
    BadRank(usize),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("bad multi-index key {0:?}")]
    BadKey(String),
    #[error("spinor is not pure (isotropy residual {residual:.3e}, rank {rank})")]
    NotPure { residual: f64, rank: usize },
    #[error("matrix is not skew-symmetric (residual {0:.3e})")]
    NotSkew(f64),
    #[error("matrix is not an orthogonal complex structure: {0}")]
    NotOcs(String),
    #[error("point lies in the fiber at infinity")]
    FiberAtInfinity,
    #[error("twistor point is off the purity locus (residual {0:.3e})")]
    Inconsistent(f64),
    #[error("xi_0 vanishes at the evaluation point")]
    NormalizationFailure,
    #[error("matrix is not in SU(4): {0}")]
    NotSpecialUnitary(String),
    #[error("D M D^T left the Clifford pattern")]
    PatternViolation,
    #[error("scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("lift produced an off-quadric point (residual {0:.3e})")]
    OffQuadricOutput(f64),
    #[error("Moebius map has a pole at the requested point")]
    PoleOfMobius,
    #[error("both polynomials are zero")]
    BothZero,
    #[error("polynomials share a root (relative resultant {0:.3e})")]
    CommonRoot(f64),
    #[error("recipe components vanish together near {0}")]
    CommonZeroDetected(String),
    #[error("point within {0:.1e} of a lattice point")]
    PoleProximity(f64),
    #[error("invalid lattice: {0}")]
    BadLattice(String),
    #[error("refinement changed the estimate by {0:.1}%")]
    ResolutionTooCoarse(f64),
    #[error("{bad} of {total} hyperplane draws were degenerate")]
    DegenerateDraws { bad: usize, total: usize },
    #[error("rank-4 purity relation fails (residual {0:.3e})")]
    QuadricViolation(f64),
    #[error("operation needs a rational map")]
    NotRational,
    #[error("operation needs an elliptic map")]
    NotElliptic,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
