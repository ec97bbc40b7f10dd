use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: dynamics acts on T^{expected}, phase has {found} coordinates")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dynamics: {0}")]
    InvalidDynamics(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("potential has imaginary residue {residue:e} on the real torus")]
    ImaginaryResidue { residue: f64 },

    #[error("strip coordinate |y| = {y} exceeds the half-width {rho0}")]
    OutsideStrip { y: f64, rho0: f64 },

    #[error("non-finite matrix entries in transfer product")]
    NumericOverflow,

    #[error("energy is an eigenvalue of the truncated operator (singular determinant)")]
    SingularEnergy,

    #[error("operation requires shift dynamics on the circle, got {0}")]
    UnsupportedDynamics(&'static str),

    #[error("eigenvalue near {energy} is not isolated (gap below {gap:e})")]
    AmbiguousEigenvalue { energy: f64, gap: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("analytic function vanishes at the disk center")]
    CenterIsZero,

    #[error("zero too close to the circle of radius {radius}; retry with radius {suggested_radius}")]
    NearCircleZero { radius: f64, suggested_radius: f64 },

    #[error("argument-principle winding number {winding} is not near an integer; refine the quadrature")]
    WindingUnstable { winding: f64 },

    #[error("non-finite sample of the integrand at {0}")]
    NonFiniteSample(String),
}
