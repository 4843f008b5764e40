use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    // profile
    #[error("no periodic orbit: {0}")]
    NoPeriodicOrbit(String),
    #[error("degenerate orbit: turning points {u_minus} and {u_plus} are not resolvable")]
    DegenerateOrbit { u_minus: f64, u_plus: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("finite-difference stencil crosses the separatrix or well bottom in {param}: {detail}")]
    NearSeparatrix { param: &'static str, detail: String },
    #[error("integrator failure: {0}")]
    IntegratorFailure(String),
    #[error("orbit failed to close: |u(T) - u_-| = {mismatch:e}")]
    ClosureFailure { mismatch: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),

    // monodromy
    #[error("determinant drift {residual:e} exceeds bound {bound:e} at mu = {mu}")]
    DetDrift { residual: f64, bound: f64, mu: String },
    #[error("genericity violation: {0}")]
    GenericityViolation(String),

    // indices
    #[error("cross-check failure: {quantity} relative mismatch {relative:e}")]
    CrossCheckFailure { quantity: &'static str, relative: f64 },
    #[error("nonlinearity is not a power law")]
    NotPowerLaw,
    #[error("solitary-limit path left the admissible region at t = {t}: {detail}")]
    PathLeavesAdmissibleRegion { t: f64, detail: String },

    // spectrum
    #[error("degenerate normal-form cubic: tr M_uuu(0) = {0:e}")]
    DegenerateCubic(f64),
    #[error("Newton divergence on branch {branch}; last good kappa = {last_good_kappa}")]
    NewtonDivergence { branch: usize, last_good_kappa: f64 },
    #[error("branches {0} and {1} collide near kappa = {2}")]
    BranchCollision(usize, usize, f64),
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("real-axis scan too short: D(mu,1) never reached its asymptotic sign up to mu = {0}")]
    ScanTooShort(f64),
    #[error("Hill truncation not converged: origin cluster moved by {0:e}")]
    TruncationNotConverged(f64),

    // shared
    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name, used in reports and the C interface.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NoPeriodicOrbit(_) => "NoPeriodicOrbit",
            Error::DegenerateOrbit { .. } => "DegenerateOrbit",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::NearSeparatrix { .. } => "NearSeparatrix",
            Error::IntegratorFailure(_) => "IntegratorFailure",
            Error::ClosureFailure { .. } => "ClosureFailure",
            Error::NotApplicable(_) => "NotApplicable",
            Error::DetDrift { .. } => "DetDrift",
            Error::GenericityViolation(_) => "GenericityViolation",
            Error::CrossCheckFailure { .. } => "CrossCheckFailure",
            Error::NotPowerLaw => "NotPowerLaw",
            Error::PathLeavesAdmissibleRegion { .. } => "PathLeavesAdmissibleRegion",
            Error::DegenerateCubic(_) => "DegenerateCubic",
            Error::NewtonDivergence { .. } => "NewtonDivergence",
            Error::BranchCollision(..) => "BranchCollision",
            Error::ParityViolation(_) => "ParityViolation",
            Error::ScanTooShort(_) => "ScanTooShort",
            Error::TruncationNotConverged(_) => "TruncationNotConverged",
            Error::RootNotBracketed { .. } => "RootNotBracketed",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
