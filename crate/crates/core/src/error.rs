use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid photon cutoff {n_max}: need at least {min}")]
    InvalidCutoff { n_max: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integration failed: trace drift {drift:.3e} (step {step:.3e}); try a smaller step")]
    IntegrationFailure { drift: f64, step: f64 },

    #[error("steady state not converged: residual {residual:.3e}")]
    SteadyStateFailure { residual: f64 },

    #[error("state is not stationary: residual {residual:.3e}")]
    NotStationary { residual: f64 },

    #[error("no two-photon signal: Tr G2 = {trace:.3e}")]
    DegenerateSignal { trace: f64 },

    #[error("concurrence matrix has complex eigenvalue (imaginary part {imag:.3e})")]
    NumericalDegeneracy { imag: f64 },

    #[error("Schrieffer-Wolff denominator vanishes for state {state} (gap {gap:.3e})")]
    SwDegeneracy { state: String, gap: f64 },

    #[error("unknown resonance `{0}`")]
    UnknownResonance(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl Error {
    /// Short identifier of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidCutoff { .. } => "invalid_cutoff",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParams(_) => "invalid_params",
            Error::InvalidState(_) => "invalid_state",
            Error::IntegrationFailure { .. } => "integration_failure",
            Error::SteadyStateFailure { .. } => "steady_state_failure",
            Error::NotStationary { .. } => "not_stationary",
            Error::DegenerateSignal { .. } => "degenerate_signal",
            Error::NumericalDegeneracy { .. } => "numerical_degeneracy",
            Error::SwDegeneracy { .. } => "sw_degeneracy",
            Error::UnknownResonance(_) => "unknown_resonance",
            Error::Linalg(_) => "linalg",
        }
    }
}
