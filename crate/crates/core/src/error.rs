use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Hilbert-space dimensions: {0}")]
    InvalidDims(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pump at or above threshold: omega_p = {omega_p} >= delta_c = {delta_c}")]
    AtThreshold { delta_c: f64, omega_p: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wrong frame: {0}")]
    WrongFrame(String),

    #[error("Fock truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("Hamiltonian assembly produced a non-Hermitian matrix (defect {0:e})")]
    NonHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepSizeFailure { t: f64, h: f64 },

    #[error("positivity violated at t = {t}: minimum eigenvalue {min_eigenvalue:e}")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },

    #[error("trace drift {drift:e} at t = {t} exceeds tolerance")]
    TraceDrift { t: f64, drift: f64 },

    #[error("steady state is not unique: spectral gap estimate {gap:e}")]
    DegenerateNullSpace { gap: f64 },

    #[error("steady-state solve did not converge: residual {residual:e}")]
    NonConvergence { residual: f64 },

    #[error("system too large for this method: dimension {dim} exceeds {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("linear solver failure: {0}")]
    Solver(String),
}
