use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid matrix dimensions: {0}")]
    Dimension(String),

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is singular to working precision (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error("matrix is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid reservoir: {0}")]
    InvalidReservoir(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("occupation 1/2 corresponds to infinite temperature")]
    InfiniteTemperature,

    #[error("insulated-limit formula out of regime (denominator {denominator})")]
    OutOfRegime { denominator: f64 },

    #[error(
        "steady state is not unique (constrained pivot {pivot:e}); \
         the null space of the Liouvillian has dimension > 1"
    )]
    MultipleSteadyStates { pivot: f64 },

    #[error("steady-state solver failure: {0}")]
    SolverFailure(String),

    #[error("trace drift {drift:e} exceeds tolerance; reduce the step size")]
    StepSize { drift: f64 },

    #[error("propagation became unstable (non-finite state at t = {time})")]
    Instability { time: f64 },

    #[error("no plateau within grid (last two samples {previous} and {last})")]
    NonConvergence { previous: f64, last: f64 },

    #[error("threshold not bracketed on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("calibration failed: best max relative error {best_error} at g = {best_g}")]
    CalibrationFailure { best_g: f64, best_error: f64 },
}

impl Error {
    /// True for errors caused by the inputs rather than by a numerical method.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidReservoir(_) | Error::InvalidConfig(_) | Error::InvalidArgument(_))
    }

    pub fn is_convergence_error(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Bracket { .. } | Error::CalibrationFailure { .. })
    }
}
