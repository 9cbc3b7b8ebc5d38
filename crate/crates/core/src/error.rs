use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{ell} is a perfect square, Pell's equation has no nontrivial solution")]
    PerfectSquare { ell: u64 },

    #[error("{ell} is not squarefree")]
    NotSquarefree { ell: u64 },

    #[error("n = {n} is not admissible: n² + n + 1 = {value} is not 7 times a perfect square")]
    NotAdmissible { n: String, value: String },

    #[error("x-frequency must be nonzero (got m1 = {m1}, m2 = {m2})")]
    ZeroFrequency { m1: String, m2: String },

    #[error("closed-form and symbol-difference routes disagree: {closed} != {difference}")]
    RouteMismatch { closed: String, difference: String },

    #[error("phase additivity fails: ω(n+1, α) = {lhs} but ω(1,0) + ω(n, α) = {rhs}")]
    PhaseMismatch { lhs: String, rhs: String },

    #[error("field leaves D₀′: m = 0 energy fraction {fraction:e} exceeds {tolerance:e}")]
    ConstraintViolation { fraction: f64, tolerance: f64 },

    #[error("Hermitian symmetry broken by {defect:e}")]
    HermitianViolation { defect: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("mode (m = {m}, k = {k}) lies outside the retained region of a {nx}x{ny} grid")]
    ModeOutsideGrid { m: i64, k: i64, nx: usize, ny: usize },

    #[error("instability at t = {t}: {quantity} grew by a factor {factor:.3e}")]
    Instability { t: f64, quantity: &'static str, factor: f64 },

    #[error("{quantity} drifted by {drift:e} (relative) at t = {t}, tolerance {tolerance:e}")]
    ConservationDrift {
        t: f64,
        quantity: &'static str,
        drift: f64,
        tolerance: f64,
    },

    #[error("time {t} is not a sampled time of the trajectory")]
    TimeNotSampled { t: f64 },

    #[error("phase budget exceeded: |ω| t = {phase:e} loses double-precision accuracy")]
    PhaseBudget { phase: f64 },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical process itself, as opposed to bad
    /// input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RouteMismatch { .. }
                | Error::PhaseMismatch { .. }
                | Error::ConstraintViolation { .. }
                | Error::HermitianViolation { .. }
                | Error::Instability { .. }
                | Error::ConservationDrift { .. }
        )
    }
}
