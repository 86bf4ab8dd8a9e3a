use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("orbit did not close within t = {max_time}")]
    NonClosingOrbit { max_time: f64 },
    #[error("energy drift {drift:e} exceeds tolerance {tolerance:e}")]
    ToleranceFailure { drift: f64, tolerance: f64 },
    #[error("level set at E = {energy} does not have figure-eight topology: {reason}")]
    Topology { energy: f64, reason: String },
    #[error("{name} = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{function} is not strictly monotone near lambda = {lambda}")]
    Monotonicity { function: &'static str, lambda: f64 },
    #[error("could not bracket the root of {function} = {target}")]
    RootBracket { function: &'static str, target: f64 },
    #[error("grid spacing {dx:e} exceeds the resolution bound {bound:e}")]
    Resolution { dx: f64, bound: f64 },
    #[error("V(+-L) = {value} does not exceed {required} at L = {half_width}")]
    Truncation {
        half_width: f64,
        value: f64,
        required: f64,
    },
    #[error("eigensolver failure: {0}")]
    SolverFailure(String),
    #[error("no eigenvalue in the spectral window")]
    EmptyWindow,
    #[error("profile error: {0}")]
    Profile(String),
    #[error("packet index {index} lies outside the window family {lo}..={hi}")]
    Support { index: i64, lo: i64, hi: i64 },
    #[error("time grid reaches {t_max} beyond the validity window {limit} = |ln h|^{exponent}")]
    TimeScale {
        t_max: f64,
        limit: f64,
        exponent: f64,
    },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("no peak above {threshold} in the series")]
    NoPeaks { threshold: f64 },
    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error("sequences have periods {left} and {right}")]
    PeriodMismatch { left: usize, right: usize },
}
