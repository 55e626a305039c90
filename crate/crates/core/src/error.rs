use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval endpoint is not finite: ({start}, {end})")]
    NonFiniteEndpoint { start: f64, end: f64 },
    #[error("interval ({start}, {end}) has coinciding endpoints on the torus")]
    DegenerateInterval { start: f64, end: f64 },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(&'static str),
    #[error("invalid Cantor parameters q={q}, a={a}: {reason}")]
    InvalidCantor { q: f64, a: f64, reason: &'static str },
    #[error("hole of generation {generation} (length {hole}) does not fit in parent interval of length {parent}")]
    HoleTooLarge { generation: u32, hole: f64, parent: f64 },
    #[error("Cantor depth policy needs more than {cap} generations")]
    DepthCapExceeded { cap: u32 },
    #[error("relative truncation error must lie in (0, 1], got {0}")]
    InvalidTruncationError(f64),
    #[error("invalid dispersion samples: {0}")]
    InvalidDispersion(&'static str),
    #[error("filling {0} outside [0, 1]")]
    FillingOutOfRange(f64),
    #[error("flat dispersion plateau at energy {energy}: filling jumps from {below} to {above}")]
    FermiPlateau { energy: f64, below: f64, above: f64 },
    #[error("argument {0} outside [0, 1] beyond clip tolerance")]
    DomainViolation(f64),
    #[error("restriction size must be at least 1")]
    EmptyRestriction,
    #[error("eigenvalue {value} of a {dim}x{dim} restriction lies outside [0, 1]")]
    SpectrumOutOfRange { value: f64, dim: usize },
    #[error("eigensolver did not converge for a {dim}x{dim} matrix (max |offdiag| = {residual:e})")]
    NoConvergence { dim: usize, residual: f64 },
    #[error("coefficients known up to index {available}, need {needed}")]
    CoefficientsTooShort { available: usize, needed: usize },
    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },
    #[error("fit window [{n_min}, {n_max}] holds {count} usable points, need at least 4")]
    DegenerateWindow { n_min: usize, n_max: usize, count: usize },
    #[error("record N={n} has non-positive value {value} for a power-law fit")]
    NonPositiveValue { n: usize, value: f64 },
    #[error("record N={n} has no entropy value")]
    MissingEntropy { n: usize },
    #[error("N grid must be strictly increasing and positive")]
    InvalidGrid,
    #[error("N={n} exceeds the eigensolve cap {cap}")]
    EigenCapExceeded { n: usize, cap: usize },
    #[error("sets overlap on measure {overlap:e}")]
    NotDisjoint { overlap: f64 },
    #[error("fermion word of length {len} exceeds the limit {max}")]
    WordTooLong { len: usize, max: usize },
    #[error("site {site} outside window of {n} sites")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("oracle size n={n} exceeds the limit {max}")]
    OracleTooLarge { n: usize, max: usize },
}
