use thiserror::Error;

/// Everything that can go wrong while building or evaluating a model.
///
/// Numerical payloads are reported as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("discrete levels {index} and {next} coincide (ε = {value})")]
    DegenerateLevels { index: usize, next: usize, value: f64 },
    #[error("levels must be sorted in increasing order (level {index} = {value})")]
    UnsortedLevels { index: usize, value: f64 },
    #[error("{levels} levels but {couplings} couplings")]
    LengthMismatch { levels: usize, couplings: usize },
    #[error("model needs at least one discrete level")]
    NoLevels,
    #[error("spectral density is negative at ω = {omega} (J = {value})")]
    NegativeSpectralDensity { omega: f64, value: f64 },
    #[error("empty continuum band [{low}, {up}]")]
    EmptyBand { low: f64, up: f64 },
    #[error("initial state has squared norm {norm}, expected 1")]
    UnnormalizedInitialState { norm: f64 },
    #[error("initial state has {got} amplitudes, model has {expected} levels")]
    InitialStateLength { got: usize, expected: usize },
    #[error("energy {energy} lies strictly inside the band and is not a zero of J")]
    EInsideBand { energy: f64 },
    #[error("energy {energy} is not inside the band")]
    EOutsideBand { energy: f64 },
    #[error("self-energy diverges at band edge {energy}")]
    NonconvergentEdge { energy: f64 },
    #[error("Σ'(E) diverges at E = {energy}")]
    DivergentDerivative { energy: f64 },
    #[error("argument {energy} hits the pole ε_{index}")]
    PoleHit { energy: f64, index: usize },
    #[error("quadrature did not converge (estimate {estimate:e}, target {target:e})")]
    QuadratureFailure { estimate: f64, target: f64 },
    #[error("quadrature budget exceeded at t = {time} (error estimate {estimate:e})")]
    QuadratureBudgetExceeded { time: f64, estimate: f64 },
    #[error("could not certify band-edge comparison at {edge}: {detail}")]
    EdgeEvaluationFailure { edge: f64, detail: String },
    #[error("root not found: {trace}")]
    RootNotFound { trace: String },
    #[error("bound state at E = {energy} has non-positive |B|² = {value}")]
    NormalizationFailure { energy: f64, value: f64 },
    #[error("Σ(E) vanishes at extra-continuum root E = {energy}")]
    VanishingSelfEnergy { energy: f64 },
    #[error("negative decay width Γ = {gamma}")]
    NegativeGamma { gamma: f64 },
    #[error("t_max = {t_max} needs {needed} waveguide sites, limit is {limit}")]
    LightConeViolation { t_max: f64, needed: usize, limit: usize },
    #[error("norm drifted by {drift:e} at t = {time}")]
    NormDrift { time: f64, drift: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
