//! The N-level Friedrichs model: a set of discrete levels coupled
//! factorizably (`f_n g(ω)`) to one continuum.
//!
//! The crate computes
//!
//! * the kernels `Σ(E)`, `Δ(E)`, `Γ(E)`, `K(z)`, `I(z)` ([`spectral`]);
//! * bound states below/above the band and bound states in the continuum
//!   ([`bound_states`]);
//! * the exact survival probability of a discrete excitation ([`dynamics`]);
//! * the Markovian non-Hermitian limit, including exceptional points
//!   ([`markovian`]);
//! * a tight-binding waveguide realisation with closed forms ([`waveguide`])
//!   and a brute-force lattice integrator used to check the dynamics
//!   ([`lattice`]).
//!
//! All numerical code is generic over [`Real`]; `f64` aliases are exported
//! at the crate root. Units: `ħ = 1`, energies in an arbitrary base unit and
//! times in its inverse.

pub mod bound_states;
pub mod dynamics;
pub mod error;
pub mod lattice;
mod linalg;
pub mod markovian;
pub mod model;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod schema;
pub mod spectral;
pub mod waveguide;

pub use error::{Error, Result};
pub use model::{
    validate_model, AnalyticForms, ContinuumBand, CustomDensity, DiscreteSpectrum, EdgeBehavior,
    FriedrichsModel, InitialState, Site, SpectralDensity, ValidatedModel,
};
pub use scalar::{Cplx, Real};

pub type Model = ValidatedModel<f64>;
pub type Band = ContinuumBand<f64>;
pub type Density = SpectralDensity<f64>;
pub type State = InitialState<f64>;
pub type BoundState = bound_states::BoundState<f64>;
pub type BoundStateCensus = bound_states::BoundStateCensus<f64>;
pub type SurvivalSeries = dynamics::SurvivalSeries<f64>;
pub type DecayCoefficients = dynamics::DecayCoefficients<f64>;
pub type LongTimeLimit = dynamics::LongTimeLimit<f64>;
pub type EffectiveHamiltonianMarkov = markovian::EffectiveHamiltonianMarkov<f64>;
pub type ResonanceSystem = markovian::ResonanceSystem<f64>;
pub type WaveguideParams = waveguide::WaveguideParams<f64>;
pub type LatticeRun = lattice::LatticeRun<f64>;
pub type Complex64 = Cplx<f64>;
