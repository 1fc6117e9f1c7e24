//! JSON documents describing a model, for the command-line front end.
//!
//! ```json
//! {
//!   "levels": [-1.0, 1.0],
//!   "couplings": [0.3, [0.2, 0.1]],
//!   "band": { "low": -1.5, "up": 1.5 },
//!   "density": { "kind": "jacobi", "amplitude": 0.2, "s_low": 0.5, "s_up": 0.5 },
//!   "initial": [0.0, 1.0]
//! }
//! ```
//!
//! or `{ "waveguide": { "n_atoms": 3, "lambda": 1, "kappa": 0.75, "xi": 0.25, "site": "inf" } }`.
//! A band side set to `null` is unbounded. Unknown keys are rejected.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ContinuumBand, CustomDensity, DiscreteSpectrum, EdgeBehavior, FriedrichsModel, InitialState, Site,
    SpectralDensity, ValidatedModel,
};
use crate::scalar::Cplx;
use crate::waveguide::{build_waveguide_model, default_initial_state, site_initial_state, WaveguideParams};

/// A coupling given either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingDoc {
    Real(f64),
    Complex([f64; 2]),
}

impl CouplingDoc {
    fn value(self) -> Cplx<f64> {
        match self {
            Self::Real(x) => Cplx::new(x, 0.0),
            Self::Complex([re, im]) => Cplx::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandDoc {
    pub low: Option<f64>,
    pub up: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityDoc {
    Jacobi {
        amplitude: f64,
        s_low: f64,
        s_up: f64,
        #[serde(default)]
        zeros: Vec<f64>,
    },
    Waveguide {
        kappa: f64,
        site: SiteDoc,
    },
    Ohmic {
        amplitude: f64,
        exponent: f64,
        cutoff: f64,
    },
    Flat {
        value: f64,
    },
    /// Piecewise-linear `J` through the given samples. An edge exponent of
    /// `null` marks a non-vanishing edge.
    Tabulated {
        omega: Vec<f64>,
        values: Vec<f64>,
        s_low: Option<f64>,
        s_up: Option<f64>,
        #[serde(default)]
        zeros: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteDoc {
    Index(u32),
    Name(String),
}

impl SiteDoc {
    pub fn site(&self) -> Result<Site> {
        match self {
            Self::Index(0) => Err(Error::InvalidParameter {
                name: "site",
                reason: "sites are numbered from 1".into(),
            }),
            Self::Index(l) => Ok(Site::Finite(*l)),
            Self::Name(s) => s.parse(),
        }
    }
}

impl From<Site> for SiteDoc {
    fn from(site: Site) -> Self {
        match site {
            Site::Finite(l) => Self::Index(l),
            Site::Infinite => Self::Name("inf".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericModelDoc {
    pub levels: Vec<f64>,
    pub couplings: Vec<CouplingDoc>,
    pub band: BandDoc,
    pub density: DensityDoc,
    #[serde(default)]
    pub initial: Option<Vec<CouplingDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideDoc {
    pub n_atoms: usize,
    pub lambda: f64,
    pub kappa: f64,
    pub xi: f64,
    pub site: SiteDoc,
    /// Chain site holding the excitation at `t = 0`; defaults to the open end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_site: Option<usize>,
}

impl WaveguideDoc {
    pub fn params(&self) -> Result<WaveguideParams<f64>> {
        WaveguideParams::new(self.n_atoms, self.lambda, self.kappa, self.xi, self.site.site()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelDoc {
    Waveguide(WaveguideModelDoc),
    Generic(GenericModelDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideModelDoc {
    pub waveguide: WaveguideDoc,
}

fn tabulated(omega: Vec<f64>, values: Vec<f64>) -> Result<impl Fn(f64) -> f64 + Send + Sync> {
    if omega.len() != values.len() || omega.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "density.omega",
            reason: "need at least two samples and one value per sample".into(),
        });
    }
    if omega.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "density.omega",
            reason: "sample energies must increase strictly".into(),
        });
    }
    Ok(move |w: f64| {
        let i = omega.partition_point(|x| *x <= w);
        if i == 0 || i == omega.len() {
            return if w == omega[omega.len() - 1] { values[values.len() - 1] } else { 0.0 };
        }
        let t = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
        values[i - 1] + t * (values[i] - values[i - 1])
    })
}

fn edge(s: Option<f64>, bounded: bool) -> EdgeBehavior<f64> {
    match (bounded, s) {
        (false, _) => EdgeBehavior::Unbounded,
        (true, Some(s)) if s > 0.0 => EdgeBehavior::PowerLaw(s),
        _ => EdgeBehavior::Divergent,
    }
}

impl GenericModelDoc {
    pub fn model(&self) -> Result<ValidatedModel<f64>> {
        if self.levels.len() != self.couplings.len() {
            return Err(Error::LengthMismatch {
                levels: self.levels.len(),
                couplings: self.couplings.len(),
            });
        }
        let low = self.band.low.unwrap_or(f64::NEG_INFINITY);
        let up = self.band.up.unwrap_or(f64::INFINITY);
        let density = match self.density.clone() {
            DensityDoc::Jacobi {
                amplitude,
                s_low,
                s_up,
                zeros,
            } => SpectralDensity::Jacobi {
                amplitude,
                s_low,
                s_up,
                zeros,
            },
            DensityDoc::Waveguide { kappa, site } => SpectralDensity::Waveguide {
                kappa,
                site: site.site()?,
            },
            DensityDoc::Ohmic {
                amplitude,
                exponent,
                cutoff,
            } => SpectralDensity::Ohmic {
                amplitude,
                exponent,
                cutoff,
            },
            DensityDoc::Flat { value } => SpectralDensity::Flat { value },
            DensityDoc::Tabulated {
                omega,
                values,
                s_low,
                s_up,
                zeros,
            } => SpectralDensity::Custom(CustomDensity {
                func: Arc::new(tabulated(omega, values)?),
                edges: (edge(s_low, low.is_finite()), edge(s_up, up.is_finite())),
                interior_zeros: zeros,
            }),
        };
        let couplings = self.couplings.iter().map(|c| c.value()).collect();
        FriedrichsModel::new(
            DiscreteSpectrum::new(self.levels.clone(), couplings),
            ContinuumBand::new(low, up, density),
        )
        .validate()
    }

    pub fn initial_state(&self) -> Result<InitialState<f64>> {
        match &self.initial {
            Some(c) => InitialState::new(c.iter().map(|x| x.value()).collect()),
            None => Err(Error::InvalidParameter {
                name: "initial",
                reason: "no initial state given".into(),
            }),
        }
    }
}

impl ModelDoc {
    pub fn model(&self) -> Result<ValidatedModel<f64>> {
        match self {
            Self::Waveguide(w) => build_waveguide_model(&w.waveguide.params()?),
            Self::Generic(doc) => doc.model(),
        }
    }

    pub fn initial_state(&self) -> Result<InitialState<f64>> {
        match self {
            Self::Waveguide(w) => {
                let p = w.waveguide.params()?;
                match w.waveguide.initial_site {
                    Some(mu) => site_initial_state(&p, mu),
                    None => default_initial_state(&p),
                }
            }
            Self::Generic(doc) => doc.initial_state(),
        }
    }
}
