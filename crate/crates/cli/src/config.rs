//! Run configuration: command-line flags layered over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use friedrichs::schema::{ModelDoc, SiteDoc, WaveguideDoc, WaveguideModelDoc};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Contents of `--config <path>`. Every field is optional; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelDoc>,
    pub out: Option<PathBuf>,
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub gamma: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Target error on each level amplitude in the scattering integral.
    pub amplitude: Option<f64>,
    pub max_panels: Option<usize>,
    /// Lattice norm drift that aborts a run.
    pub norm_drift: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

pub fn read_model(path: &Path) -> Result<ModelDoc, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Waveguide flags shared by several subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct WaveguideFlags {
    /// Number of atoms in the chain.
    #[arg(long)]
    pub n_atoms: Option<usize>,
    /// Intra-chain hopping λ (energy unit).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Waveguide hopping κ.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Chain-waveguide coupling ξ.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Attachment site: an integer ≥ 1 or "inf".
    #[arg(long)]
    pub site: Option<String>,
}

impl WaveguideFlags {
    pub fn any(&self) -> bool {
        self.n_atoms.is_some() || self.lambda.is_some() || self.kappa.is_some() || self.xi.is_some() || self.site.is_some()
    }

    /// Fills unset flags from `base`; all of N, κ and ξ must end up set.
    pub fn resolve(&self, base: Option<&WaveguideDoc>) -> Result<WaveguideDoc, CliError> {
        let need = |v: Option<f64>, b: Option<f64>, name: &str| {
            v.or(b).ok_or_else(|| CliError::config(format!("--{name} is required for a waveguide model")))
        };
        let site = match (&self.site, base) {
            (Some(s), _) => SiteDoc::from(s.parse::<friedrichs::Site>()?),
            (None, Some(b)) => b.site.clone(),
            (None, None) => SiteDoc::Name("inf".into()),
        };
        Ok(WaveguideDoc {
            n_atoms: self
                .n_atoms
                .or(base.map(|b| b.n_atoms))
                .ok_or_else(|| CliError::config("--n-atoms is required for a waveguide model"))?,
            lambda: self.lambda.or(base.map(|b| b.lambda)).unwrap_or(1.0),
            kappa: need(self.kappa, base.map(|b| b.kappa), "kappa")?,
            xi: need(self.xi, base.map(|b| b.xi), "xi")?,
            site,
            initial_site: base.and_then(|b| b.initial_site),
        })
    }
}

/// Model selection: `--model <file>`, waveguide flags, or the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ModelFlags {
    /// Model document (JSON); see the README for the schema.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub waveguide: WaveguideFlags,
}

impl ModelFlags {
    pub fn resolve(&self, config: &RunConfig) -> Result<ModelDoc, CliError> {
        if let Some(path) = &self.model {
            if self.waveguide.any() {
                return Err(CliError::config("--model cannot be combined with waveguide flags"));
            }
            return read_model(path);
        }
        let base = match &config.model {
            Some(ModelDoc::Waveguide(w)) => Some(&w.waveguide),
            Some(doc @ ModelDoc::Generic(_)) if !self.waveguide.any() => return Ok(doc.clone()),
            Some(ModelDoc::Generic(_)) => {
                return Err(CliError::config("waveguide flags given but the config holds a generic model"))
            }
            None => None,
        };
        if base.is_none() && !self.waveguide.any() {
            return Err(CliError::config(
                "no model: pass --model, waveguide flags, or a config file with a model",
            ));
        }
        Ok(ModelDoc::Waveguide(WaveguideModelDoc {
            waveguide: self.waveguide.resolve(base)?,
        }))
    }
}
