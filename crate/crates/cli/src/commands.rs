use std::path::PathBuf;

use clap::Args;
use friedrichs::bound_states::{count_bound_states, solve_bound_states, BandSide, BoundStateKind};
use friedrichs::dynamics::{decay_coefficients, long_time_limit, survival_with, DynamicsOptions};
use friedrichs::lattice::{evolve_with, LatticeOptions};
use friedrichs::markovian::{
    anti_pt_check, build_markovian, build_markovian_at, markovian_survival, markovian_survival_expm,
    resonance_decomposition, waveguide_markovian, EffectiveHamiltonianMarkov, PtPhase, ResonanceKind,
};
use friedrichs::schema::{ModelDoc, WaveguideModelDoc};
use friedrichs::spectral::{delta_gamma, k_derivative_real, k_real, self_energy};
use friedrichs::waveguide::waveguide_bound_state_count;
use friedrichs::{BoundState, BoundStateCensus, Complex64, InitialState, Model};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ModelFlags, RunConfig, WaveguideFlags};
use crate::error::CliError;
use crate::output::{Artifacts, Table};

pub const DEFAULT_T_MAX: f64 = 50.0;
pub const DEFAULT_POINTS: usize = 400;

/// `points` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![a],
        n => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn provenance(command: &str, doc: &ModelDoc) -> String {
    format!(
        "friedrichs {} {command} model={}",
        env!("CARGO_PKG_VERSION"),
        serde_json::to_string(doc).expect("model documents serialize")
    )
}

fn cplx_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn side_name(side: BandSide) -> &'static str {
    match side {
        BandSide::Below => "below",
        BandSide::Above => "above",
    }
}

pub fn census_json(c: &BoundStateCensus) -> Value {
    json!({
        "n_low": c.n_low,
        "n_up": c.n_up,
        "m_below": c.m_below,
        "m_above": c.m_above,
        "m_bic": c.m_bic,
        "total": c.total(),
        "criteria_trace": c.criteria_trace.iter().map(|r| json!({
            "side": side_name(r.side),
            "edge": r.edge,
            "k_zero": r.k_zero,
            "energy_criterion": r.energy_criterion,
            "k_edge": r.k_edge,
            "inverse_sigma_edge": r.inverse_sigma_edge,
            "amplitude_criterion": r.amplitude_criterion,
            "tie": r.tie,
        })).collect::<Vec<_>>(),
    })
}

fn state_json(s: &BoundState) -> Value {
    let kind = match s.kind {
        BoundStateKind::BelowBand => "below_band",
        BoundStateKind::AboveBand => "above_band",
        BoundStateKind::InContinuum => "in_continuum",
    };
    json!({
        "energy": s.energy,
        "kind": kind,
        "amplitudes": s.discrete_amplitudes.iter().map(|a| cplx_json(*a)).collect::<Vec<_>>(),
        "discrete_weight": s.discrete_weight(),
        "normalization": s.normalization,
        "continuum_prefactor": cplx_json(s.continuum.prefactor),
        "continuum_norm": s.continuum.norm,
        "residual": s.residual,
    })
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Lowest energy of the grid (default: half a band width below the band).
    #[arg(long)]
    pub e_min: Option<f64>,
    /// Highest energy of the grid.
    #[arg(long)]
    pub e_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

/// Energy range around the band and the levels.
fn default_range(model: &Model) -> (f64, f64) {
    let band = model.band();
    let levels = model.levels();
    let lo_level = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_level = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, up) = (band.omega_low, band.omega_up);
    let pad = if band.is_finite() { (up - lo) / 2.0 } else { 1.0 };
    let a = if lo.is_finite() { lo.min(lo_level) - pad } else { lo_level - 10.0 * pad };
    let b = if up.is_finite() { up.max(hi_level) + pad } else { hi_level + 10.0 * pad };
    (a, b)
}

pub fn spectrum(args: &SpectrumArgs, config: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let doc = args.model.resolve(config)?;
    let model = doc.model()?;
    let (a, b) = default_range(&model);
    let e_min = args.e_min.or(config.e_min).unwrap_or(a);
    let e_max = args.e_max.or(config.e_max).unwrap_or(b);
    if !(e_max > e_min) {
        return Err(CliError::config("--e-max must exceed --e-min"));
    }
    let points = args.points.or(config.points).unwrap_or(DEFAULT_POINTS);
    let rows: Vec<Vec<f64>> = linspace(e_min, e_max, points)
        .par_iter()
        .map(|&e| {
            let band = model.band();
            let inside = e > band.omega_low && e < band.omega_up;
            let (sigma, gamma) = if inside {
                delta_gamma(&model, e).unwrap_or((f64::NAN, f64::NAN))
            } else {
                (self_energy(&model, e).unwrap_or(f64::NAN), 0.0)
            };
            let k = k_real(&model, e).unwrap_or(f64::NAN);
            let kp = k_derivative_real(&model, e).unwrap_or(f64::NAN);
            vec![e, sigma, gamma, k, kp]
        })
        .collect();
    let mut table = Table::new(&["E", "Sigma_or_Delta", "Gamma", "K", "Kprime"])
        .meta(provenance("spectrum", &doc))
        .meta("Sigma_or_Delta is Sigma(E) outside the band and Delta(E) inside; nan marks poles and divergent edges");
    for r in rows {
        table.push(r);
    }
    out.table("spectrum.csv", &table);
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct BoundStatesArgs {
    #[command(flatten)]
    pub model: ModelFlags,
}

pub fn bound_states(args: &BoundStatesArgs, config: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let doc = args.model.resolve(config)?;
    let model = doc.model()?;
    let census = count_bound_states(&model)?;
    let states = solve_bound_states(&model)?;
    let mut value = json!({
        "provenance": provenance("bound-states", &doc),
        "model": doc,
        "census": census_json(&census),
        "states": states.iter().map(state_json).collect::<Vec<_>>(),
    });
    if let ModelDoc::Waveguide(w) = &doc {
        let special = waveguide_bound_state_count(&w.waveguide.params()?)?;
        value["waveguide_census"] = census_json(&special);
    }
    println!(
        "{} bound states: {} below, {} above, {} in the continuum",
        census.total(),
        census.m_below,
        census.m_above,
        census.m_bic
    );
    out.json("bound_states.json", &value);
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Final time.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of output times on [0, t_max].
    #[arg(long)]
    pub points: Option<usize>,
    /// Start on level n (1-based) instead of the model's initial state.
    #[arg(long)]
    pub initial_level: Option<usize>,
}

fn initial_state(doc: &ModelDoc, model: &Model, level: Option<usize>) -> Result<InitialState<f64>, CliError> {
    match level {
        Some(n) if n >= 1 && n <= model.n_levels() => Ok(InitialState::level(n - 1, model.n_levels())),
        Some(n) => Err(CliError::config(format!(
            "--initial-level {n} outside 1..={}",
            model.n_levels()
        ))),
        None => Ok(doc.initial_state()?),
    }
}

pub fn dynamics(args: &DynamicsArgs, config: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let doc = args.model.resolve(config)?;
    let model = doc.model()?;
    let initial = initial_state(&doc, &model, args.initial_level)?;
    let t_max = args.t_max.or(config.t_max).unwrap_or(DEFAULT_T_MAX);
    let points = args.points.or(config.points).unwrap_or(DEFAULT_POINTS);
    let times = linspace(0.0, t_max, points);
    let mut opts = DynamicsOptions::default();
    if let Some(tol) = config.tolerances.amplitude {
        opts.amplitude_tol = tol;
    }
    if let Some(max) = config.tolerances.max_panels {
        opts.max_panels = max;
    }
    let states = solve_bound_states(&model)?;
    let coeffs = decay_coefficients(&model, &initial, &states)?;
    let series = survival_with(&coeffs, &times, opts)?;
    let limit = long_time_limit(&model, &initial, &states)?;

    let mut table = Table::new(&["t", "p", "p_bound", "p_scatter", "p_cross"]).meta(provenance("dynamics", &doc));
    let parts = series.parts.clone().unwrap_or_default();
    for (i, (t, p)) in series.times.iter().zip(&series.p).enumerate() {
        let (b, s, c) = parts
            .get(i)
            .map_or((f64::NAN, f64::NAN, f64::NAN), |q| (q.bound, q.scattering, q.cross));
        table.push(vec![*t, *p, b, s, c]);
    }
    out.table("dynamics.csv", &table);
    out.json(
        "dynamics.json",
        &json!({
            "provenance": provenance("dynamics", &doc),
            "long_time_mean": limit.mean,
            "beats": limit.beats.iter().map(|b| json!({
                "frequency": b.frequency,
                "amplitude": b.amplitude,
                "phase": b.phase,
            })).collect::<Vec<_>>(),
            "bound_state_energies": states.iter().map(|s| s.energy).collect::<Vec<_>>(),
            "error_estimate": series.error_estimate,
        }),
    );
    println!("long-time mean C = {}", limit.mean);
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct MarkovianArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Decay width Γ; defaults to πJ(e0).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Energy at which J is read when --gamma is absent.
    #[arg(long, default_value_t = 0.0)]
    pub e0: f64,
    /// Parameter sweep `name:start:end:steps`, name one of xi, kappa, lambda, gamma.
    #[arg(long, value_name = "NAME:START:END:STEPS")]
    pub sweep: Option<String>,
    /// Parameter values (comma separated) at which decay curves are written.
    #[arg(long, value_delimiter = ',')]
    pub decay_at: Vec<f64>,
    /// Final time of the decay curves.
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepParam {
    Xi,
    Kappa,
    Lambda,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::config(format!("--sweep expects name:start:end:steps, got {text:?}"));
        let parts: Vec<&str> = text.split(':').collect();
        let [name, start, end, steps] = parts[..] else {
            return Err(bad());
        };
        let param = match name {
            "xi" => SweepParam::Xi,
            "kappa" => SweepParam::Kappa,
            "lambda" => SweepParam::Lambda,
            "gamma" => SweepParam::Gamma,
            _ => return Err(bad()),
        };
        Ok(Self {
            param,
            start: start.parse().map_err(|_| bad())?,
            end: end.parse().map_err(|_| bad())?,
            steps: steps.parse().map_err(|_| bad())?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.param {
            SweepParam::Xi => "xi",
            SweepParam::Kappa => "kappa",
            SweepParam::Lambda => "lambda",
            SweepParam::Gamma => "gamma",
        }
    }
}

/// Builds `H` for the model with one parameter replaced.
pub fn markovian_at(
    doc: &ModelDoc,
    gamma: Option<f64>,
    e0: f64,
    param: Option<(SweepParam, f64)>,
) -> Result<EffectiveHamiltonianMarkov<f64>, CliError> {
    let mut doc = doc.clone();
    let mut gamma = gamma;
    match (param, &mut doc) {
        (Some((SweepParam::Gamma, v)), _) => gamma = Some(v),
        (Some((p, v)), ModelDoc::Waveguide(WaveguideModelDoc { waveguide })) => match p {
            SweepParam::Xi => waveguide.xi = v,
            SweepParam::Kappa => waveguide.kappa = v,
            SweepParam::Lambda => waveguide.lambda = v,
            SweepParam::Gamma => unreachable!(),
        },
        (Some(_), ModelDoc::Generic(_)) => {
            return Err(CliError::config("only gamma can be swept for a generic model"));
        }
        (None, _) => {}
    }
    let model = doc.model()?;
    Ok(match (gamma, &doc) {
        (Some(g), _) => build_markovian(&model, g)?,
        (None, ModelDoc::Waveguide(w)) if e0 == 0.0 => waveguide_markovian(&w.waveguide.params()?)?,
        (None, _) => build_markovian_at(&model, e0)?,
    })
}

fn phase_name(p: Option<PtPhase>) -> Value {
    match p {
        Some(PtPhase::Symmetric) => json!("symmetric"),
        Some(PtPhase::Broken) => json!("broken"),
        Some(PtPhase::ExceptionalPoint) => json!("exceptional_point"),
        None => Value::Null,
    }
}

/// Closed-form and matrix-exponential decay curves.
pub fn markovian_decay(
    h: &EffectiveHamiltonianMarkov<f64>,
    initial: &InitialState<f64>,
    times: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let sys = resonance_decomposition(h);
    let closed = markovian_survival(&sys, initial, times)?;
    let expm = markovian_survival_expm(h, initial, times)?;
    Ok((closed.p, expm.p))
}

pub fn eigen_flow(
    doc: &ModelDoc,
    gamma: Option<f64>,
    e0: f64,
    sweep: &Sweep,
) -> Result<Table, CliError> {
    let values = linspace(sweep.start, sweep.end, sweep.steps);
    let rows: Vec<Result<Vec<f64>, CliError>> = values
        .par_iter()
        .map(|&v| {
            let h = markovian_at(doc, gamma, e0, Some((sweep.param, v)))?;
            let sys = resonance_decomposition(&h);
            let mut row = vec![v];
            for z in &sys.eigenvalues {
                row.push(z.re);
                row.push(z.im);
            }
            row.push(f64::from(u8::from(sys.kind == ResonanceKind::Defective)));
            Ok(row)
        })
        .collect();
    let n = markovian_at(doc, gamma, e0, None)?.dim();
    let mut columns = vec![sweep.name().to_string()];
    for i in 1..=n {
        columns.push(format!("re_z{i}"));
        columns.push(format!("im_z{i}"));
    }
    columns.push("defective".into());
    let mut table = Table::new(&columns)
        .meta(provenance("markovian", doc))
        .meta("eigenvalues sorted by Im z descending, then Re z ascending");
    for r in rows {
        table.push(r?);
    }
    Ok(table)
}

pub fn markovian(args: &MarkovianArgs, config: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let doc = args.model.resolve(config)?;
    let gamma = args.gamma.or(config.gamma);
    let initial = doc.initial_state()?;
    let points = args.points.or(config.points).unwrap_or(DEFAULT_POINTS);
    let times = linspace(0.0, args.t_max, points);
    let decay_table = |h: &EffectiveHamiltonianMarkov<f64>, label: String| -> Result<Table, CliError> {
        let (closed, expm) = markovian_decay(h, &initial, &times)?;
        let mut t = Table::new(&["t", "p", "p_expm"]).meta(provenance("markovian", &doc)).meta(label);
        for i in 0..times.len() {
            t.push(vec![times[i], closed[i], expm[i]]);
        }
        Ok(t)
    };
    match args.sweep.as_deref().map(Sweep::parse).transpose()? {
        Some(sweep) => {
            out.table("eigen_flow.csv", &eigen_flow(&doc, gamma, args.e0, &sweep)?);
            for v in &args.decay_at {
                let h = markovian_at(&doc, gamma, args.e0, Some((sweep.param, *v)))?;
                let name = format!("markovian_decay_{}_{}.csv", sweep.name(), crate::output::num(*v));
                out.table(&name, &decay_table(&h, format!("{}={v}", sweep.name()))?);
            }
        }
        None => {
            let h = markovian_at(&doc, gamma, args.e0, None)?;
            let sys = resonance_decomposition(&h);
            let pt = anti_pt_check(&h);
            out.json(
                "markovian.json",
                &json!({
                    "provenance": provenance("markovian", &doc),
                    "gamma": h.gamma,
                    "kind": if sys.kind == ResonanceKind::Defective { "defective" } else { "diagonalizable" },
                    "eigenvalues": sys.eigenvalues.iter().map(|z| cplx_json(*z)).collect::<Vec<_>>(),
                    "ep_tolerance": sys.ep_tol,
                    "anti_pt": {
                        "residual": pt.residual,
                        "anti_symmetric": pt.anti_symmetric,
                        "phase": phase_name(pt.phase),
                    },
                }),
            );
            out.table("markovian_decay.csv", &decay_table(&h, format!("gamma={}", h.gamma))?);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct WaveguideArgs {
    #[command(flatten)]
    pub flags: WaveguideFlags,
    /// Chain site holding the excitation at t = 0 (default: the open end).
    #[arg(long)]
    pub initial_site: Option<usize>,
}

pub fn waveguide(args: &WaveguideArgs, config: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let base = match &config.model {
        Some(ModelDoc::Waveguide(w)) => Some(&w.waveguide),
        _ => None,
    };
    let mut wg = args.flags.resolve(base)?;
    if args.initial_site.is_some() {
        wg.initial_site = args.initial_site;
    }
    let doc = ModelDoc::Waveguide(WaveguideModelDoc { waveguide: wg });
    // validates the parameters and the initial site
    doc.model()?;
    doc.initial_state()?;
    let value = serde_json::to_value(&doc).expect("model documents serialize");
    println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    out.json("waveguide.json", &value);
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub flags: WaveguideFlags,
    /// Waveguide model document instead of flags.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of output times on [0, t_max].
    #[arg(long)]
    pub points: Option<usize>,
    /// Chain site holding the excitation at t = 0 (default: the open end).
    #[arg(long)]
    pub initial_site: Option<usize>,
    /// Integration step override.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Waveguide truncation override.
    #[arg(long)]
    pub n_trunc: Option<usize>,
    /// Times (comma separated) at which |β_ν|² is written.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
}

pub fn oracle(args: &OracleArgs, config: &RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let flags = ModelFlags {
        model: args.model.clone(),
        waveguide: args.flags.clone(),
    };
    let doc = flags.resolve(config)?;
    let ModelDoc::Waveguide(w) = &doc else {
        return Err(CliError::config("the lattice oracle needs a waveguide model"));
    };
    let params = w.waveguide.params()?;
    let site = args.initial_site.or(w.waveguide.initial_site).unwrap_or(params.n_atoms);
    let t_max = args.t_max.or(config.t_max).unwrap_or(DEFAULT_T_MAX);
    let points = args.points.or(config.points).unwrap_or(DEFAULT_POINTS).max(2);
    let dt_out = t_max / (points - 1) as f64;
    let mut opts = LatticeOptions {
        dt: args.dt,
        n_trunc: args.n_trunc,
        snapshot_times: args.snapshots.clone(),
        ..LatticeOptions::default()
    };
    if let Some(tol) = config.tolerances.norm_drift {
        opts.norm_tol = tol;
    }
    let run = evolve_with(&params, site, t_max, dt_out, &opts)?;
    let mut table = Table::new(&["t", "p"])
        .meta(provenance("oracle", &doc))
        .meta(format!(
            "initial_site={site} n_trunc={} attach_site={} dt={} max_norm_drift={:e}",
            run.n_trunc, run.attach_site, run.dt, run.max_norm_drift
        ));
    for (t, p) in run.series.times.iter().zip(&run.series.p) {
        table.push(vec![*t, *p]);
    }
    out.table("oracle.csv", &table);
    if !run.snapshots.is_empty() {
        let mut columns = vec!["site".to_string()];
        columns.extend(run.snapshots.iter().map(|(t, _)| format!("t={}", crate::output::num(*t))));
        let mut snap = Table::new(&columns).meta(provenance("oracle", &doc)).meta("|beta_nu(t)|^2");
        for nu in 0..run.n_trunc {
            let mut row = vec![(nu + 1) as f64];
            row.extend(run.snapshots.iter().map(|(_, b)| b[nu]));
            snap.push(row);
        }
        out.table("oracle_snapshots.csv", &snap);
    }
    Ok(())
}
