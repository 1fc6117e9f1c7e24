//! Brute-force propagation of the chain + waveguide in the site basis:
//!
//! ```text
//! i dα_μ/dt = -λ(α_{μ-1} + α_{μ+1}) + δ_{μ1} ξ β_l
//! i dβ_ν/dt = -κ(β_{ν-1} + β_{ν+1}) + δ_{νl} ξ α_1
//! ```
//!
//! with a hard wall after `N_trunc` waveguide sites, integrated by fixed-step
//! classical Runge–Kutta. The infinite waveguide is modelled by attaching the
//! chain to the middle of the truncated lattice.

use crate::dynamics::SurvivalSeries;
use crate::error::{Error, Result};
use crate::model::Site;
use crate::scalar::{cplx, real, Cplx, Real};
use crate::waveguide::WaveguideParams;

/// Chain amplitudes `α_μ` and waveguide amplitudes `β_ν` (both 1-based in the
/// equations, stored 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState<T> {
    pub alpha: Vec<Cplx<T>>,
    pub beta: Vec<Cplx<T>>,
}

impl<T: Real> LatticeState<T> {
    pub fn chain_population(&self) -> T {
        self.alpha.iter().fold(T::zero(), |a, x| a + x.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.beta.iter().fold(self.chain_population(), |a, x| a + x.norm_sqr())
    }
}

#[derive(Debug, Clone)]
pub struct LatticeOptions<T> {
    /// Overrides `min(0.01/max(λ, κ, ξ), dt_out/10)`.
    pub dt: Option<T>,
    /// Overrides the automatic truncation.
    pub n_trunc: Option<usize>,
    /// Largest truncation the run may allocate.
    pub max_sites: usize,
    /// Times at which `|β_ν|²` is recorded (rounded to the output grid).
    pub snapshot_times: Vec<T>,
    pub norm_tol: T,
}

impl<T: Real> Default for LatticeOptions<T> {
    fn default() -> Self {
        Self {
            dt: None,
            n_trunc: None,
            max_sites: 10_000_000,
            snapshot_times: Vec::new(),
            norm_tol: T::lit(1e-6).max(T::epsilon() * T::lit(1e4)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LatticeRun<T> {
    pub series: SurvivalSeries<T>,
    pub snapshots: Vec<(T, Vec<T>)>,
    pub final_state: LatticeState<T>,
    pub max_norm_drift: T,
    pub n_trunc: usize,
    /// Waveguide site the chain is attached to (1-based).
    pub attach_site: usize,
    pub dt: T,
}

const DEFAULT_TRUNCATION: usize = 1000;

/// Truncation and attachment site for a run up to `t_max`.
fn geometry<T: Real>(params: &WaveguideParams<T>, t_max: T, opts: &LatticeOptions<T>) -> Result<(usize, usize)> {
    let reach = (T::lit(2.5) * params.kappa * t_max).ceil().to_usize().unwrap_or(usize::MAX);
    let (n_trunc, attach, needed) = match params.site {
        Site::Finite(l) => {
            let l = l as usize;
            let needed = l.saturating_add(reach);
            let n = opts.n_trunc.unwrap_or(DEFAULT_TRUNCATION.max(needed));
            (n, l, needed)
        }
        Site::Infinite => {
            // both walls must stay outside the light cone
            let needed = reach.saturating_mul(2);
            let n = opts.n_trunc.unwrap_or(DEFAULT_TRUNCATION.max(needed));
            (n, n / 2, needed)
        }
    };
    if needed > opts.max_sites || n_trunc < needed || attach == 0 || attach > n_trunc {
        return Err(Error::LightConeViolation {
            t_max: t_max.as_f64(),
            needed,
            limit: opts.n_trunc.unwrap_or(opts.max_sites),
        });
    }
    Ok((n_trunc, attach))
}

struct Lattice<T> {
    lambda: T,
    kappa: T,
    xi: T,
    attach: usize,
}

impl<T: Real> Lattice<T> {
    /// `-i H y`.
    fn rhs(&self, y: &LatticeState<T>, out: &mut LatticeState<T>) {
        let mi = cplx(T::zero(), -T::one());
        let n = y.alpha.len();
        let m = y.beta.len();
        let a = self.attach - 1;
        for mu in 0..n {
            let mut h = real(T::zero());
            if mu > 0 {
                h = h - y.alpha[mu - 1] * self.lambda;
            }
            if mu + 1 < n {
                h = h - y.alpha[mu + 1] * self.lambda;
            }
            if mu == 0 {
                h = h + y.beta[a] * self.xi;
            }
            out.alpha[mu] = mi * h;
        }
        for nu in 0..m {
            let mut h = real(T::zero());
            if nu > 0 {
                h = h - y.beta[nu - 1] * self.kappa;
            }
            if nu + 1 < m {
                h = h - y.beta[nu + 1] * self.kappa;
            }
            if nu == a {
                h = h + y.alpha[0] * self.xi;
            }
            out.beta[nu] = mi * h;
        }
    }
}

fn axpy<T: Real>(y: &LatticeState<T>, k: &LatticeState<T>, h: T, out: &mut LatticeState<T>) {
    for (o, (a, b)) in out.alpha.iter_mut().zip(y.alpha.iter().zip(&k.alpha)) {
        *o = *a + *b * h;
    }
    for (o, (a, b)) in out.beta.iter_mut().zip(y.beta.iter().zip(&k.beta)) {
        *o = *a + *b * h;
    }
}

/// `p(t) = Σ_μ |α_μ(t)|²` on the grid `0, dt_out, …` up to `t_max`, starting
/// from chain site `initial_site` (1-based).
pub fn evolve<T: Real>(params: &WaveguideParams<T>, initial_site: usize, t_max: T, dt_out: T) -> Result<SurvivalSeries<T>> {
    Ok(evolve_with(params, initial_site, t_max, dt_out, &LatticeOptions::default())?.series)
}

pub fn evolve_with<T: Real>(
    params: &WaveguideParams<T>,
    initial_site: usize,
    t_max: T,
    dt_out: T,
    opts: &LatticeOptions<T>,
) -> Result<LatticeRun<T>> {
    params.check()?;
    if initial_site == 0 || initial_site > params.n_atoms {
        return Err(Error::InvalidParameter {
            name: "initial_site",
            reason: format!("site {initial_site} outside 1..={}", params.n_atoms),
        });
    }
    if !(dt_out > T::zero()) || !(t_max >= T::zero()) {
        return Err(Error::InvalidParameter {
            name: "dt_out",
            reason: "output step must be positive and t_max non-negative".into(),
        });
    }
    let (n_trunc, attach) = geometry(params, t_max, opts)?;
    let scale = params.lambda.max(params.kappa).max(params.xi);
    let dt_target = opts
        .dt
        .unwrap_or_else(|| (T::lit(0.01) / scale).min(dt_out / T::lit(10.0)));
    let substeps = (dt_out / dt_target).ceil().to_usize().unwrap_or(1).max(1);
    let dt = dt_out / T::count(substeps);
    let n_out = (t_max / dt_out + T::lit(1e-9)).floor().to_usize().unwrap_or(0);

    let lattice = Lattice {
        lambda: params.lambda,
        kappa: params.kappa,
        xi: params.xi,
        attach,
    };
    let zeros = |n| vec![real(T::zero()); n];
    let mut y = LatticeState {
        alpha: zeros(params.n_atoms),
        beta: zeros(n_trunc),
    };
    y.alpha[initial_site - 1] = real(T::one());
    let blank = || LatticeState {
        alpha: zeros(params.n_atoms),
        beta: zeros(n_trunc),
    };
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (blank(), blank(), blank(), blank(), blank());

    let snapshot_steps: Vec<usize> = opts
        .snapshot_times
        .iter()
        .map(|t| (*t / dt_out).round().to_usize().unwrap_or(0).min(n_out))
        .collect();
    let mut snapshots = Vec::new();
    let record_snapshots = |step: usize, y: &LatticeState<T>, snapshots: &mut Vec<(T, Vec<T>)>| {
        for (i, s) in snapshot_steps.iter().enumerate() {
            if *s == step {
                snapshots.push((opts.snapshot_times[i], y.beta.iter().map(|b| b.norm_sqr()).collect()));
            }
        }
    };

    let mut times = Vec::with_capacity(n_out + 1);
    let mut p = Vec::with_capacity(n_out + 1);
    times.push(T::zero());
    p.push(y.chain_population());
    record_snapshots(0, &y, &mut snapshots);
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let mut max_drift = T::zero();
    for step in 1..=n_out {
        for _ in 0..substeps {
            lattice.rhs(&y, &mut k1);
            axpy(&y, &k1, half, &mut tmp);
            lattice.rhs(&tmp, &mut k2);
            axpy(&y, &k2, half, &mut tmp);
            lattice.rhs(&tmp, &mut k3);
            axpy(&y, &k3, dt, &mut tmp);
            lattice.rhs(&tmp, &mut k4);
            for i in 0..y.alpha.len() {
                y.alpha[i] = y.alpha[i] + (k1.alpha[i] + (k2.alpha[i] + k3.alpha[i]) * T::lit(2.0) + k4.alpha[i]) * sixth;
            }
            for i in 0..y.beta.len() {
                y.beta[i] = y.beta[i] + (k1.beta[i] + (k2.beta[i] + k3.beta[i]) * T::lit(2.0) + k4.beta[i]) * sixth;
            }
        }
        let t = T::count(step) * dt_out;
        let drift = (y.norm() - T::one()).abs();
        max_drift = max_drift.max(drift);
        if drift > opts.norm_tol {
            return Err(Error::NormDrift {
                time: t.as_f64(),
                drift: drift.as_f64(),
            });
        }
        times.push(t);
        p.push(y.chain_population());
        record_snapshots(step, &y, &mut snapshots);
    }
    Ok(LatticeRun {
        series: SurvivalSeries {
            times,
            p,
            parts: None,
            error_estimate: max_drift,
        },
        snapshots,
        final_state: y,
        max_norm_drift: max_drift,
        n_trunc,
        attach_site: attach,
        dt,
    })
}
