//! Exact survival probability of an excitation prepared on the discrete levels.
//!
//! The level amplitudes evolve as
//!
//! ```text
//! A_n(t) = Σ_m R_nm e^{-i E_m t} + ∫ S_n(E) e^{-i E t} dE,
//! ```
//!
//! a sum over bound states plus an integral over the scattering states, and
//! `p(t) = Σ_n |A_n(t)|²`.

use crate::bound_states::{solve_bound_states, BoundState};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{InitialState, SpectralDensity, ValidatedModel};
use crate::quadrature::{GAUSS_W, KRONROD_W, KRONROD_X};
use crate::scalar::{cplx, real, Cplx, Real};
use crate::spectral;

/// Bound-state weights `R_nm` and the data needed to evaluate `S_n(E)`.
#[derive(Debug, Clone)]
pub struct DecayCoefficients<T> {
    model: ValidatedModel<T>,
    initial: InitialState<T>,
    /// `E_m`.
    pub energies: Vec<T>,
    /// `r[m][n] = R_nm`.
    pub r: Vec<Vec<Cplx<T>>>,
}

impl<T: Real> DecayCoefficients<T> {
    pub fn model(&self) -> &ValidatedModel<T> {
        &self.model
    }

    pub fn initial(&self) -> &InitialState<T> {
        &self.initial
    }

    /// `S_n(E) = J(E) x_n conj(c† x)` with `x = (E - H_eff⁺(E))⁻¹ f`
    /// and `H_eff⁺ = diag(ε) + (Δ - iΓ) f f†`, for `E` inside the band.
    pub fn scattering_weight(&self, e: T) -> Result<Vec<Cplx<T>>> {
        let m = &self.model;
        let n = m.n_levels();
        let zero = vec![real(T::zero()); n];
        let j = m.band().spectral_density(e);
        if j == T::zero() {
            return Ok(zero);
        }
        let (delta, gamma) = spectral::delta_gamma(m, e)?;
        let sigma = cplx(delta, -gamma);
        let f = m.couplings();
        let mut a = vec![real(T::zero()); n * n];
        for r in 0..n {
            for c in 0..n {
                a[r * n + c] = -sigma * f[r] * f[c].conj();
            }
            a[r * n + r] = a[r * n + r] + real(e - m.levels()[r]);
        }
        let Some(x) = linalg::solve(a, f.to_vec()) else {
            return Ok(zero);
        };
        let cx = self
            .initial
            .amplitudes()
            .iter()
            .zip(&x)
            .fold(real(T::zero()), |acc, (c, x)| acc + c.conj() * *x);
        let w = cx.conj() * j;
        Ok(x.into_iter().map(|x| x * w).collect())
    }

    /// The same weight written as `Γ/π · f_n I(E) / ((E - ε_n) |1 - Σ⁺ K|²)`;
    /// singular where `E` meets a level.
    pub fn scattering_weight_closed(&self, e: T) -> Result<Vec<Cplx<T>>> {
        let m = &self.model;
        let (delta, gamma) = spectral::delta_gamma(m, e)?;
        let k = spectral::k_real(m, e)?;
        let i = spectral::i_function(m, &self.initial, real(e))?;
        let denom = (real(T::one()) - cplx(delta, -gamma) * k).norm_sqr();
        Ok(m.levels()
            .iter()
            .zip(m.couplings())
            .map(|(eps, f)| *f * i * (gamma / (T::PI() * (e - *eps) * denom)))
            .collect())
    }

    /// `Σ_m R_nm e^{-i E_m t}`.
    pub fn bound_amplitudes(&self, t: T) -> Vec<Cplx<T>> {
        let mut out = vec![real(T::zero()); self.model.n_levels()];
        for (e, row) in self.energies.iter().zip(&self.r) {
            let phase = Cplx::from_polar(T::one(), -*e * t);
            for (o, r) in out.iter_mut().zip(row) {
                *o = *o + *r * phase;
            }
        }
        out
    }
}

/// `R_nm = a_n^(m) ⟨b_m | φ0⟩` from the bound-state amplitudes.
///
/// For a root of `K Σ = 1` this is `-f_n I(E_m) / ((E_m - ε_n)(K' + K² Σ'))`;
/// for a state pinned to level `m` it is `c_m / (1 - |f_m|² Σ')` on that level.
pub fn decay_coefficients<T: Real>(
    model: &ValidatedModel<T>,
    initial: &InitialState<T>,
    bound_states: &[BoundState<T>],
) -> Result<DecayCoefficients<T>> {
    initial.check_size(model.n_levels())?;
    let c = initial.amplitudes();
    let r = bound_states
        .iter()
        .map(|b| {
            let ov = b.overlap(c);
            b.discrete_amplitudes.iter().map(|a| *a * ov).collect()
        })
        .collect();
    Ok(DecayCoefficients {
        model: model.clone(),
        initial: initial.clone(),
        energies: bound_states.iter().map(|b| b.energy).collect(),
        r,
    })
}

/// Per-time split of `p(t)`: `bound + scattering + cross = p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalParts<T> {
    pub bound: T,
    pub scattering: T,
    pub cross: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries<T> {
    pub times: Vec<T>,
    pub p: Vec<T>,
    pub parts: Option<Vec<SurvivalParts<T>>>,
    /// Largest quadrature error estimate on a level amplitude.
    pub error_estimate: T,
}

/// Controls the scattering integral.
#[derive(Debug, Clone, Copy)]
pub struct DynamicsOptions<T> {
    /// Target error on each level amplitude.
    pub amplitude_tol: T,
    pub min_panels: usize,
    pub max_panels: usize,
}

impl<T: Real> Default for DynamicsOptions<T> {
    fn default() -> Self {
        Self {
            amplitude_tol: T::lit(1e-7).max(T::epsilon() * T::lit(1e3)),
            min_panels: 64,
            max_panels: 1 << 14,
        }
    }
}

/// Energy window carrying the scattering weight.
fn scattering_window<T: Real>(model: &ValidatedModel<T>) -> Result<(T, T)> {
    let band = model.band();
    if band.is_finite() {
        return Ok((band.omega_low, band.omega_up));
    }
    match &band.density {
        SpectralDensity::Ohmic { cutoff, .. } if band.omega_low.is_finite() => {
            // e^{-60} is below any tolerance we target
            Ok((band.omega_low, band.omega_low + T::lit(60.0) * *cutoff))
        }
        _ => Err(Error::Unsupported(
            "time evolution needs a finite band or an exponential cutoff".into(),
        )),
    }
}

/// `S_n(E) dE` at the 15 Kronrod nodes of one panel `[a, b]` in `θ`, with
/// `E = mid - half cos θ`.
struct Panel<T> {
    a: T,
    b: T,
    energies: [T; 15],
    kronrod: [T; 15],
    gauss: [T; 15],
    weights: Vec<Vec<Cplx<T>>>,
}

impl<T: Real> Panel<T> {
    fn build(coeffs: &DecayCoefficients<T>, lo: T, up: T, a: T, b: T) -> Result<Self> {
        let two = T::lit(2.0);
        let mid = (lo + up) / two;
        let half = (up - lo) / two;
        let (c, r) = ((a + b) / two, (b - a) / two);
        let mut p = Self {
            a,
            b,
            energies: [T::zero(); 15],
            kronrod: [T::zero(); 15],
            gauss: [T::zero(); 15],
            weights: Vec::with_capacity(15),
        };
        let mut k = 0;
        for i in 0..8 {
            let wk = T::lit(KRONROD_W[i]);
            let wg = if i % 2 == 1 { T::lit(GAUSS_W[i / 2]) } else { T::zero() };
            let thetas = if i == 7 {
                vec![(c, T::lit(GAUSS_W[3]))]
            } else {
                let dx = r * T::lit(KRONROD_X[i]);
                vec![(c - dx, wg), (c + dx, wg)]
            };
            for (theta, wg) in thetas {
                let e = mid - half * theta.cos();
                let jac = half * theta.sin();
                p.energies[k] = e;
                p.kronrod[k] = wk * r * jac;
                p.gauss[k] = wg * r * jac;
                p.weights.push(if e > lo && e < up {
                    coeffs.scattering_weight(e)?
                } else {
                    vec![real(T::zero()); coeffs.model.n_levels()]
                });
                k += 1;
            }
        }
        Ok(p)
    }

    /// Kronrod and Gauss sums of `S_n e^{-iEt}` over the panel.
    fn sums(&self, t: T, k: &mut [Cplx<T>], g: &mut [Cplx<T>]) {
        for j in 0..15 {
            let phase = Cplx::from_polar(T::one(), -self.energies[j] * t);
            for (i, s) in self.weights[j].iter().enumerate() {
                let v = *s * phase;
                k[i] = k[i] + v * self.kronrod[j];
                if self.gauss[j] != T::zero() {
                    g[i] = g[i] + v * self.gauss[j];
                }
            }
        }
    }

    fn error(&self, t: T, n: usize) -> T {
        let mut k = vec![real(T::zero()); n];
        let mut g = vec![real(T::zero()); n];
        self.sums(t, &mut k, &mut g);
        k.iter().zip(&g).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }
}

/// Composite Kronrod rule for the scattering amplitudes, refined where `S_n`
/// has structure (narrow resonances near quasi-bound states).
struct ScatteringGrid<T> {
    panels: Vec<Panel<T>>,
    n: usize,
}

impl<T: Real> ScatteringGrid<T> {
    fn uniform(coeffs: &DecayCoefficients<T>, lo: T, up: T, panels: usize) -> Result<Self> {
        let h = T::PI() / T::count(panels);
        let panels = (0..panels)
            .map(|p| Panel::build(coeffs, lo, up, h * T::count(p), h * T::count(p + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            panels,
            n: coeffs.model.n_levels(),
        })
    }

    /// `(∫ S_n e^{-iEt} dE, error estimate)`.
    fn amplitudes(&self, t: T) -> (Vec<Cplx<T>>, T) {
        let mut k = vec![real(T::zero()); self.n];
        let mut g = vec![real(T::zero()); self.n];
        for p in &self.panels {
            p.sums(t, &mut k, &mut g);
        }
        let err = k.iter().zip(&g).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
        (k, err)
    }
}

/// `p(t)` at the given times with an explicit bound-state list and options.
pub fn survival_with<T: Real>(
    coeffs: &DecayCoefficients<T>,
    times: &[T],
    opts: DynamicsOptions<T>,
) -> Result<SurvivalSeries<T>> {
    let (lo, up) = scattering_window(&coeffs.model)?;
    let t_max = times.iter().fold(T::zero(), |m, t| m.max(t.abs()));
    let half = (up - lo) / T::lit(2.0);
    // about π/4 of phase per panel at t_max
    let wanted = (T::lit(4.0) * t_max * half).ceil().to_usize().unwrap_or(usize::MAX);
    let initial = opts.min_panels.max(wanted);
    if initial > opts.max_panels {
        return Err(Error::QuadratureBudgetExceeded {
            time: t_max.as_f64(),
            estimate: f64::INFINITY,
        });
    }
    let probes = [T::zero(), t_max / T::lit(2.0), t_max];
    let mut grid = ScatteringGrid::uniform(coeffs, lo, up, initial)?;
    loop {
        let err = probes.iter().fold(T::zero(), |m, t| m.max(grid.amplitudes(*t).1));
        if err <= opts.amplitude_tol {
            break;
        }
        // bisect the panels holding the larger half of the local error
        let n = grid.n;
        let mut local: Vec<(T, usize)> = grid
            .panels
            .iter()
            .enumerate()
            .map(|(i, p)| (probes.iter().fold(T::zero(), |m, t| m.max(p.error(*t, n))), i))
            .collect();
        local.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
        let total = local.iter().fold(T::zero(), |s, (e, _)| s + *e);
        let mut chosen = Vec::new();
        let mut acc = T::zero();
        for (e, i) in &local {
            if acc >= total / T::lit(2.0) && !chosen.is_empty() {
                break;
            }
            acc = acc + *e;
            chosen.push(*i);
        }
        if grid.panels.len() + chosen.len() > opts.max_panels {
            return Err(Error::QuadratureBudgetExceeded {
                time: t_max.as_f64(),
                estimate: err.as_f64(),
            });
        }
        chosen.sort_unstable();
        let mut next = Vec::with_capacity(grid.panels.len() + chosen.len());
        let mut split = chosen.into_iter().peekable();
        for (i, p) in grid.panels.into_iter().enumerate() {
            if split.peek() == Some(&i) {
                split.next();
                let m = (p.a + p.b) / T::lit(2.0);
                next.push(Panel::build(coeffs, lo, up, p.a, m)?);
                next.push(Panel::build(coeffs, lo, up, m, p.b)?);
            } else {
                next.push(p);
            }
        }
        grid.panels = next;
    }
    let mut p = Vec::with_capacity(times.len());
    let mut parts = Vec::with_capacity(times.len());
    let mut error_estimate = T::zero();
    for t in times {
        let b = coeffs.bound_amplitudes(*t);
        let (s, err) = grid.amplitudes(*t);
        error_estimate = error_estimate.max(err);
        let bound = b.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
        let scattering = s.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
        let total = b.iter().zip(&s).fold(T::zero(), |acc, (x, y)| acc + (*x + *y).norm_sqr());
        p.push(total);
        parts.push(SurvivalParts {
            bound,
            scattering,
            cross: total - bound - scattering,
        });
    }
    Ok(SurvivalSeries {
        times: times.to_vec(),
        p,
        parts: Some(parts),
        error_estimate,
    })
}

/// Exact `p(t)`: solves for the bound states, then evaluates the bound-state
/// sum and the scattering integral at every time.
pub fn survival_probability<T: Real>(
    model: &ValidatedModel<T>,
    initial: &InitialState<T>,
    times: &[T],
) -> Result<SurvivalSeries<T>> {
    let states = solve_bound_states(model)?;
    let coeffs = decay_coefficients(model, initial, &states)?;
    survival_with(&coeffs, times, DynamicsOptions::default())
}

/// A beat `2 amplitude cos(frequency t - phase)` between two bound states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beat<T> {
    /// `E_m - E_m'`.
    pub frequency: T,
    /// `|Σ_n R_nm R*_nm'|`.
    pub amplitude: T,
    pub phase: T,
}

/// Long-time behaviour `P(t) = C + 2 Σ_{m<m'} |X_mm'| cos((E_m - E_m')t - arg X_mm')`.
#[derive(Debug, Clone, PartialEq)]
pub struct LongTimeLimit<T> {
    /// Time-averaged survival `C = Σ_m Σ_n |R_nm|²`.
    pub mean: T,
    pub beats: Vec<Beat<T>>,
}

impl<T: Real> LongTimeLimit<T> {
    pub fn evaluate(&self, t: T) -> T {
        self.beats.iter().fold(self.mean, |acc, b| {
            acc + T::lit(2.0) * b.amplitude * (b.frequency * t - b.phase).cos()
        })
    }
}

pub fn long_time_limit<T: Real>(
    model: &ValidatedModel<T>,
    initial: &InitialState<T>,
    bound_states: &[BoundState<T>],
) -> Result<LongTimeLimit<T>> {
    let c = decay_coefficients(model, initial, bound_states)?;
    let mean = c
        .r
        .iter()
        .flatten()
        .fold(T::zero(), |acc, r| acc + r.norm_sqr());
    let mut beats = Vec::new();
    for m in 0..c.r.len() {
        for mp in m + 1..c.r.len() {
            let x = c.r[m]
                .iter()
                .zip(&c.r[mp])
                .fold(real(T::zero()), |acc, (a, b)| acc + *a * b.conj());
            beats.push(Beat {
                frequency: c.energies[m] - c.energies[mp],
                amplitude: x.norm(),
                phase: x.arg(),
            });
        }
    }
    Ok(LongTimeLimit { mean, beats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Site;
    use crate::waveguide::{build_waveguide_model, default_initial_state, WaveguideParams};

    fn setup(site: Site) -> (ValidatedModel<f64>, InitialState<f64>) {
        let p = WaveguideParams::new(3, 1.0, 0.75, 0.25, site).unwrap();
        (build_waveguide_model(&p).unwrap(), default_initial_state(&p).unwrap())
    }

    #[test]
    fn starts_at_one() {
        for site in [Site::Finite(1), Site::Finite(2), Site::Infinite] {
            let (m, c) = setup(site);
            let s = survival_probability(&m, &c, &[0.0]).unwrap();
            assert!((s.p[0] - 1.0).abs() < 1e-6, "{site}: {}", s.p[0]);
        }
    }

    #[test]
    fn scattering_weight_forms_agree() {
        let (m, c) = setup(Site::Finite(2));
        let states = solve_bound_states(&m).unwrap();
        let d = decay_coefficients(&m, &c, &states).unwrap();
        for e in [-1.3, -0.9, -0.2, 0.37, 1.1] {
            let a = d.scattering_weight(e).unwrap();
            let b = d.scattering_weight_closed(e).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()));
            }
        }
    }

    #[test]
    fn r_matches_rational_form() {
        let (m, c) = setup(Site::Infinite);
        let states = solve_bound_states(&m).unwrap();
        let d = decay_coefficients(&m, &c, &states).unwrap();
        for (row, b) in d.r.iter().zip(&states) {
            let e = b.energy;
            let k = spectral::k_real(&m, e).unwrap();
            let kp = spectral::k_derivative_real(&m, e).unwrap();
            let sp = spectral::self_energy_derivative(&m, e).unwrap();
            let i = spectral::i_function(&m, &c, real(e)).unwrap();
            for (n, r) in row.iter().enumerate() {
                let f = m.couplings()[n];
                let want = -f * i / ((e - m.levels()[n]) * (kp + k * k * sp));
                assert!((r - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn even_in_time_for_real_data() {
        let (m, c) = setup(Site::Finite(2));
        let s = survival_probability(&m, &c, &[-3.7, 3.7, -11.0, 11.0]).unwrap();
        assert!((s.p[0] - s.p[1]).abs() < 1e-10);
        assert!((s.p[2] - s.p[3]).abs() < 1e-10);
    }

    #[test]
    fn no_bound_states_no_limit() {
        let (m, c) = setup(Site::Finite(1));
        let states = solve_bound_states(&m).unwrap();
        assert!(states.is_empty());
        let l = long_time_limit(&m, &c, &states).unwrap();
        assert_eq!(l.mean, 0.0);
        assert!(l.beats.is_empty());
    }
}
