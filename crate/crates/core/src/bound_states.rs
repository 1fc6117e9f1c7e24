//! Bound states: real roots of `K(E) Σ(E) = 1` outside the band, and bound
//! states in the continuum sitting on zeros of `J`.
//!
//! Outside the band `F(E) = K(E) - Σ⁻¹(E)` is strictly decreasing between
//! consecutive poles of `K`, so every root is bracketed by a pole, a band
//! edge or a far sentinel.

use crate::error::{Error, Result};
use crate::model::{ContinuumBand, ValidatedModel};
use crate::roots::{solve_bracketed, RootTolerance};
use crate::scalar::{real, Cplx, Real};
use crate::spectral;

/// Which edge a census record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSide {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStateKind {
    BelowBand,
    AboveBand,
    InContinuum,
}

/// `ψ(ω) = prefactor · sqrt(J(ω)) / (E - ω)`: the continuum part of a bound
/// state, with `g(ω)` taken real and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumProfile<T> {
    pub energy: T,
    pub prefactor: Cplx<T>,
    /// `∫ |ψ(ω)|² dω`.
    pub norm: T,
}

impl<T: Real> ContinuumProfile<T> {
    pub fn amplitude(&self, band: &ContinuumBand<T>, omega: T) -> Cplx<T> {
        let j = band.spectral_density(omega);
        if j == T::zero() {
            return real(T::zero());
        }
        self.prefactor * (j.sqrt() / (self.energy - omega))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundState<T> {
    pub energy: T,
    pub kind: BoundStateKind,
    /// Amplitudes on the discrete levels.
    pub discrete_amplitudes: Vec<Cplx<T>>,
    /// `|B|² = -1/(K' + K² Σ')` (or the equivalent for a level-pinned state).
    pub normalization: T,
    pub continuum: ContinuumProfile<T>,
    /// `K(E) Σ(E) - 1` at the returned energy.
    pub residual: T,
}

impl<T: Real> BoundState<T> {
    /// Weight on the discrete levels, `Σ_n |a_n|²`.
    pub fn discrete_weight(&self) -> T {
        self.discrete_amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Overlap `⟨bound | φ0⟩` with an initial state on the levels.
    pub fn overlap(&self, initial: &[Cplx<T>]) -> Cplx<T> {
        self.discrete_amplitudes
            .iter()
            .zip(initial)
            .fold(real(T::zero()), |acc, (a, c)| acc + a.conj() * *c)
    }
}

/// One step of the edge analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionRecord<T> {
    pub side: BandSide,
    pub edge: T,
    /// Zero of `K` on the branch that contains the edge, if the branch has one.
    pub k_zero: Option<T>,
    pub energy_criterion: bool,
    pub k_edge: T,
    pub inverse_sigma_edge: T,
    pub amplitude_criterion: bool,
    /// `K(edge)` and `Σ⁻¹(edge)` agree to rounding; counted as no root.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateCensus<T> {
    /// Levels below / above the band.
    pub n_low: usize,
    pub n_up: usize,
    /// Bound states below / above the band.
    pub m_below: usize,
    pub m_above: usize,
    pub m_bic: usize,
    pub criteria_trace: Vec<CriterionRecord<T>>,
}

impl<T> BoundStateCensus<T> {
    pub fn total(&self) -> usize {
        self.m_below + self.m_above + self.m_bic
    }
}

fn root_tolerance<T: Real>(model: &ValidatedModel<T>) -> RootTolerance<T> {
    RootTolerance {
        x_tol: model.span() * T::lit(1e-14).max(T::epsilon() * T::lit(16.0)),
        max_iter: 600,
    }
}

/// Levels with nonzero coupling; only these are poles of `K`.
fn coupled_levels<T: Real>(model: &ValidatedModel<T>) -> Vec<T> {
    model
        .levels()
        .iter()
        .zip(model.couplings())
        .filter(|(_, f)| f.norm_sqr() > T::zero())
        .map(|(e, _)| *e)
        .collect()
}

/// `F(E) = K(E) - Σ⁻¹(E)` outside the band (edges included).
fn secular<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    Ok(spectral::k_real(model, e)? - spectral::inverse_self_energy(model, e)?)
}

/// A point next to `pole` on side `dir` (±1) where `F` has the sign `want`.
fn near_pole<T: Real, F>(model: &ValidatedModel<T>, pole: T, dir: T, want: T, f: &mut F) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let mut d = T::lit(1e-6) * model.span();
    let floor = model.pole_tolerance() * T::lit(4.0);
    loop {
        let x = pole + dir * d;
        if let Ok(v) = f(x) {
            if v.signum() == want && v != T::zero() {
                return Ok(x);
            }
        }
        d = d / T::lit(4.0);
        if d < floor {
            return Err(Error::RootNotFound {
                trace: format!("no sign change next to pole {:e}", pole.as_f64()),
            });
        }
    }
}

/// A far point beyond `start` in direction `dir` where `F` has sign `want`.
fn sentinel<T: Real, F>(model: &ValidatedModel<T>, start: T, dir: T, want: T, f: &mut F) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let mut d = model.span().max(T::one());
    for _ in 0..200 {
        let x = start + dir * d;
        let v = f(x)?;
        if v.signum() == want && v != T::zero() {
            return Ok(x);
        }
        d = d * T::lit(2.0);
    }
    Err(Error::RootNotFound {
        trace: format!("no sentinel found beyond {:e}", start.as_f64()),
    })
}

/// Zero of `K` between two consecutive coupled poles.
fn k_zero_between<T: Real>(model: &ValidatedModel<T>, a: T, b: T) -> Option<T> {
    let mut k = |x| spectral::k_real(model, x);
    let lo = near_pole(model, a, T::one(), T::one(), &mut k).ok()?;
    let hi = near_pole(model, b, -T::one(), -T::one(), &mut k).ok()?;
    solve_bracketed(k, lo, hi, root_tolerance(model)).ok().map(|r| r.x)
}

fn is_tie<T: Real>(k: T, inv: T) -> bool {
    (k - inv).abs() <= T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) * k.abs().max(inv.abs())
}

fn edge_record<T: Real>(model: &ValidatedModel<T>, side: BandSide) -> Result<Option<CriterionRecord<T>>> {
    let band = model.band();
    let edge = match side {
        BandSide::Below => band.omega_low,
        BandSide::Above => band.omega_up,
    };
    if !edge.is_finite() {
        return Ok(None);
    }
    let fail = |e: Error| Error::EdgeEvaluationFailure {
        edge: edge.as_f64(),
        detail: e.to_string(),
    };
    let coupled = coupled_levels(model);
    let k_edge = spectral::k_real(model, edge).map_err(fail)?;
    let inv = spectral::inverse_self_energy(model, edge).map_err(fail)?;
    let below: Vec<T> = coupled.iter().copied().filter(|e| *e < edge).collect();
    let above: Vec<T> = coupled.iter().copied().filter(|e| *e > edge).collect();
    let k_zero = match (below.last(), above.first()) {
        (Some(a), Some(b)) => k_zero_between(model, *a, *b),
        _ => None,
    };
    let tie = is_tie(k_edge, inv);
    let (energy, amplitude) = match side {
        // K(ω_low) < 0 ⇔ ω_low lies past the zero of K on its branch
        BandSide::Below => (below.is_empty() || k_edge < T::zero(), !tie && k_edge < inv),
        BandSide::Above => (above.is_empty() || k_edge > T::zero(), !tie && k_edge > inv),
    };
    Ok(Some(CriterionRecord {
        side,
        edge,
        k_zero,
        energy_criterion: energy,
        k_edge,
        inverse_sigma_edge: inv,
        amplitude_criterion: amplitude,
        tie,
    }))
}

fn extra_root<T>(rec: &Option<CriterionRecord<T>>) -> bool {
    rec.as_ref().is_some_and(|r| r.energy_criterion && r.amplitude_criterion)
}

/// Counts bound states from the level positions and the edge criteria,
/// without solving for them.
pub fn count_bound_states<T: Real>(model: &ValidatedModel<T>) -> Result<BoundStateCensus<T>> {
    let band = model.band();
    let n_low = model.levels().iter().filter(|e| **e < band.omega_low).count();
    let n_up = model.levels().iter().filter(|e| **e > band.omega_up).count();
    let below = edge_record(model, BandSide::Below)?;
    let above = edge_record(model, BandSide::Above)?;
    let m_below = n_low + usize::from(extra_root(&below));
    let m_above = n_up + usize::from(extra_root(&above));
    let m_bic = find_bics(model)?.len();
    Ok(BoundStateCensus {
        n_low,
        n_up,
        m_below,
        m_above,
        m_bic,
        criteria_trace: below.into_iter().chain(above).collect(),
    })
}

fn decoupled_state<T: Real>(model: &ValidatedModel<T>, n: usize, kind: BoundStateKind) -> BoundState<T> {
    let e = model.levels()[n];
    let mut a = vec![real(T::zero()); model.n_levels()];
    a[n] = real(T::one());
    BoundState {
        energy: e,
        kind,
        discrete_amplitudes: a,
        normalization: T::one(),
        continuum: ContinuumProfile {
            energy: e,
            prefactor: real(T::zero()),
            norm: T::zero(),
        },
        residual: T::zero(),
    }
}

/// Builds the normalised state at a root of `K Σ = 1` with `E` not a level.
fn generic_state<T: Real>(model: &ValidatedModel<T>, e: T, kind: BoundStateKind) -> Result<BoundState<T>> {
    let sigma = spectral::self_energy(model, e)?;
    let sigma_p = spectral::self_energy_derivative(model, e)?;
    let k = spectral::k_real(model, e)?;
    let kp = spectral::k_derivative_real(model, e)?;
    let b2 = -T::one() / (kp + k * k * sigma_p);
    if !(b2 > T::zero() && b2.is_finite()) {
        return Err(Error::NormalizationFailure {
            energy: e.as_f64(),
            value: b2.as_f64(),
        });
    }
    let phi = b2.sqrt();
    let a = model
        .levels()
        .iter()
        .zip(model.couplings())
        .map(|(eps, f)| *f * (phi / (e - *eps)))
        .collect();
    Ok(BoundState {
        energy: e,
        kind,
        discrete_amplitudes: a,
        normalization: b2,
        continuum: ContinuumProfile {
            energy: e,
            prefactor: real(phi * k),
            norm: -b2 * k * k * sigma_p,
        },
        residual: k * sigma - T::one(),
    })
}

/// Bound states in the continuum.
///
/// Three situations give one:
/// * a level with zero coupling inside the band;
/// * a level sitting on a zero of `J` where `Σ` also vanishes, which pins
///   the state to that level: `a_m = (1 - |f_m|² Σ'(ε_m))^{-1/2}`;
/// * a zero of `J` away from the levels where `K Σ = 1` holds.
pub fn find_bics<T: Real>(model: &ValidatedModel<T>) -> Result<Vec<BoundState<T>>> {
    let band = model.band();
    let tol = T::lit(1e-12) * model.span();
    let mut out = Vec::new();
    for (n, (eps, f)) in model.levels().iter().zip(model.couplings()).enumerate() {
        if band.contains(*eps) && f.norm_sqr() == T::zero() {
            out.push(decoupled_state(model, n, BoundStateKind::InContinuum));
        }
    }
    for z in band.interior_zeros() {
        let hit = model
            .levels()
            .iter()
            .position(|e| (*e - z).abs() <= tol)
            .filter(|n| model.couplings()[*n].norm_sqr() > T::zero());
        match hit {
            Some(m) => {
                let e = model.levels()[m];
                let sigma = spectral::self_energy(model, e)?;
                let sigma_p = spectral::self_energy_derivative(model, e)?;
                let scale = (sigma_p.abs() * model.span()).max(T::min_positive_value());
                if sigma.abs() > T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) * scale {
                    continue;
                }
                let f = model.couplings()[m];
                let norm = T::one() - f.norm_sqr() * sigma_p;
                let am = T::one() / norm.sqrt();
                let mut a = vec![real(T::zero()); model.n_levels()];
                a[m] = real(am);
                out.push(BoundState {
                    energy: e,
                    kind: BoundStateKind::InContinuum,
                    discrete_amplitudes: a,
                    normalization: am * am,
                    continuum: ContinuumProfile {
                        energy: e,
                        prefactor: f.conj() * am,
                        norm: -f.norm_sqr() * am * am * sigma_p,
                    },
                    residual: T::zero(),
                });
            }
            None => {
                if model.levels().iter().any(|e| (*e - z).abs() <= tol) {
                    continue;
                }
                let sigma = spectral::self_energy(model, z)?;
                let k = spectral::k_real(model, z)?;
                let r = k * sigma - T::one();
                if r.abs() <= T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) {
                    out.push(generic_state(model, z, BoundStateKind::InContinuum)?);
                }
            }
        }
    }
    out.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(out)
}

fn solve_side<T: Real>(model: &ValidatedModel<T>, side: BandSide) -> Result<Vec<BoundState<T>>> {
    let band = model.band();
    let mut out = Vec::new();
    let (edge, kind) = match side {
        BandSide::Below => (band.omega_low, BoundStateKind::BelowBand),
        BandSide::Above => (band.omega_up, BoundStateKind::AboveBand),
    };
    if !edge.is_finite() {
        return Ok(out);
    }
    for (n, (eps, f)) in model.levels().iter().zip(model.couplings()).enumerate() {
        let outside = match side {
            BandSide::Below => *eps < edge,
            BandSide::Above => *eps > edge,
        };
        if outside && f.norm_sqr() == T::zero() {
            out.push(decoupled_state(model, n, kind));
        }
    }
    let rec = edge_record(model, side)?;
    let extra = extra_root(&rec);
    let coupled: Vec<T> = coupled_levels(model)
        .into_iter()
        .filter(|e| match side {
            BandSide::Below => *e < edge,
            BandSide::Above => *e > edge,
        })
        .collect();
    let mut f = |x: T| secular(model, x);
    let one = T::one();
    // brackets (left, right) with F(left) > 0 > F(right)
    let mut brackets = Vec::new();
    match side {
        BandSide::Below => {
            let first = coupled.first().copied().unwrap_or(edge);
            let right = match coupled.first() {
                Some(p) => near_pole(model, *p, -one, -one, &mut f)?,
                None => edge,
            };
            if !coupled.is_empty() || extra {
                brackets.push((sentinel(model, first, -one, one, &mut f)?, right));
            }
            for w in coupled.windows(2) {
                brackets.push((
                    near_pole(model, w[0], one, one, &mut f)?,
                    near_pole(model, w[1], -one, -one, &mut f)?,
                ));
            }
            if extra {
                if let Some(p) = coupled.last() {
                    brackets.push((near_pole(model, *p, one, one, &mut f)?, edge));
                }
            }
        }
        BandSide::Above => {
            let last = coupled.last().copied().unwrap_or(edge);
            if extra {
                if let Some(p) = coupled.first() {
                    brackets.push((edge, near_pole(model, *p, -one, -one, &mut f)?));
                }
            }
            for w in coupled.windows(2) {
                brackets.push((
                    near_pole(model, w[0], one, one, &mut f)?,
                    near_pole(model, w[1], -one, -one, &mut f)?,
                ));
            }
            let left = match coupled.last() {
                Some(p) => near_pole(model, *p, one, one, &mut f)?,
                None => edge,
            };
            if !coupled.is_empty() || extra {
                brackets.push((left, sentinel(model, last, one, -one, &mut f)?));
            }
        }
    }
    let tol = root_tolerance(model);
    for (a, b) in brackets {
        let root = solve_bracketed(&mut f, a, b, tol)?;
        if root.x == edge {
            return Err(Error::EdgeEvaluationFailure {
                edge: edge.as_f64(),
                detail: "bound state lies closer to the band edge than the working precision resolves".into(),
            });
        }
        out.push(generic_state(model, root.x, kind)?);
    }
    Ok(out)
}

/// All bound states, sorted by energy: below the band, in the continuum,
/// above the band.
pub fn solve_bound_states<T: Real>(model: &ValidatedModel<T>) -> Result<Vec<BoundState<T>>> {
    let mut out = solve_side(model, BandSide::Below)?;
    out.extend(find_bics(model)?);
    out.extend(solve_side(model, BandSide::Above)?);
    out.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteSpectrum, FriedrichsModel, Site, SpectralDensity};
    use crate::waveguide::{build_waveguide_model, WaveguideParams};

    fn waveguide(n: usize, kappa: f64, xi: f64, site: Site) -> ValidatedModel<f64> {
        build_waveguide_model(&WaveguideParams::new(n, 1.0, kappa, xi, site).unwrap()).unwrap()
    }

    #[test]
    fn single_atom_infinite_waveguide() {
        // ξ²/E = -sqrt(E² - 4κ²) ⇒ E² = 2κ² + sqrt(4κ⁴ + ξ⁴)
        let (kappa, xi) = (0.75, 0.4);
        let m = waveguide(1, kappa, xi, Site::Infinite);
        let states = solve_bound_states(&m).unwrap();
        assert_eq!(states.len(), 2);
        let e = (2.0 * kappa * kappa + (4.0 * kappa.powi(4) + xi.powi(4)).sqrt()).sqrt();
        assert!((states[0].energy + e).abs() < 1e-12);
        assert!((states[1].energy - e).abs() < 1e-12);
        for s in &states {
            assert!((s.discrete_weight() + s.continuum.norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn continuum_norm_matches_quadrature() {
        let m = waveguide(3, 0.75, 0.25, Site::Finite(2));
        for s in solve_bound_states(&m).unwrap() {
            let band = m.band();
            let q = band
                .integrate_weighted(band.contains(s.energy).then_some(s.energy), |w| {
                    (s.continuum.prefactor.norm_sqr()) / ((s.energy - w) * (s.energy - w))
                })
                .unwrap();
            assert!((q - s.continuum.norm).abs() < 1e-9, "{} vs {}", q, s.continuum.norm);
        }
    }

    #[test]
    fn census_agrees_with_solver() {
        for &(n, kappa, xi, site) in &[
            (3, 0.75, 0.25, Site::Finite(1)),
            (3, 0.75, 0.25, Site::Finite(2)),
            (3, 0.75, 0.25, Site::Infinite),
            (4, 0.5, 0.1, Site::Finite(3)),
            (5, 1.3, 0.9, Site::Finite(2)),
        ] {
            let m = waveguide(n, kappa, xi, site);
            let c = count_bound_states(&m).unwrap();
            let s = solve_bound_states(&m).unwrap();
            assert_eq!(c.total(), s.len(), "N={n} κ={kappa} l={site}");
        }
    }

    #[test]
    fn bic_on_level() {
        let m = waveguide(3, 0.75, 0.25, Site::Finite(2));
        let bics = find_bics(&m).unwrap();
        assert_eq!(bics.len(), 1);
        let b = &bics[0];
        assert!(b.energy.abs() < 1e-14);
        assert!(b.discrete_amplitudes[0].norm() == 0.0 && b.discrete_amplitudes[2].norm() == 0.0);
        assert!((b.discrete_weight() + b.continuum.norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decoupled_level_below_band() {
        let band = ContinuumBand::new(
            -1.0,
            1.0,
            SpectralDensity::Jacobi {
                amplitude: 0.1,
                s_low: 0.5,
                s_up: 0.5,
                zeros: vec![],
            },
        );
        let m = FriedrichsModel::new(DiscreteSpectrum::real(vec![-3.0, 0.0], vec![0.0, 0.3]), band)
            .validate()
            .unwrap();
        let c = count_bound_states(&m).unwrap();
        let s = solve_bound_states(&m).unwrap();
        assert_eq!(c.total(), s.len());
        assert!(s.iter().any(|b| b.energy == -3.0));
    }
}
