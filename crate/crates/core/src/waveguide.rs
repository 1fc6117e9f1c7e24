//! Atomic chain side-coupled to a semi-infinite tight-binding waveguide.
//!
//! In the chain's Bloch basis the model is an N-level Friedrichs model with
//!
//! * `ε_n = -2λ cos(πn/(N+1))`,
//! * `f_n = ξ sqrt(2/(N+1)) sin(πn/(N+1))`,
//! * band `[-2κ, 2κ]` and `J(ω) = 2 sin²(l θ)/(π sqrt(4κ² - ω²))`, `ω = 2κ cos θ`,
//!   or `J(ω) = 1/(π sqrt(4κ² - ω²))` for the infinite waveguide.
//!
//! Closed forms for `Σ`, `Σ'`, `Δ`, `Γ`, `K` and `I` are attached to the
//! model as analytic overrides.

use std::sync::Arc;

use crate::bound_states::{BandSide, BoundStateCensus, CriterionRecord};
use crate::error::{Error, Result};
use crate::model::{
    AnalyticForms, ContinuumBand, DiscreteSpectrum, FriedrichsModel, InitialState, Site, SpectralDensity,
    ValidatedModel,
};
use crate::scalar::Real;

/// `(N, λ, κ, ξ, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideParams<T> {
    pub n_atoms: usize,
    /// Intra-chain hopping.
    pub lambda: T,
    /// Waveguide hopping.
    pub kappa: T,
    /// Chain–waveguide coupling.
    pub xi: T,
    pub site: Site,
}

impl<T: Real> WaveguideParams<T> {
    pub fn new(n_atoms: usize, lambda: T, kappa: T, xi: T, site: Site) -> Result<Self> {
        let p = Self {
            n_atoms,
            lambda,
            kappa,
            xi,
            site,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.n_atoms == 0 {
            return bad("n_atoms", "must be at least 1");
        }
        if !(self.lambda > T::zero() && self.lambda.is_finite()) {
            return bad("lambda", "must be positive");
        }
        if !(self.kappa > T::zero() && self.kappa.is_finite()) {
            return bad("kappa", "must be positive");
        }
        if !(self.xi >= T::zero() && self.xi.is_finite()) {
            return bad("xi", "must be non-negative");
        }
        if self.site == Site::Finite(0) {
            return bad("site", "must be at least 1");
        }
        Ok(())
    }

    fn n(&self) -> T {
        T::count(self.n_atoms)
    }

    /// `ε_n`, n = 1..N.
    pub fn levels(&self) -> Vec<T> {
        let np1 = T::count(self.n_atoms + 1);
        (1..=self.n_atoms)
            .map(|n| -T::lit(2.0) * self.lambda * (T::PI() * T::count(n) / np1).cos())
            .collect()
    }

    /// `f_n`, n = 1..N.
    pub fn couplings(&self) -> Vec<T> {
        let np1 = T::count(self.n_atoms + 1);
        let norm = (T::lit(2.0) / np1).sqrt();
        (1..=self.n_atoms)
            .map(|n| self.xi * norm * (T::PI() * T::count(n) / np1).sin())
            .collect()
    }

    /// Zeros `Ẽ_n = -2λ cos(πn/N)` of `K`, n = 1..N-1.
    pub fn k_zeros(&self) -> Vec<T> {
        (1..self.n_atoms)
            .map(|n| -T::lit(2.0) * self.lambda * (T::PI() * T::count(n) / self.n()).cos())
            .collect()
    }

    fn site_factor(&self) -> Option<T> {
        match self.site {
            Site::Finite(l) => Some(T::count(l as usize)),
            Site::Infinite => None,
        }
    }
}

/// Builds the Friedrichs model of the chain + waveguide, with closed forms attached.
pub fn build_waveguide_model<T: Real>(params: &WaveguideParams<T>) -> Result<ValidatedModel<T>> {
    params.check()?;
    let two_kappa = T::lit(2.0) * params.kappa;
    let band = ContinuumBand::new(
        -two_kappa,
        two_kappa,
        SpectralDensity::Waveguide {
            kappa: params.kappa,
            site: params.site,
        },
    );
    let discrete = DiscreteSpectrum::real(params.levels(), params.couplings());
    FriedrichsModel::new(discrete, band)
        .with_overrides(Arc::new(WaveguideForms { params: *params }))
        .validate()
}

/// The excitation on the open chain end `|N⟩_S`, written in the Bloch basis:
/// `c_n = sqrt(2/(N+1)) sin(πnN/(N+1))`.
pub fn default_initial_state<T: Real>(params: &WaveguideParams<T>) -> Result<InitialState<T>> {
    site_initial_state(params, params.n_atoms)
}

/// A single excitation on chain site `mu` (1-based) in the Bloch basis.
pub fn site_initial_state<T: Real>(params: &WaveguideParams<T>, mu: usize) -> Result<InitialState<T>> {
    if mu == 0 || mu > params.n_atoms {
        return Err(Error::InvalidParameter {
            name: "initial_site",
            reason: format!("site {mu} outside 1..={}", params.n_atoms),
        });
    }
    let np1 = T::count(params.n_atoms + 1);
    let norm = (T::lit(2.0) / np1).sqrt();
    let c = (1..=params.n_atoms)
        .map(|n| norm * (T::PI() * T::count(n * mu) / np1).sin())
        .collect();
    InitialState::real(c)
}

/// Closed-form kernels of the waveguide model.
#[derive(Debug, Clone, Copy)]
pub struct WaveguideForms<T> {
    pub params: WaveguideParams<T>,
}

impl<T: Real> WaveguideForms<T> {
    /// `x = (|E| - sqrt(E² - 4κ²))/(2κ)` and `s = sqrt(E² - 4κ²)` for `|E| ≥ 2κ`.
    fn outside(&self, e: T) -> (T, T) {
        let two_kappa = T::lit(2.0) * self.params.kappa;
        let a = e.abs();
        let s = ((a - two_kappa) * (a + two_kappa)).sqrt();
        (two_kappa / (a + s), s)
    }

    /// `1 - x^{2l}` without cancellation near the band edge.
    fn one_minus_power(&self, e: T, l: T) -> T {
        let two_kappa = T::lit(2.0) * self.params.kappa;
        let (_, s) = self.outside(e);
        // ln x = -ln(1 + (|E| - 2κ + s)/(2κ))
        let ln_x = -((e.abs() - two_kappa + s) / two_kappa).ln_1p();
        -(T::lit(2.0) * l * ln_x).exp_m1()
    }

    /// `Σ(E)` for `|E| ≥ 2κ`.
    pub fn sigma_outside(&self, e: T) -> T {
        let two_kappa = T::lit(2.0) * self.params.kappa;
        let sign = e.signum();
        if e.abs() == two_kappa {
            return match self.site_factor() {
                Some(l) => sign * l / self.params.kappa,
                None => sign * T::infinity(),
            };
        }
        let (_, s) = self.outside(e);
        match self.site_factor() {
            Some(l) => sign * self.one_minus_power(e, l) / s,
            None => sign / s,
        }
    }

    /// `Σ'(E)` for `|E| > 2κ` (even in `E`).
    pub fn sigma_derivative_outside(&self, e: T) -> T {
        let (x, s) = self.outside(e);
        let a = e.abs();
        match self.site_factor() {
            Some(l) => {
                let two_l = T::lit(2.0) * l;
                let p = (two_l * x.ln()).exp();
                two_l * p / (s * s) - self.one_minus_power(e, l) * a / (s * s * s)
            }
            None => -a / (s * s * s),
        }
    }

    fn site_factor(&self) -> Option<T> {
        self.params.site_factor()
    }

    fn is_zero_of_density(&self, e: T) -> bool {
        let tol = T::lit(1e-12) * self.params.kappa;
        let l = match self.params.site {
            Site::Finite(l) => l,
            Site::Infinite => return false,
        };
        (1..l).any(|m| {
            let z = -T::lit(2.0) * self.params.kappa * (T::PI() * T::count(m as usize) / T::count(l as usize)).cos();
            (z - e).abs() <= tol
        })
    }

    /// `K(E)` on the real axis.
    pub fn k_closed(&self, e: T) -> T {
        let p = &self.params;
        let two_lambda = T::lit(2.0) * p.lambda;
        let n = p.n();
        let np1 = n + T::one();
        let pref = p.xi * p.xi / p.lambda;
        if e < -two_lambda {
            let phi = (-e / two_lambda).acosh();
            -pref * (n * phi).sinh() / (np1 * phi).sinh()
        } else if e > two_lambda {
            let phi = (e / two_lambda).acosh();
            pref * (n * phi).sinh() / (np1 * phi).sinh()
        } else {
            let theta = (e / two_lambda).acos();
            pref * (n * theta).sin() / (np1 * theta).sin()
        }
    }

    /// `I(E)` on the real axis for the open-end initial state.
    pub fn i_closed(&self, e: T) -> T {
        let p = &self.params;
        let two_lambda = T::lit(2.0) * p.lambda;
        let np1 = p.n() + T::one();
        let sign = if p.n_atoms % 2 == 1 { T::one() } else { -T::one() };
        let pref = p.xi / p.lambda;
        if e < -two_lambda {
            let phi = (-e / two_lambda).acosh();
            -pref * phi.sinh() / (np1 * phi).sinh()
        } else if e > two_lambda {
            let phi = (e / two_lambda).acosh();
            sign * pref * phi.sinh() / (np1 * phi).sinh()
        } else {
            let theta = (e / two_lambda).acos();
            sign * pref * theta.sin() / (np1 * theta).sin()
        }
    }
}

impl<T: Real> AnalyticForms<T> for WaveguideForms<T> {
    fn self_energy(&self, e: T) -> Option<T> {
        let two_kappa = T::lit(2.0) * self.params.kappa;
        if e.abs() >= two_kappa {
            let v = self.sigma_outside(e);
            return v.is_finite().then_some(v);
        }
        self.is_zero_of_density(e).then(T::zero)
    }

    fn self_energy_derivative(&self, e: T) -> Option<T> {
        let two_kappa = T::lit(2.0) * self.params.kappa;
        if e.abs() > two_kappa {
            return Some(self.sigma_derivative_outside(e));
        }
        if self.is_zero_of_density(e) {
            let l = self.site_factor()?;
            let r2 = (two_kappa - e) * (two_kappa + e);
            return Some(-T::lit(2.0) * l / r2);
        }
        None
    }

    fn delta_gamma(&self, e: T) -> Option<(T, T)> {
        let two_kappa = T::lit(2.0) * self.params.kappa;
        if e.abs() >= two_kappa {
            return None;
        }
        let r = ((two_kappa - e) * (two_kappa + e)).sqrt();
        match self.site_factor() {
            None => Some((T::zero(), T::one() / r)),
            Some(l) => {
                let theta = (e / two_kappa).acos();
                let s = (l * theta).sin();
                Some(((T::lit(2.0) * l * theta).sin() / r, T::lit(2.0) * s * s / r))
            }
        }
    }

    fn k(&self, e: T) -> Option<T> {
        Some(self.k_closed(e))
    }

    fn i(&self, e: T) -> Option<T> {
        Some(self.i_closed(e))
    }
}

/// Energies `ε_n` that coincide with a zero `-2κ cos(πℓ/l)` of `J` (bound
/// states in the continuum). Empty for `l = 1` and the infinite waveguide.
pub fn waveguide_bic_energies<T: Real>(params: &WaveguideParams<T>) -> Vec<T> {
    let l = match params.site {
        Site::Finite(l) if l >= 2 => l,
        _ => return Vec::new(),
    };
    let tol = T::lit(1e-12) * params.lambda;
    let zeros: Vec<T> = (1..l)
        .map(|m| -T::lit(2.0) * params.kappa * (T::PI() * T::count(m as usize) / T::count(l as usize)).cos())
        .collect();
    params
        .levels()
        .into_iter()
        .filter(|e| zeros.iter().any(|z| (*z - *e).abs() <= tol))
        .collect()
}

/// `N_out`, the number of levels with `|ε_n| > 2κ`.
pub fn levels_outside<T: Real>(params: &WaveguideParams<T>) -> usize {
    let two_kappa = T::lit(2.0) * params.kappa;
    params.levels().iter().filter(|e| e.abs() > two_kappa).count()
}

/// Energy criterion: `κ/λ < cos(π N_out / 2N)` (trivially true when no
/// level lies below the band).
pub fn energy_criterion<T: Real>(params: &WaveguideParams<T>) -> bool {
    let n_low = levels_outside(params) / 2;
    if n_low == 0 {
        return true;
    }
    params.kappa / params.lambda < (T::PI() * T::count(n_low) / params.n()).cos()
}

/// Threshold `sqrt(κ s_{N+1} / (λ s_N))` of the amplitude criterion, with
/// `s_m = sin(m arccos(κ/λ))` for `κ ≤ λ` and `sinh(m arccosh(κ/λ))` above.
pub fn amplitude_threshold<T: Real>(params: &WaveguideParams<T>) -> T {
    let r = params.kappa / params.lambda;
    let n = params.n();
    let np1 = n + T::one();
    let ratio = if r <= T::one() {
        let phi = r.acos();
        (np1 * phi).sin() / (n * phi).sin()
    } else {
        let phi = r.acosh();
        (np1 * phi).sinh() / (n * phi).sinh()
    };
    (r * ratio).sqrt()
}

/// Amplitude criterion `K(-2κ) < Σ⁻¹(-2κ) = -κ/l`, i.e.
/// `sqrt(l) ξ/λ > sqrt(κ s_{N+1}/(λ s_N))`; always true for `l = ∞`.
pub fn amplitude_criterion<T: Real>(params: &WaveguideParams<T>) -> bool {
    match params.site {
        Site::Infinite => true,
        Site::Finite(l) => {
            let lhs = T::count(l as usize).sqrt() * params.xi / params.lambda;
            let thr = amplitude_threshold(params);
            // a NaN threshold means K(-2κ) ≥ 0, where the energy criterion already fails
            thr.is_finite() && lhs > thr
        }
    }
}

/// Bound-state census from the closed-form criteria.
pub fn waveguide_bound_state_count<T: Real>(params: &WaveguideParams<T>) -> Result<BoundStateCensus<T>> {
    params.check()?;
    let n_out = levels_outside(params);
    let n_low = n_out / 2;
    let energy = energy_criterion(params);
    let amplitude = amplitude_criterion(params);
    let extra = usize::from(energy && amplitude);
    let forms = WaveguideForms { params: *params };
    let two_kappa = T::lit(2.0) * params.kappa;
    let zeros = params.k_zeros();
    let inv_edge = match params.site {
        Site::Finite(l) => params.kappa / T::count(l as usize),
        Site::Infinite => T::zero(),
    };
    let record = |side: BandSide| {
        let (edge, k_zero, inverse_sigma_edge) = match side {
            BandSide::Below => (-two_kappa, n_low.checked_sub(1).and_then(|i| zeros.get(i)).copied(), -inv_edge),
            BandSide::Above => (
                two_kappa,
                zeros.len().checked_sub(n_low).and_then(|i| zeros.get(i)).copied(),
                inv_edge,
            ),
        };
        CriterionRecord {
            side,
            edge,
            k_zero,
            energy_criterion: energy,
            k_edge: forms.k_closed(edge),
            inverse_sigma_edge,
            amplitude_criterion: amplitude,
            tie: false,
        }
    };
    Ok(BoundStateCensus {
        n_low,
        n_up: n_low,
        m_below: n_low + extra,
        m_above: n_low + extra,
        m_bic: waveguide_bic_energies(params).len(),
        criteria_trace: vec![record(BandSide::Below), record(BandSide::Above)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral;

    fn params(n: usize, kappa: f64, xi: f64, site: Site) -> WaveguideParams<f64> {
        WaveguideParams::new(n, 1.0, kappa, xi, site).unwrap()
    }

    #[test]
    fn three_atom_levels() {
        let p = params(3, 0.75, 0.25, Site::Finite(1));
        let lv = p.levels();
        let s2 = 2f64.sqrt();
        assert!((lv[0] + s2).abs() < 1e-15 && lv[1].abs() < 1e-15 && (lv[2] - s2).abs() < 1e-15);
    }

    #[test]
    fn initial_state_normalised() {
        for n in 1..=7 {
            let p = params(n, 1.0, 0.5, Site::Infinite);
            let c = default_initial_state(&p).unwrap();
            let norm: f64 = c.amplitudes().iter().map(|c| c.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
        let p = params(1, 1.0, 0.5, Site::Infinite);
        assert!((default_initial_state(&p).unwrap().amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn edge_self_energy() {
        for l in 1..=4u32 {
            let p = params(3, 0.75, 0.25, Site::Finite(l));
            let m = build_waveguide_model(&p).unwrap();
            let lo = spectral::self_energy(&m, -1.5).unwrap();
            let up = spectral::self_energy(&m, 1.5).unwrap();
            assert!((lo + l as f64 / 0.75).abs() < 1e-12);
            assert!((up - l as f64 / 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn bic_energies() {
        // even l, odd N
        let p = params(3, 0.75, 0.25, Site::Finite(2));
        let e = waveguide_bic_energies(&p);
        assert!(e.len() == 1 && e[0].abs() < 1e-15);
        // κ = λ and l = N + 1: every level
        let p = params(4, 1.0, 0.3, Site::Finite(5));
        assert_eq!(waveguide_bic_energies(&p).len(), 4);
        let p = params(4, 1.0, 0.3, Site::Finite(3));
        assert!(waveguide_bic_energies(&p).is_empty());
        assert!(waveguide_bic_energies(&params(3, 0.75, 0.25, Site::Finite(1))).is_empty());
        assert!(waveguide_bic_energies(&params(3, 0.75, 0.25, Site::Infinite)).is_empty());
    }

    #[test]
    fn single_precision_model() {
        let p = WaveguideParams::<f32>::new(3, 1.0, 0.75, 0.25, Site::Finite(2)).unwrap();
        let m = build_waveguide_model(&p).unwrap();
        let k = spectral::k_real(&m, 0.3f32).unwrap();
        assert!((k - WaveguideForms { params: p }.k_closed(0.3)).abs() < 1e-5);
    }
}
