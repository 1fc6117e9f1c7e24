//! Model definition: discrete levels, the continuum band and its spectral
//! density, initial states, and validation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_kronrod, TanhSinh};
use crate::scalar::{Cplx, Real};

/// The discrete part: levels `ε_n` and couplings `f_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpectrum<T> {
    pub levels: Vec<T>,
    pub couplings: Vec<Cplx<T>>,
}

impl<T: Real> DiscreteSpectrum<T> {
    pub fn new(levels: Vec<T>, couplings: Vec<Cplx<T>>) -> Self {
        Self { levels, couplings }
    }

    /// Convenience constructor for real couplings.
    pub fn real(levels: Vec<T>, couplings: Vec<T>) -> Self {
        let couplings = couplings.into_iter().map(|f| Cplx::new(f, T::zero())).collect();
        Self { levels, couplings }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `|f_n|²`.
    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.couplings.iter().map(|f| f.norm_sqr())
    }
}

/// Behaviour of `J(ω)` at a finite band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeBehavior<T> {
    /// `J ~ |ω - edge|^s` with `s > 0`; `Σ(edge)` converges.
    PowerLaw(T),
    /// `J` does not vanish at the edge; `Σ(edge)` diverges.
    Divergent,
    /// The band extends to infinity on this side.
    Unbounded,
}

impl<T: Real> EdgeBehavior<T> {
    fn from_exponent(s: T) -> Self {
        if s > T::zero() {
            Self::PowerLaw(s)
        } else {
            Self::Divergent
        }
    }

    pub fn is_convergent(&self) -> bool {
        matches!(self, Self::PowerLaw(_))
    }
}

/// Attachment site of the chain on the semi-infinite waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Finite(l) => write!(f, "{l}"),
            Site::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Site {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Site::Infinite),
            other => other
                .parse::<u32>()
                .ok()
                .filter(|&l| l >= 1)
                .map(Site::Finite)
                .ok_or_else(|| Error::InvalidParameter {
                    name: "site",
                    reason: format!("expected an integer ≥ 1 or \"inf\", got {other:?}"),
                }),
        }
    }
}

/// User-supplied density with its declared structure.
#[derive(Clone)]
pub struct CustomDensity<T> {
    pub func: Arc<dyn Fn(T) -> T + Send + Sync>,
    pub edges: (EdgeBehavior<T>, EdgeBehavior<T>),
    pub interior_zeros: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for CustomDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("edges", &self.edges)
            .field("interior_zeros", &self.interior_zeros)
            .finish_non_exhaustive()
    }
}

/// Spectral density `J(ω) = |g(ω)|² ρ(ω)` on the band.
#[derive(Debug, Clone)]
pub enum SpectralDensity<T> {
    /// `A (ω - ω_low)^s_low (ω_up - ω)^s_up ∏_k (ω - z_k)²` on a finite band.
    Jacobi {
        amplitude: T,
        s_low: T,
        s_up: T,
        zeros: Vec<T>,
    },
    /// Semi-infinite tight-binding waveguide seen from site `site`, band `[-2κ, 2κ]`.
    Waveguide { kappa: T, site: Site },
    /// `A (ω - ω_low)^s exp(-(ω - ω_low)/ω_c)` on `[ω_low, ∞)`.
    Ohmic { amplitude: T, exponent: T, cutoff: T },
    /// Constant density (the Markovian continuum).
    Flat { value: T },
    Custom(CustomDensity<T>),
}

/// Continuum band `[ω_low, ω_up]` with its spectral density.
#[derive(Debug, Clone)]
pub struct ContinuumBand<T> {
    pub omega_low: T,
    pub omega_up: T,
    pub density: SpectralDensity<T>,
}

impl<T: Real> ContinuumBand<T> {
    pub fn new(omega_low: T, omega_up: T, density: SpectralDensity<T>) -> Self {
        Self {
            omega_low,
            omega_up,
            density,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.omega_low.is_finite() && self.omega_up.is_finite()
    }

    pub fn width(&self) -> T {
        self.omega_up - self.omega_low
    }

    /// True for `ω_low < E < ω_up`.
    pub fn contains(&self, e: T) -> bool {
        e > self.omega_low && e < self.omega_up
    }

    /// `J(ω)`, zero outside the band.
    pub fn spectral_density(&self, omega: T) -> T {
        if !(omega >= self.omega_low && omega <= self.omega_up) {
            return T::zero();
        }
        self.density_near(omega, omega - self.omega_low, self.omega_up - omega)
    }

    /// `J(ω)` given the distances to both edges (kept separate so that edge
    /// power laws are evaluated without cancellation).
    pub fn density_near(&self, omega: T, d_low: T, d_up: T) -> T {
        match &self.density {
            SpectralDensity::Jacobi {
                amplitude,
                s_low,
                s_up,
                zeros,
            } => {
                let mut j = *amplitude * d_low.powf(*s_low) * d_up.powf(*s_up);
                for z in zeros {
                    let d = omega - *z;
                    j = j * d * d;
                }
                j
            }
            SpectralDensity::Waveguide { kappa, site } => {
                // r = sqrt(4κ² - ω²) = sqrt((ω + 2κ)(2κ - ω))
                let r = (d_low * d_up).sqrt();
                match site {
                    Site::Infinite => T::one() / (T::PI() * r),
                    Site::Finite(l) => {
                        let theta = waveguide_angle(omega, *kappa, d_low, d_up);
                        let s = (T::count(*l as usize) * theta).sin();
                        T::lit(2.0) * s * s / (T::PI() * r)
                    }
                }
            }
            SpectralDensity::Ohmic {
                amplitude,
                exponent,
                cutoff,
            } => *amplitude * d_low.powf(*exponent) * (-d_low / *cutoff).exp(),
            SpectralDensity::Flat { value } => *value,
            SpectralDensity::Custom(c) => (c.func)(omega),
        }
    }

    /// Edge behaviour `(low, up)`.
    pub fn edge_behavior(&self) -> (EdgeBehavior<T>, EdgeBehavior<T>) {
        let bound = |finite: bool, b: EdgeBehavior<T>| if finite { b } else { EdgeBehavior::Unbounded };
        let lo = self.omega_low.is_finite();
        let up = self.omega_up.is_finite();
        match &self.density {
            SpectralDensity::Jacobi { s_low, s_up, .. } => (
                bound(lo, EdgeBehavior::from_exponent(*s_low)),
                bound(up, EdgeBehavior::from_exponent(*s_up)),
            ),
            SpectralDensity::Waveguide { site, .. } => match site {
                Site::Infinite => (EdgeBehavior::Divergent, EdgeBehavior::Divergent),
                Site::Finite(_) => {
                    let half = T::lit(0.5);
                    (EdgeBehavior::PowerLaw(half), EdgeBehavior::PowerLaw(half))
                }
            },
            SpectralDensity::Ohmic { exponent, .. } => (
                bound(lo, EdgeBehavior::from_exponent(*exponent)),
                EdgeBehavior::Unbounded,
            ),
            SpectralDensity::Flat { .. } => (
                bound(lo, EdgeBehavior::Divergent),
                bound(up, EdgeBehavior::Divergent),
            ),
            SpectralDensity::Custom(c) => (bound(lo, c.edges.0), bound(up, c.edges.1)),
        }
    }

    /// Declared zeros of `J` strictly inside the band, ascending.
    pub fn interior_zeros(&self) -> Vec<T> {
        let mut zeros = match &self.density {
            SpectralDensity::Jacobi { zeros, .. } => zeros.clone(),
            SpectralDensity::Waveguide { kappa, site } => match site {
                Site::Infinite => Vec::new(),
                Site::Finite(l) => (1..*l)
                    .map(|m| {
                        -T::lit(2.0) * *kappa * (T::PI() * T::count(m as usize) / T::count(*l as usize)).cos()
                    })
                    .collect(),
            },
            SpectralDensity::Ohmic { .. } | SpectralDensity::Flat { .. } => Vec::new(),
            SpectralDensity::Custom(c) => c.interior_zeros.clone(),
        };
        zeros.retain(|z| self.contains(*z));
        zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zeros
    }

    /// True when `e` is a declared interior zero of `J` (within `tol`).
    pub fn is_declared_zero(&self, e: T, tol: T) -> bool {
        self.interior_zeros().iter().any(|z| (*z - e).abs() <= tol)
    }

    pub(crate) fn tanh_sinh(&self) -> TanhSinh<T> {
        TanhSinh::default()
    }

    /// `∫ g(ω, ω - ω_low, ω_up - ω) dω` over the band by double-exponential
    /// quadrature, optionally split at an interior point.
    pub fn integrate_plain<F>(&self, split: Option<T>, mut g: F) -> Result<T>
    where
        F: FnMut(T, T, T) -> T,
    {
        let q = self.tanh_sinh();
        let (lo, up) = (self.omega_low, self.omega_up);
        let piece = |a: T, b: T, g: &mut F| -> Result<T> {
            match (a.is_finite(), b.is_finite()) {
                (true, true) => {
                    // distances to the band edges, not to the piece edges
                    Ok(q.integrate(a, b, |x, da, db| {
                        let d_low = if a == lo { da } else { x - lo };
                        let d_up = if b == up { db } else { up - x };
                        g(x, d_low, d_up)
                    })?
                    .value)
                }
                (true, false) => Ok(q
                    .integrate_upper_infinite(a, |x, da| {
                        let d_low = if a == lo { da } else { x - lo };
                        g(x, d_low, T::infinity())
                    })?
                    .value),
                (false, true) => Ok(q
                    .integrate_lower_infinite(b, |x, db| {
                        let d_up = if b == up { db } else { up - x };
                        g(x, T::infinity(), d_up)
                    })?
                    .value),
                (false, false) => {
                    let left = q.integrate_lower_infinite(T::zero(), |x, _| g(x, T::infinity(), T::infinity()))?;
                    let right = q.integrate_upper_infinite(T::zero(), |x, _| g(x, T::infinity(), T::infinity()))?;
                    Ok(left.value + right.value)
                }
            }
        };
        match split {
            Some(s) if s > lo && s < up => Ok(piece(lo, s, &mut g)? + piece(s, up, &mut g)?),
            _ => piece(lo, up, &mut g),
        }
    }

    /// `∫ J(ω) h(ω) dω` over the band by direct double-exponential quadrature.
    pub fn integrate_direct<H>(&self, split: Option<T>, mut h: H) -> Result<T>
    where
        H: FnMut(T) -> T,
    {
        self.integrate_plain(split, |x, dl, du| {
            let j = self.density_near(x, dl, du);
            if j == T::zero() {
                return T::zero();
            }
            let v = j * h(x);
            // an abscissa that rounds onto a singular edge carries negligible weight
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        })
    }

    /// `∫ J(ω) h(ω) dω` using the best route for the density: the waveguide
    /// uses `ω = 2κ cos θ`, which absorbs the `1/√` edge behaviour.
    pub fn integrate_weighted<H>(&self, split: Option<T>, mut h: H) -> Result<T>
    where
        H: FnMut(T) -> T,
    {
        match &self.density {
            SpectralDensity::Waveguide { kappa, .. } => {
                let two_kappa = T::lit(2.0) * *kappa;
                self.integrate_angle(split, |theta| h(two_kappa * theta.cos()))
            }
            _ => self.integrate_direct(split, h),
        }
    }

    /// `∫_0^π J(2κ cos θ) 2κ sin θ g(θ) dθ` for the waveguide density.
    fn integrate_angle<G>(&self, split: Option<T>, mut g: G) -> Result<T>
    where
        G: FnMut(T) -> T,
    {
        let SpectralDensity::Waveguide { kappa, site } = &self.density else {
            unreachable!("angle integral needs the waveguide density")
        };
        let two = T::lit(2.0);
        let pi = T::PI();
        let weight = |theta: T| match site {
            Site::Infinite => T::one() / pi,
            Site::Finite(l) => {
                let s = (T::count(*l as usize) * theta).sin();
                two * s * s / pi
            }
        };
        let mut f = |theta: T| {
            let w = weight(theta);
            if w == T::zero() {
                return T::zero();
            }
            let v = w * g(theta);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        };
        let tol = T::lit(1e-13);
        let abs = T::lit(1e-300).max(T::min_positive_value());
        match split.filter(|s| self.contains(*s)) {
            Some(s) => {
                let t0 = (s / (two * *kappa)).acos();
                let a = adaptive_kronrod(T::zero(), t0, tol, abs, 4000, &mut f)?;
                let b = adaptive_kronrod(t0, pi, tol, abs, 4000, &mut f)?;
                Ok(a.value + b.value)
            }
            None => Ok(adaptive_kronrod(T::zero(), pi, tol, abs, 4000, &mut f)?.value),
        }
    }
}

impl<T: Real> ContinuumBand<T> {
    /// `∫ J(ω) / (e - ω)^power dω` for `e` outside the band, on an edge or at
    /// an interior zero of `J`. `e - ω` is formed from edge distances so that
    /// integrable edge singularities keep full precision.
    pub fn resolvent_moment(&self, e: T, power: i32) -> Result<T> {
        if let SpectralDensity::Waveguide { kappa, .. } = self.density {
            let split = self.contains(e).then_some(e);
            let two_kappa = T::lit(2.0) * kappa;
            let four_kappa = T::lit(4.0) * kappa;
            // 2κ cos θ = 2κ - 4κ sin²(θ/2) = -2κ + 4κ cos²(θ/2)
            return self.integrate_angle(split, |theta| {
                let half = theta / T::lit(2.0);
                let de = if theta < T::FRAC_PI_2() {
                    (e - two_kappa) + four_kappa * half.sin().powi(2)
                } else {
                    (e + two_kappa) - four_kappa * half.cos().powi(2)
                };
                de.powi(-power)
            });
        }
        let (lo, up) = (self.omega_low, self.omega_up);
        let term = |x: T, dl: T, du: T, de: T| {
            let j = self.density_near(x, dl, du);
            if j == T::zero() {
                return T::zero();
            }
            let v = j * de.powi(-power);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        };
        if self.contains(e) && self.is_finite() {
            let q = self.tanh_sinh();
            let left = q.integrate(lo, e, |x, da, db| term(x, da, up - x, db))?;
            let right = q.integrate(e, up, |x, da, db| term(x, x - lo, db, -da))?;
            return Ok(left.value + right.value);
        }
        let split = self.contains(e).then_some(e);
        self.integrate_plain(split, |x, dl, du| {
            let de = if e <= lo {
                (e - lo) - dl
            } else if e >= up {
                (e - up) + du
            } else {
                e - x
            };
            term(x, dl, du, de)
        })
    }
}

/// `θ = arccos(ω / 2κ)`, evaluated near the edges from the edge distances.
pub(crate) fn waveguide_angle<T: Real>(omega: T, kappa: T, d_low: T, d_up: T) -> T {
    let two = T::lit(2.0);
    let four_kappa = T::lit(4.0) * kappa;
    if d_up < kappa {
        // 1 - cos θ = d_up / 2κ ⇒ θ = 2 asin(sqrt(d_up / 4κ))
        two * (d_up / four_kappa).sqrt().asin()
    } else if d_low < kappa {
        T::PI() - two * (d_low / four_kappa).sqrt().asin()
    } else {
        (omega / (two * kappa)).acos()
    }
}

/// Closed forms used in place of quadrature when a model has them.
///
/// Every method returns `None` when no closed form applies at the argument.
pub trait AnalyticForms<T>: Send + Sync + fmt::Debug {
    /// `Σ(E)` outside the band or at a zero of `J`.
    fn self_energy(&self, e: T) -> Option<T>;
    /// `Σ'(E)` outside the band or at a zero of `J`.
    fn self_energy_derivative(&self, e: T) -> Option<T>;
    /// `(Δ(E), Γ(E))` inside the band.
    fn delta_gamma(&self, e: T) -> Option<(T, T)>;
    /// `K(E)` on the real axis.
    fn k(&self, e: T) -> Option<T>;
    /// `I(E)` on the real axis for the model's default initial state.
    fn i(&self, e: T) -> Option<T>;
}

/// The N-level Friedrichs model before validation.
#[derive(Debug, Clone)]
pub struct FriedrichsModel<T> {
    pub discrete: DiscreteSpectrum<T>,
    pub continuum: ContinuumBand<T>,
    pub overrides: Option<Arc<dyn AnalyticForms<T>>>,
}

impl<T: Real> FriedrichsModel<T> {
    pub fn new(discrete: DiscreteSpectrum<T>, continuum: ContinuumBand<T>) -> Self {
        Self {
            discrete,
            continuum,
            overrides: None,
        }
    }

    pub fn with_overrides(mut self, overrides: Arc<dyn AnalyticForms<T>>) -> Self {
        self.overrides = Some(overrides);
        self
    }

    pub fn validate(self) -> Result<ValidatedModel<T>> {
        validate_model(self)
    }
}

/// A model whose invariants have been checked. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct ValidatedModel<T> {
    inner: Arc<FriedrichsModel<T>>,
    span: T,
}

impl<T: Real> ValidatedModel<T> {
    /// Re-validation is the identity.
    pub fn validate(self) -> Result<Self> {
        Ok(self)
    }

    pub fn model(&self) -> &FriedrichsModel<T> {
        &self.inner
    }

    pub fn levels(&self) -> &[T] {
        &self.inner.discrete.levels
    }

    pub fn couplings(&self) -> &[Cplx<T>] {
        &self.inner.discrete.couplings
    }

    pub fn band(&self) -> &ContinuumBand<T> {
        &self.inner.continuum
    }

    pub fn overrides(&self) -> Option<&dyn AnalyticForms<T>> {
        self.inner.overrides.as_deref()
    }

    pub fn n_levels(&self) -> usize {
        self.inner.discrete.len()
    }

    /// Spectral scale: extent of levels and finite band edges (at least 1e-300).
    pub fn span(&self) -> T {
        self.span
    }

    /// Tolerance under which an argument counts as hitting a pole.
    pub fn pole_tolerance(&self) -> T {
        T::lit(1e-13) * self.span
    }

    /// Same model with the analytic overrides removed (pure quadrature).
    pub fn without_overrides(&self) -> Self {
        let mut m = (*self.inner).clone();
        m.overrides = None;
        Self {
            inner: Arc::new(m),
            span: self.span,
        }
    }
}

/// Checks model invariants and returns the shareable handle.
pub fn validate_model<T: Real>(model: FriedrichsModel<T>) -> Result<ValidatedModel<T>> {
    let d = &model.discrete;
    if d.levels.is_empty() {
        return Err(Error::NoLevels);
    }
    if d.levels.len() != d.couplings.len() {
        return Err(Error::LengthMismatch {
            levels: d.levels.len(),
            couplings: d.couplings.len(),
        });
    }
    let band = &model.continuum;
    if !(band.omega_low < band.omega_up) {
        return Err(Error::EmptyBand {
            low: band.omega_low.as_f64(),
            up: band.omega_up.as_f64(),
        });
    }
    for (i, e) in d.levels.iter().enumerate() {
        if !e.is_finite() {
            return Err(Error::InvalidParameter {
                name: "levels",
                reason: format!("level {i} is not finite"),
            });
        }
    }
    let mut lo = d.levels[0];
    let mut hi = d.levels[d.levels.len() - 1];
    for edge in [band.omega_low, band.omega_up] {
        if edge.is_finite() {
            lo = lo.min(edge);
            hi = hi.max(edge);
        }
    }
    let span = (hi - lo).max(T::min_positive_value());
    let tol = T::lit(1e-12) * span;
    for (i, w) in d.levels.windows(2).enumerate() {
        if (w[1] - w[0]).abs() <= tol {
            return Err(Error::DegenerateLevels {
                index: i + 1,
                next: i + 2,
                value: w[0].as_f64(),
            });
        }
        if w[1] < w[0] {
            return Err(Error::UnsortedLevels {
                index: i + 2,
                value: w[1].as_f64(),
            });
        }
    }
    check_density_parameters(band)?;
    sample_density(band)?;
    Ok(ValidatedModel {
        inner: Arc::new(model),
        span,
    })
}

fn check_density_parameters<T: Real>(band: &ContinuumBand<T>) -> Result<()> {
    let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
    match &band.density {
        SpectralDensity::Jacobi {
            amplitude,
            s_low,
            s_up,
            zeros,
        } => {
            if !band.is_finite() {
                return bad("band", "Jacobi density needs a finite band".into());
            }
            if *amplitude < T::zero() {
                return bad("amplitude", "must be non-negative".into());
            }
            if *s_low <= -T::one() || *s_up <= -T::one() {
                return bad("edge exponents", "must exceed -1 for an integrable density".into());
            }
            if zeros.iter().any(|z| !band.contains(*z)) {
                return bad("zeros", "declared zeros must lie strictly inside the band".into());
            }
        }
        SpectralDensity::Waveguide { kappa, .. } => {
            let two = T::lit(2.0);
            if !(*kappa > T::zero()) {
                return bad("kappa", "must be positive".into());
            }
            let tol = T::lit(1e-12) * *kappa;
            if (band.omega_low + two * *kappa).abs() > tol || (band.omega_up - two * *kappa).abs() > tol {
                return bad("band", "waveguide band must be [-2κ, 2κ]".into());
            }
        }
        SpectralDensity::Ohmic {
            amplitude,
            exponent,
            cutoff,
        } => {
            if !band.omega_low.is_finite() || band.omega_up.is_finite() {
                return bad("band", "Ohmic density lives on [ω_low, ∞)".into());
            }
            if *amplitude < T::zero() || *exponent <= -T::one() || !(*cutoff > T::zero()) {
                return bad("ohmic", "need A ≥ 0, s > -1, ω_c > 0".into());
            }
        }
        SpectralDensity::Flat { value } => {
            if *value < T::zero() {
                return Err(Error::NegativeSpectralDensity {
                    omega: f64::NAN,
                    value: value.as_f64(),
                });
            }
        }
        SpectralDensity::Custom(c) => {
            if c.interior_zeros.iter().any(|z| !band.contains(*z)) {
                return bad("zeros", "declared zeros must lie strictly inside the band".into());
            }
        }
    }
    Ok(())
}

fn sample_density<T: Real>(band: &ContinuumBand<T>) -> Result<()> {
    const SAMPLES: usize = 257;
    let (lo, up) = (band.omega_low, band.omega_up);
    for k in 1..SAMPLES {
        let u = T::count(k) / T::count(SAMPLES);
        let omega = match (lo.is_finite(), up.is_finite()) {
            (true, true) => lo + (up - lo) * u,
            (true, false) => lo + u / (T::one() - u),
            (false, true) => up - u / (T::one() - u),
            (false, false) => (u - T::lit(0.5)) / (u * (T::one() - u)),
        };
        let j = band.spectral_density(omega);
        if j < T::lit(-1e-14) || j.is_nan() {
            return Err(Error::NegativeSpectralDensity {
                omega: omega.as_f64(),
                value: j.as_f64(),
            });
        }
    }
    Ok(())
}

/// Normalised initial amplitudes `c_n` on the discrete levels.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState<T> {
    amplitudes: Vec<Cplx<T>>,
}

impl<T: Real> InitialState<T> {
    pub fn new(amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        let norm: T = amplitudes.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        if (norm - T::one()).abs() > tol {
            return Err(Error::UnnormalizedInitialState { norm: norm.as_f64() });
        }
        Ok(Self { amplitudes })
    }

    pub fn real(amplitudes: Vec<T>) -> Result<Self> {
        Self::new(amplitudes.into_iter().map(|c| Cplx::new(c, T::zero())).collect())
    }

    /// `|n⟩`, zero-based.
    pub fn level(n: usize, size: usize) -> Self {
        let mut amplitudes = vec![Cplx::new(T::zero(), T::zero()); size];
        amplitudes[n] = Cplx::new(T::one(), T::zero());
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub(crate) fn check_size(&self, n: usize) -> Result<()> {
        if self.amplitudes.len() != n {
            return Err(Error::InitialStateLength {
                got: self.amplitudes.len(),
                expected: n,
            });
        }
        Ok(())
    }
}
