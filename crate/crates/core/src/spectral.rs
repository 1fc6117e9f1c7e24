//! Scalar kernels of the model: the self-energy `Σ(E)` and its derivative,
//! the in-band shift/width pair `Δ(E)`, `Γ(E)`, and the rational functions
//! `K(z) = Σ |f_n|²/(z - ε_n)` and `I(z) = Σ f_n* c_n/(z - ε_n)`.

use crate::error::{Error, Result};
use crate::model::{EdgeBehavior, InitialState, ValidatedModel};
use crate::quadrature::TanhSinh;
use crate::scalar::{real, Cplx, Real};

/// `Σ` on the real axis: a real number outside the band (or at a zero of
/// `J`), the boundary value `Δ ∓ iΓ` inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelfEnergyValue<T> {
    Real { sigma: T, derivative: Option<T> },
    Band { delta: T, gamma: T },
}

/// `K` and `K'` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFunctionValue<T> {
    pub value: Cplx<T>,
    pub derivative: Cplx<T>,
}

/// Which side of the band an edge is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandEdge {
    Low,
    Up,
}

fn zero_tolerance<T: Real>(model: &ValidatedModel<T>) -> T {
    T::lit(1e-12) * model.span()
}

fn edge_at<T: Real>(model: &ValidatedModel<T>, e: T) -> Option<BandEdge> {
    let band = model.band();
    if e == band.omega_low {
        Some(BandEdge::Low)
    } else if e == band.omega_up {
        Some(BandEdge::Up)
    } else {
        None
    }
}

fn edge_behavior<T: Real>(model: &ValidatedModel<T>, edge: BandEdge) -> EdgeBehavior<T> {
    let (lo, up) = model.band().edge_behavior();
    match edge {
        BandEdge::Low => lo,
        BandEdge::Up => up,
    }
}

/// `Σ(E) = ∫ J(ω)/(E - ω) dω` for `E` outside the band, on a band edge with
/// convergent `Σ`, or at a declared zero of `J`. Uses the model's closed
/// form when it has one.
pub fn self_energy<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    check_real_domain(model, e)?;
    if let Some(v) = model.overrides().and_then(|o| o.self_energy(e)) {
        return Ok(v);
    }
    self_energy_quadrature(model, e)
}

fn check_real_domain<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<()> {
    let band = model.band();
    if let Some(edge) = edge_at(model, e) {
        if !edge_behavior(model, edge).is_convergent() {
            return Err(Error::NonconvergentEdge { energy: e.as_f64() });
        }
    } else if band.contains(e) && !band.is_declared_zero(e, zero_tolerance(model)) {
        return Err(Error::EInsideBand { energy: e.as_f64() });
    }
    Ok(())
}

/// `Σ(E)` by quadrature only, ignoring closed forms.
pub fn self_energy_quadrature<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    check_real_domain(model, e)?;
    let band = model.band();
    band.resolvent_moment(e, 1)
}

/// `Σ'(E) = -∫ J(ω)/(E - ω)² dω`.
pub fn self_energy_derivative<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    let band = model.band();
    if let Some(edge) = edge_at(model, e) {
        // J ~ d^s makes the integrand ~ d^(s-2)
        return match edge_behavior(model, edge) {
            EdgeBehavior::PowerLaw(s) if s > T::one() => {
                band.resolvent_moment(e, 2).map(|v| -v)
            }
            _ => Err(Error::DivergentDerivative { energy: e.as_f64() }),
        };
    }
    if band.contains(e) && !band.is_declared_zero(e, zero_tolerance(model)) {
        return Err(Error::EInsideBand { energy: e.as_f64() });
    }
    if let Some(v) = model.overrides().and_then(|o| o.self_energy_derivative(e)) {
        return Ok(v);
    }
    self_energy_derivative_quadrature(model, e)
}

/// `Σ'(E)` by quadrature only.
pub fn self_energy_derivative_quadrature<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    let band = model.band();
    let v = -band.resolvent_moment(e, 2)?;
    if !v.is_finite() {
        return Err(Error::DivergentDerivative { energy: e.as_f64() });
    }
    Ok(v)
}

/// `Σ⁻¹(E)`; at a divergent band edge returns the signed limit `0∓`.
pub fn inverse_self_energy<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    if let Some(edge) = edge_at(model, e) {
        if !edge_behavior(model, edge).is_convergent() {
            return Ok(match edge {
                BandEdge::Low => -T::zero(),
                BandEdge::Up => T::zero(),
            });
        }
    }
    Ok(T::one() / self_energy(model, e)?)
}

/// `(Δ(E), Γ(E))` for `ω_low < E < ω_up`, with `Γ = πJ(E)`.
pub fn delta_gamma<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<(T, T)> {
    if !model.band().contains(e) {
        return Err(Error::EOutsideBand { energy: e.as_f64() });
    }
    if let Some(v) = model.overrides().and_then(|o| o.delta_gamma(e)) {
        return Ok(v);
    }
    delta_gamma_quadrature(model, e)
}

/// Principal value by singularity subtraction:
/// `Δ(E) = ∫ [J(ω) - J(E)]/(E - ω) dω + J(E) ln|(E - ω_low)/(ω_up - E)|`.
///
/// On a half-infinite band the subtraction is restricted to the window
/// symmetric about `E`, where the principal value of `1/(E - ω)` vanishes.
pub fn delta_gamma_quadrature<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<(T, T)> {
    let band = model.band();
    if !band.contains(e) {
        return Err(Error::EOutsideBand { energy: e.as_f64() });
    }
    let (lo, up) = (band.omega_low, band.omega_up);
    let je = band.spectral_density(e);
    let gamma = T::PI() * je;
    let q = TanhSinh::<T>::default();
    // `de = E - x`, supplied from the distance to the split point
    let subtracted = |x: T, dl: T, du: T, de: T| {
        let j = band.density_near(x, dl, du);
        if de == T::zero() {
            return T::zero();
        }
        (j - je) / de
    };
    if band.is_finite() {
        let left = q.integrate(lo, e, |x, dl, db| subtracted(x, dl, up - x, db))?;
        let right = q.integrate(e, up, |x, da, du| subtracted(x, x - lo, du, -da))?;
        let log = ((e - lo) / (up - e)).ln();
        return Ok((left.value + right.value + je * log, gamma));
    }
    let a = if lo.is_finite() && up.is_finite() {
        (e - lo).min(up - e)
    } else if lo.is_finite() {
        e - lo
    } else if up.is_finite() {
        up - e
    } else {
        T::one().max(e.abs())
    };
    let (wl, wu) = (e - a, e + a);
    let mut total = q.integrate(wl, e, |x, _, db| subtracted(x, x - lo, up - x, db))?.value
        + q.integrate(e, wu, |x, da, _| subtracted(x, x - lo, up - x, -da))?.value;
    let plain = |x: T, dl: T, du: T| band.density_near(x, dl, du) / (e - x);
    if up > wu {
        total = total
            + if up.is_finite() {
                q.integrate(wu, up, |x, _, du| plain(x, x - lo, du))?.value
            } else {
                q.integrate_upper_infinite(wu, |x, _| plain(x, x - lo, T::infinity()))?.value
            };
    }
    if lo < wl {
        total = total
            + if lo.is_finite() {
                q.integrate(lo, wl, |x, dl, _| plain(x, dl, up - x))?.value
            } else {
                q.integrate_lower_infinite(wl, |x, _| plain(x, T::infinity(), up - x))?.value
            };
    }
    Ok((total, gamma))
}

/// Full real-axis evaluation used by tabulation.
pub fn evaluate_self_energy<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<SelfEnergyValue<T>> {
    let band = model.band();
    if band.contains(e) && !band.is_declared_zero(e, zero_tolerance(model)) {
        let (delta, gamma) = delta_gamma(model, e)?;
        return Ok(SelfEnergyValue::Band { delta, gamma });
    }
    let sigma = self_energy(model, e)?;
    let derivative = self_energy_derivative(model, e).ok();
    Ok(SelfEnergyValue::Real { sigma, derivative })
}

fn check_pole<T: Real>(model: &ValidatedModel<T>, z: Cplx<T>) -> Result<()> {
    let tol = model.pole_tolerance();
    // an uncoupled level contributes nothing to K or I
    for (n, (eps, f)) in model.levels().iter().zip(model.couplings()).enumerate() {
        if f.norm_sqr() > T::zero() && (z - real(*eps)).norm() <= tol {
            return Err(Error::PoleHit {
                energy: z.re.as_f64(),
                index: n + 1,
            });
        }
    }
    Ok(())
}

/// `K(z) = Σ_n |f_n|²/(z - ε_n)`.
pub fn k_function<T: Real>(model: &ValidatedModel<T>, z: Cplx<T>) -> Result<Cplx<T>> {
    check_pole(model, z)?;
    Ok(model
        .levels()
        .iter()
        .zip(model.couplings())
        .filter(|(_, f)| f.norm_sqr() > T::zero())
        .fold(real(T::zero()), |acc, (eps, f)| acc + real(f.norm_sqr()) / (z - real(*eps))))
}

/// `K'(z) = -Σ_n |f_n|²/(z - ε_n)²`.
pub fn k_derivative<T: Real>(model: &ValidatedModel<T>, z: Cplx<T>) -> Result<Cplx<T>> {
    check_pole(model, z)?;
    Ok(model
        .levels()
        .iter()
        .zip(model.couplings())
        .filter(|(_, f)| f.norm_sqr() > T::zero())
        .fold(real(T::zero()), |acc, (eps, f)| {
            let d = z - real(*eps);
            acc - real(f.norm_sqr()) / (d * d)
        }))
}

pub fn k_value<T: Real>(model: &ValidatedModel<T>, z: Cplx<T>) -> Result<KFunctionValue<T>> {
    Ok(KFunctionValue {
        value: k_function(model, z)?,
        derivative: k_derivative(model, z)?,
    })
}

/// `K(E)` on the real axis.
pub fn k_real<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    Ok(k_function(model, real(e))?.re)
}

/// `K'(E)` on the real axis.
pub fn k_derivative_real<T: Real>(model: &ValidatedModel<T>, e: T) -> Result<T> {
    Ok(k_derivative(model, real(e))?.re)
}

/// `I(z) = Σ_n f_n* c_n/(z - ε_n)`.
pub fn i_function<T: Real>(model: &ValidatedModel<T>, initial: &InitialState<T>, z: Cplx<T>) -> Result<Cplx<T>> {
    initial.check_size(model.n_levels())?;
    check_pole(model, z)?;
    Ok(model
        .levels()
        .iter()
        .zip(model.couplings())
        .zip(initial.amplitudes())
        .filter(|((_, f), _)| f.norm_sqr() > T::zero())
        .fold(real(T::zero()), |acc, ((eps, f), c)| acc + f.conj() * *c / (z - real(*eps))))
}

/// Zeros `Ẽ_n` of `K` on the real axis, one in each `(ε_n, ε_{n+1})`.
pub fn k_zeros<T: Real>(model: &ValidatedModel<T>) -> Result<Vec<T>> {
    use crate::roots::{solve_bracketed, RootTolerance};
    let levels = model.levels();
    let tol = RootTolerance {
        x_tol: T::lit(1e-14) * model.span(),
        max_iter: 400,
    };
    let offset = T::lit(1e-12) * model.span();
    levels
        .windows(2)
        .map(|w| {
            // a level with f_n = 0 is not a pole; the sum is still monotone
            let r = solve_bracketed(|x| k_real(model, x), w[0] + offset, w[1] - offset, tol)?;
            Ok(r.x)
        })
        .collect()
}
