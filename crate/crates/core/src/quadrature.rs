//! Quadrature rules used by the spectral kernels.
//!
//! Two families are provided:
//!
//! * double-exponential (tanh-sinh) integration on finite and half-infinite
//!   intervals. The integrand receives the distances to both endpoints,
//!   computed without cancellation, so integrable algebraic edge
//!   singularities such as `(ω - ω_low)^(-1/2)` are resolved to full
//!   precision;
//! * adaptive 7/15-point Gauss–Kronrod for smooth integrands, and the raw
//!   Kronrod panel used by the oscillatory time integrals.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Abscissae of the 15-point Kronrod rule on `[-1, 1]` (non-negative half).
pub(crate) const KRONROD_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

pub(crate) const KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Weights of the embedded 7-point Gauss rule (nodes `KRONROD_X[1, 3, 5, 7]`).
pub(crate) const GAUSS_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const DEFAULT_T_MAX: f64 = 4.0;
const DEFAULT_MAX_LEVEL: usize = 12;

/// Tanh-sinh node at `±t`: `q` is the distance to the nearer endpoint as a
/// fraction of the width, `p = 1 - q`, and `w` the weight per half-width.
#[derive(Debug, Clone, Copy)]
struct Node {
    q: f64,
    p: f64,
    w: f64,
}

static DEFAULT_LEVELS: OnceLock<Vec<Vec<Node>>> = OnceLock::new();

/// Nodes with `t > 0` added at each level; level 0 has step 1.
fn node_levels(t_max: f64, max_level: usize) -> Vec<Vec<Node>> {
    let node = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        Node {
            q: e / (1.0 + e),
            p: 1.0 / (1.0 + e),
            // π/2 cosh t sech²u, with sech²u = 4e/(1 + e)²
            w: FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e)),
        }
    };
    (0..=max_level)
        .map(|level| {
            let h = 0.5f64.powi(level as i32);
            let stride = if level == 0 { 1 } else { 2 };
            (1..)
                .step_by(stride)
                .map(|j| j as f64 * h)
                .take_while(|t| *t <= t_max)
                .map(node)
                .collect()
        })
        .collect()
}

/// Tolerances and limits for the double-exponential rule.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_level: usize,
    /// Half-width of the truncated `t` interval.
    pub t_max: T,
}

impl<T: Real> Default for TanhSinh<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-12),
            abs_tol: T::lit(1e-15),
            max_level: DEFAULT_MAX_LEVEL,
            t_max: T::lit(DEFAULT_T_MAX),
        }
    }
}

/// Result of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

impl<T: Real> TanhSinh<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f(x, x - a, b - x)` over the finite interval `[a, b]`.
    pub fn integrate<F>(&self, a: T, b: T, mut f: F) -> Result<Estimate<T>>
    where
        F: FnMut(T, T, T) -> T,
    {
        if a == b {
            return Ok(Estimate {
                value: T::zero(),
                error: T::zero(),
            });
        }
        if b < a {
            let est = self.forward(b, a, |x, da, db| f(x, db, da))?;
            return Ok(Estimate {
                value: -est.value,
                error: est.error,
            });
        }
        self.forward(a, b, f)
    }

    fn forward<F>(&self, a: T, b: T, mut f: F) -> Result<Estimate<T>>
    where
        F: FnMut(T, T, T) -> T,
    {
        let t_max = self.t_max.as_f64();
        let local;
        let levels = if t_max == DEFAULT_T_MAX && self.max_level <= DEFAULT_MAX_LEVEL {
            DEFAULT_LEVELS.get_or_init(|| node_levels(DEFAULT_T_MAX, DEFAULT_MAX_LEVEL))
        } else {
            local = node_levels(t_max, self.max_level);
            &local
        };
        let width = b - a;
        let half_width = width / T::lit(2.0);
        let centre = f(a + half_width, half_width, half_width) * half_width * T::lit(FRAC_PI_2);
        let mut eval = |n: &Node, upper: bool| -> T {
            let (near, far) = (width * T::lit(n.q), width * T::lit(n.p));
            let (da, db) = if upper { (far, near) } else { (near, far) };
            let w = half_width * T::lit(n.w);
            if w == T::zero() || near == T::zero() {
                return T::zero();
            }
            let x = if upper { b - db } else { a + da };
            let v = f(x, da, db) * w;
            if v.is_finite() {
                v
            } else {
                T::nan()
            }
        };
        let mut level_sum = |nodes: &[Node]| {
            nodes
                .iter()
                .fold(T::zero(), |acc, n| acc + eval(n, true) + eval(n, false))
        };

        let two = T::lit(2.0);
        let mut h = T::one();
        let mut sum = centre + level_sum(&levels[0]);
        let mut previous = sum * h;
        let mut last_delta: Option<T> = None;
        for nodes in levels.iter().take(self.max_level + 1).skip(1) {
            h = h / two;
            sum = sum + level_sum(nodes);
            let current = sum * h;
            if !current.is_finite() {
                return Err(Error::QuadratureFailure {
                    estimate: f64::INFINITY,
                    target: self.rel_tol.as_f64(),
                });
            }
            let delta = (current - previous).abs();
            // the error roughly squares with each halving of h
            let err = match last_delta {
                Some(d) if d > delta => (delta * delta / d).max(T::epsilon() * current.abs()),
                _ => delta,
            };
            if err <= self.abs_tol.max(self.rel_tol * current.abs()) {
                return Ok(Estimate {
                    value: current,
                    error: err,
                });
            }
            previous = current;
            last_delta = Some(delta);
        }
        Err(Error::QuadratureFailure {
            estimate: last_delta.map_or(f64::INFINITY, |d| d.as_f64()),
            target: self.rel_tol.as_f64(),
        })
    }

    /// Integrates `f(x, x - a)` over `[a, ∞)` through `x = a + s / (1 - s)`.
    pub fn integrate_upper_infinite<F>(&self, a: T, mut f: F) -> Result<Estimate<T>>
    where
        F: FnMut(T, T) -> T,
    {
        let one = T::one();
        self.integrate(T::zero(), one, |_, s, rest| {
            let d = s / rest;
            f(a + d, d) / (rest * rest)
        })
    }

    /// Integrates `f(x, b - x)` over `(-∞, b]`.
    pub fn integrate_lower_infinite<F>(&self, b: T, mut f: F) -> Result<Estimate<T>>
    where
        F: FnMut(T, T) -> T,
    {
        self.integrate_upper_infinite(-b, |y, d| f(-y, d))
    }
}

/// One 15-point Kronrod panel with the embedded Gauss estimate.
pub fn kronrod_panel<T, F>(a: T, b: T, mut f: F) -> Estimate<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let c = (a + b) / T::lit(2.0);
    let h = (b - a) / T::lit(2.0);
    let fc = f(c);
    let mut kron = fc * T::lit(KRONROD_W[7]);
    let mut gauss = fc * T::lit(GAUSS_W[3]);
    for i in 0..7 {
        let dx = h * T::lit(KRONROD_X[i]);
        let s = f(c - dx) + f(c + dx);
        kron = kron + T::lit(KRONROD_W[i]) * s;
        if i % 2 == 1 {
            gauss = gauss + T::lit(GAUSS_W[i / 2]) * s;
        }
    }
    Estimate {
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod integration on `[a, b]`.
pub fn adaptive_kronrod<T, F>(
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    max_panels: usize,
    mut f: F,
) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let first = kronrod_panel(a, b, &mut f);
    let mut panels = vec![(a, b, first)];
    loop {
        let (value, error) = panels
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), p| (v + p.2.value, e + p.2.error));
        if !value.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: f64::INFINITY,
                target: rel_tol.as_f64(),
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate { value, error });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureFailure {
                estimate: error.as_f64(),
                target: rel_tol.as_f64(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.partial_cmp(&y.1 .2.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = (lo + hi) / T::lit(2.0);
        panels.push((lo, mid, kronrod_panel(lo, mid, &mut f)));
        panels.push((mid, hi, kronrod_panel(mid, hi, &mut f)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_polynomial() {
        let q = TanhSinh::<f64>::default();
        let est = q.integrate(0.0, 2.0, |x, _, _| x * x).unwrap();
        assert!((est.value - 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_inverse_sqrt_edges() {
        // ∫_{-1}^{1} dx / sqrt(1 - x²) = π
        let q = TanhSinh::<f64>::default();
        let est = q
            .integrate(-1.0, 1.0, |_, da, db| 1.0 / (da * db).sqrt())
            .unwrap();
        assert!((est.value - std::f64::consts::PI).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn tanh_sinh_reversed_interval() {
        let q = TanhSinh::<f64>::default();
        let est = q.integrate(1.0, 0.0, |x, _, _| x).unwrap();
        assert!((est.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn half_infinite() {
        let q = TanhSinh::<f64>::default();
        let est = q.integrate_upper_infinite(1.0, |x, _| (-x).exp()).unwrap();
        assert!((est.value - (-1.0f64).exp()).abs() < 1e-12);
        let est = q
            .integrate_lower_infinite(0.0, |x, _| 1.0 / (1.0 + x * x))
            .unwrap();
        assert!((est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn kronrod_adaptive_oscillatory() {
        let est = adaptive_kronrod(0.0, 20.0, 1e-12, 1e-14, 500, |x: f64| (5.0 * x).cos()).unwrap();
        assert!((est.value - (100.0f64).sin() / 5.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_runs() {
        let q = TanhSinh::<f32> {
            rel_tol: 1e-5,
            abs_tol: 1e-7,
            max_level: 8,
            t_max: 3.0,
        };
        let est = q.integrate(0.0, 1.0, |x, _, _| x).unwrap();
        assert!((est.value - 0.5).abs() < 1e-5);
    }
}
