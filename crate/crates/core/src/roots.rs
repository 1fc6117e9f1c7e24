//! Bracketed root finding for monotone branches.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stopping rule for [`solve_bracketed`].
#[derive(Debug, Clone, Copy)]
pub struct RootTolerance<T> {
    /// Absolute bracket width at which the search stops.
    pub x_tol: T,
    pub max_iter: usize,
}

/// A root located inside a sign-changing bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub residual: T,
    pub iterations: usize,
}

/// Finds a root of `f` in `[a, b]` where `f(a)` and `f(b)` have opposite signs.
///
/// Bisection shrinks the bracket by a factor 1e3, then a secant step is
/// taken whenever it lands strictly inside the current bracket and shrinks
/// it fast enough; otherwise the step falls back to bisection.
pub fn solve_bracketed<T, F>(mut f: F, a: T, b: T, tol: RootTolerance<T>) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if f_lo == T::zero() {
        return Ok(Root { x: lo, residual: f_lo, iterations: 0 });
    }
    if f_hi == T::zero() {
        return Ok(Root { x: hi, residual: f_hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() && !f_hi.is_finite() {
        return Err(Error::RootNotFound {
            trace: format!(
                "no sign change on [{:e}, {:e}]: f = ({:e}, {:e})",
                lo.as_f64(),
                hi.as_f64(),
                f_lo.as_f64(),
                f_hi.as_f64()
            ),
        });
    }
    let two = T::lit(2.0);
    let coarse = (hi - lo) * T::lit(1e-3);
    let mut iterations = 0;
    while hi - lo > tol.x_tol && iterations < tol.max_iter {
        iterations += 1;
        let width = hi - lo;
        let mid = lo + width / two;
        let mut x = mid;
        if width < coarse && f_lo.is_finite() && f_hi.is_finite() {
            let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
            let margin = width * T::lit(1e-3);
            if secant > lo + margin.min(tol.x_tol) && secant < hi - margin.min(tol.x_tol) {
                x = secant;
            }
        }
        if x <= lo || x >= hi {
            break;
        }
        let fx = f(x)?;
        if fx == T::zero() {
            return Ok(Root { x, residual: fx, iterations });
        }
        let before = hi - lo;
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        // secant stagnating on one side: force a bisection next
        if x != mid && hi - lo > before / two {
            let m = lo + (hi - lo) / two;
            if m > lo && m < hi {
                let fm = f(m)?;
                if fm.signum() == f_lo.signum() {
                    lo = m;
                    f_lo = fm;
                } else {
                    hi = m;
                    f_hi = fm;
                }
            }
        }
    }
    if hi - lo > tol.x_tol && iterations >= tol.max_iter {
        return Err(Error::RootNotFound {
            trace: format!(
                "iteration limit with bracket [{:e}, {:e}]",
                lo.as_f64(),
                hi.as_f64()
            ),
        });
    }
    let (x, residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    Ok(Root { x, residual, iterations })
}
