//! Dense complex solves for the small systems that appear per energy node.

use crate::scalar::{real, Cplx, Real};

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// `a` is row-major `n × n`. Returns `None` for a numerically singular matrix.
pub(crate) fn solve<T: Real>(mut a: Vec<Cplx<T>>, mut b: Vec<Cplx<T>>) -> Option<Vec<Cplx<T>>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    if scale == T::zero() {
        return None;
    }
    let tiny = scale * T::epsilon() * T::count(n);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= tiny {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / d;
            if factor == real(T::zero()) {
                continue;
            }
            for j in col..n {
                let v = a[col * n + j];
                a[r * n + j] = a[r * n + j] - factor * v;
            }
            let v = b[col];
            b[r] = b[r] - factor * v;
        }
    }
    let mut x = vec![real(T::zero()); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for j in r + 1..n {
            s = s - a[r * n + j] * x[j];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}
