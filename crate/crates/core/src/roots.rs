//! Bisection for monotone predicates.

use crate::error::{Error, Result};

/// Locates `sup { s in [lo, hi] : f(s) <= 0 }` for non-decreasing `f` with
/// `f(lo) <= 0 < f(hi)`.
///
/// Returns a point of the final bracket of width at most `tol`, placed by one
/// secant step between the bracket values.
pub fn sup_nonpositive<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut iter = 0;
    while hi - lo > tol {
        if iter == max_iter {
            return Err(Error::Bracket {
                iterations: max_iter,
                lo,
                hi,
            });
        }
        iter += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm <= 0.0 {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    if f_lo.is_finite() && f_hi.is_finite() && f_hi > f_lo {
        let x = lo + (hi - lo) * (-f_lo / (f_hi - f_lo));
        return Ok(x.clamp(lo, hi));
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots_and_jumps() {
        let x = sup_nonpositive(|x| x * x * x - 0.5, 0.0, 1.0, 1e-14, 200).unwrap();
        assert!((x - 0.5f64.cbrt()).abs() < 1e-13);
        let j = sup_nonpositive(|x| if x <= 0.3 { -1.0 } else { 2.0 }, 0.0, 1.0, 1e-12, 200).unwrap();
        assert!((j - 0.3).abs() <= 1e-12);
        assert!(matches!(
            sup_nonpositive(|x| x - 0.5, 0.0, 1.0, 1e-12, 3),
            Err(Error::Bracket { .. })
        ));
    }
}
