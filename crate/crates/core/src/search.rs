//! One-dimensional search primitives shared by the solvers.

use crate::error::{Error, Result};

/// Result of a scalar search.
#[derive(Debug, Clone, Copy)]
pub struct Scalar {
    pub x: f64,
    pub iterations: usize,
    /// Final bracket width.
    pub width: f64,
}

/// Bisection on a function that changes sign once on `[lo, hi]`.
///
/// The sign at `lo` is sampled once and tracked; whichever end keeps that sign
/// moves. Stops when the bracket is narrower than `rel_tol * max(|lo|, |hi|)`
/// (or `abs_floor`).
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64, abs_floor: f64, max_iter: usize) -> Result<Scalar>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(Scalar { x: lo, iterations: 0, width: hi - lo });
    }
    let lo_positive = f_lo > 0.0;
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        let width = hi - lo;
        if width <= (rel_tol * lo.abs().max(hi.abs())).max(abs_floor) || mid <= lo || mid >= hi {
            return Ok(Scalar { x: mid, iterations: it, width });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Scalar { x: mid, iterations: it, width: 0.0 });
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence { iterations: max_iter, residual: hi - lo })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
///
/// Returns the best point seen, which may be an endpoint.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<(Scalar, f64)>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let fa = f(a);
    let fb = f(b);
    let mut iterations = 0;
    while (b - a) > tol {
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::Convergence { iterations: max_iter, residual: b - a });
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = (c, fc);
    for cand in [(d, fd), (lo, fa), (hi, fb)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok((Scalar { x: best.0, iterations, width: b - a }, best.1))
}
