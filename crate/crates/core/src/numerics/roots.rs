//! Scalar root finding on a bracket.

use crate::error::{Error, Result};

/// Newton iteration kept inside a sign-change bracket, falling back to
/// bisection whenever a step leaves the bracket or stalls.
pub fn safeguarded_newton<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    let mut x = 0.5 * (lo + hi);
    let mut last_width = (hi - lo).abs();
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let width = (hi - lo).abs();
        if width <= xtol * x.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        let inside = newton.is_finite() && (newton - lo) * (newton - hi) < 0.0;
        let step_ok = inside && (newton - x).abs() < 0.5 * last_width;
        if step_ok {
            if (newton - x).abs() <= xtol * x.abs().max(1.0) {
                return Ok(newton);
            }
            last_width = (newton - x).abs();
            x = newton;
        } else {
            last_width = width;
            x = 0.5 * (lo + hi);
        }
    }
    Ok(x)
}

/// Plain bisection; `f` only needs a reliable sign.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    let s = flo.signum();
    while (hi - lo).abs() > xtol * lo.abs().max(hi.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_cube_root() {
        let r = safeguarded_newton(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_survives_zero_derivative() {
        // f' vanishes at the midpoint of the initial bracket.
        let r = safeguarded_newton(|x| (x.powi(3) - x - 1.0, 3.0 * x * x - 1.0), 1.0 / 3f64.sqrt() - 1.0, 1.0 / 3f64.sqrt() + 1.0, 1e-14).unwrap();
        assert!((r.powi(3) - r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_matches() {
        let r = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_an_error() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }
}
