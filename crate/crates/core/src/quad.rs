//! Adaptive Simpson quadrature over a fallible integrand.
//!
//! A single engine serves every integral in the crate.  Each panel is
//! accepted when the classic Richardson estimate `|S₂ − S₁|/15` falls below
//! the tolerance allotted to the panel (halved at each subdivision, so the
//! panel errors sum to at most the requested absolute tolerance).

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Errors returned by `f` propagate; exhausting the subdivision depth
/// before meeting the tolerance yields [`Error::QuadratureFailed`].
pub(crate) fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("quadrature interval [{a}, {b}] must be finite")));
    }
    if a == b {
        return Ok(0.0);
    }
    let tol_ok = abs_tol > 0.0;
    if !tol_ok {
        return Err(Error::domain(format!("quadrature tolerance {abs_tol} must be positive")));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = midpoint(a, b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&mut f, a, b, fa, fm, fb, whole, abs_tol, 0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn midpoint(a: f64, b: f64) -> f64 {
    a + 0.5 * (b - a)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = midpoint(a, b);
    let lm = midpoint(a, m);
    let rm = midpoint(m, b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Panels narrower than a few ulps cannot be refined further; accept them.
    let width_exhausted = lm <= a || rm <= m || m <= lm || b <= rm;
    if delta.abs() <= 15.0 * tol || width_exhausted {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailed { a, b, tol });
    }
    let half = 0.5 * tol;
    let l = recurse(f, a, m, fa, flm, fm, left, half, depth + 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, half, depth + 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<F: Fn(f64) -> f64>(g: F) -> impl FnMut(f64) -> Result<f64> {
        move |x| Ok(g(x))
    }

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(ok(|x| 3.0 * x * x), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let v = adaptive_simpson(ok(|x| x.exp()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = adaptive_simpson(ok(|x| (10.0 * x).sin()), 0.0, std::f64::consts::PI, 1e-11).unwrap();
        let exact = (1.0 - (10.0 * std::f64::consts::PI).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        let v = adaptive_simpson(ok(|x| x.exp()), 3.0, 3.0, 1e-10).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn reversed_interval_is_signed() {
        let v = adaptive_simpson(ok(|x| x), 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn integrand_error_propagates() {
        let r = adaptive_simpson(|_| Err(Error::domain("boom")), 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let r = adaptive_simpson(ok(|x| x), 0.0, 1.0, 0.0);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn kink_is_resolved_adaptively() {
        let v = adaptive_simpson(ok(|x: f64| x.abs()), -1.0, 1.0, 1e-11).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }
}
