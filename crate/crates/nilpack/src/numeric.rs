//! Small numeric helpers: angle wrapping, cancellation-free trig
//! quotients, and adaptive Simpson quadrature.
//!
//! The trig quotients (`sinc`, `sin_shortfall`, `cos_minus_sinc`) are the
//! building blocks of the geodesic formulas. Each switches to a truncated
//! Taylor series near zero so the composed expressions stay smooth and
//! fully accurate across the axis `w = sin(theta) -> 0`, with no separate
//! small-angle branch needed in the callers.

use std::f64::consts::{PI, TAU};

/// Wraps an angle to the half-open interval (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// sin(u)/u, with sinc(0) = 1.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

/// (u - sin u) / u^3, continued by its limit 1/6 at u = 0.
///
/// Direct evaluation loses roughly half the mantissa below |u| ~ 1e-4;
/// the series keeps full precision and the two branches agree to ~1e-14
/// at the 0.1 crossover.
pub fn sin_shortfall(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        1.0 / 6.0 - u2 / 120.0 + u2 * u2 / 5040.0 - u2 * u2 * u2 / 362_880.0
    } else {
        (u - u.sin()) / (u * u * u)
    }
}

/// cos(u) - sin(u)/u, which vanishes to second order at u = 0.
pub fn cos_minus_sinc(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        u2 * (-1.0 / 3.0 + u2 / 30.0 - u2 * u2 / 840.0 + u2 * u2 * u2 / 45_360.0)
    } else {
        u.cos() - u.sin() / u
    }
}

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance
/// `tol`, using the standard Richardson acceptance test `|S2 - S1| <=
/// 15 tol` and returning the extrapolated value.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
