//! Adaptive Simpson quadrature. Serves as the second, independent route
//! for every integral that also has a gamma-function evaluation.

/// Integrate `f` on [a, b] to absolute tolerance `tol`. The interval is
/// pre-split into 16 panels so that integrands concentrated in a narrow
/// region cannot hide from the initial probe points.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 16;
    let width = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let lo = a + i as f64 * width;
        let hi = lo + width;
        let flo = f(lo);
        let fhi = f(hi);
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += simpson_step(f, lo, hi, flo, fhi, fm, whole, tol / PANELS as f64, 56);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, fm, flm, left, tol * 0.5, depth - 1)
            + simpson_step(f, m, b, fm, fb, frm, right, tol * 0.5, depth - 1)
    }
}

/// Quadrature route for the nu-integral: pi times the integral of
/// x^(2/alpha) e^-x from n1 to infinity. Substituting x = u^3 removes the
/// derivative singularity at the origin; the tail is truncated where
/// e^-x is below 1e-26 relative to the head.
pub fn nu_quadrature(alpha: f64, n1: f64) -> f64 {
    let p = 2.0 / alpha;
    let g = |u: f64| 3.0 * u.powf(3.0 * p + 2.0) * (-u.powi(3)).exp();
    let a = n1.max(0.0).cbrt();
    let b = (n1.max(0.0) + 70.0).cbrt();
    std::f64::consts::PI * adaptive_simpson(&g, a, b, 1e-14)
}
