//! Closed-form evaluators: the nearest-eavesdropper law, the two
//! probability identities used to calibrate the Monte Carlo estimators,
//! the nu-integrals, covering constants, and the four critical-intensity
//! bound calculators.

use serde::Serialize;

use crate::error::Error;
use crate::graph::ModelKind;
use crate::Result;

pub mod covering;
pub mod quadrature;
pub mod special;

pub use covering::{covering_constants, covering_sets, Constants};
pub use quadrature::{adaptive_simpson, nu_quadrature};

use std::f64::consts::PI;

/// Distribution of the nearest-eavesdropper distance rho under intensity
/// lambda_e: pdf 2 pi lambda_e s exp(-pi lambda_e s^2).
#[derive(Debug, Clone, Copy)]
pub struct RhoLaw {
    pub lambda_e: f64,
}

pub fn rho_law(lambda_e: f64) -> Result<RhoLaw> {
    if !(lambda_e > 0.0) {
        return Err(Error::parameter(format!(
            "rho law requires positive eavesdropper intensity, got {lambda_e}"
        )));
    }
    Ok(RhoLaw { lambda_e })
}

impl RhoLaw {
    pub fn pdf(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        2.0 * PI * self.lambda_e * s * (-PI * self.lambda_e * s * s).exp()
    }

    /// P(rho > s), the void probability of the disc of radius s.
    pub fn survival(&self, s: f64) -> f64 {
        (-PI * self.lambda_e * s * s).exp()
    }

    /// E[rho^2] = 1 / (pi lambda_e).
    pub fn mean_sq(&self) -> f64 {
        1.0 / (PI * self.lambda_e)
    }

    /// Tail second moment: integral of s^2 pdf(s) from r to infinity,
    /// which evaluates to exp(-pi lambda_e r^2) (r^2 + 1/(pi lambda_e)).
    pub fn tail_sq(&self, r: f64) -> f64 {
        (-PI * self.lambda_e * r * r).exp() * (r * r + self.mean_sq())
    }
}

/// P(nearest eavesdropper closer than the nearest legitimate node outside
/// the ball of radius n1): 1 - exp(-lambda_e pi n1^2) lambda/(lambda+lambda_e).
pub fn prob_de_lt_dl_closed(lambda: f64, lambda_e: f64, n1: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !(lambda_e >= 0.0) || lambda + lambda_e <= 0.0 {
        return Err(Error::parameter(format!(
            "need nonnegative intensities with a positive sum, got lambda={lambda}, lambda_e={lambda_e}"
        )));
    }
    if !(n1 >= 0.0) {
        return Err(Error::parameter(format!("n1 must be nonnegative, got {n1}")));
    }
    Ok(1.0 - (-lambda_e * PI * n1 * n1).exp() * lambda / (lambda + lambda_e))
}

/// The excess distance X = D_l(n1) - n1 of the nearest legitimate node
/// beyond the ball of radius n1: CDF 1 - exp(-pi lambda (x^2 + 2 x n1)).
pub fn dl_excess_cdf(lambda: f64, n1: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    1.0 - (-PI * lambda * (x * x + 2.0 * x * n1)).exp()
}

/// nu and nu1 integrals: nu = pi * integral of x^(2/alpha) e^-x over
/// [0, inf), nu1 the same from n1. Evaluated through the upper
/// incomplete gamma identity nu1 = pi * Gamma(1 + 2/alpha, n1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuIntegrals {
    pub nu: f64,
    pub nu1: f64,
}

/// The integrals are finite for any alpha >= 2; the propagation model
/// itself requires alpha > 2, which `ModelParams` enforces separately.
pub fn nu_integrals(alpha: f64, n1: f64) -> Result<NuIntegrals> {
    if !(alpha >= 2.0) {
        return Err(Error::parameter(format!("alpha must be at least 2, got {alpha}")));
    }
    if !(n1 >= 0.0) {
        return Err(Error::parameter(format!("n1 must be nonnegative, got {n1}")));
    }
    let a = 1.0 + 2.0 / alpha;
    let nu = PI * special::gamma(a);
    let nu1 = PI * special::upper_gamma(a, n1)?;
    Ok(NuIntegrals { nu, nu1 })
}

/// CDFs of the marked-process maxima: Gamma is the largest power received
/// by a legitimate node beyond radius n1, Delta the largest received by
/// any eavesdropper. Both are Frechet-type with exponent delta = 2/alpha.
#[derive(Debug, Clone, Copy)]
pub struct MarkedCdfs {
    pub alpha: f64,
}

pub fn marked_cdfs(alpha: f64) -> Result<MarkedCdfs> {
    if !(alpha >= 2.0) {
        return Err(Error::parameter(format!("alpha must be at least 2, got {alpha}")));
    }
    Ok(MarkedCdfs { alpha })
}

impl MarkedCdfs {
    pub fn gamma_cdf(&self, g: f64, lambda: f64, n1: f64) -> Result<f64> {
        if !(g > 0.0) {
            return Err(Error::parameter(format!("gamma CDF requires g > 0, got {g}")));
        }
        let nu1 = nu_integrals(self.alpha, n1)?.nu1;
        Ok((-lambda * nu1 * g.powf(-2.0 / self.alpha)).exp())
    }

    pub fn delta_cdf(&self, g: f64, lambda_e: f64) -> Result<f64> {
        if !(g > 0.0) {
            return Err(Error::parameter(format!("delta CDF requires g > 0, got {g}")));
        }
        let nu = nu_integrals(self.alpha, 0.0)?.nu;
        Ok((-lambda_e * nu * g.powf(-2.0 / self.alpha)).exp())
    }
}

/// Exact CDF of the maximum received power over a Poisson process of the
/// given intensity restricted to distances beyond `n1`, with unit-mean
/// exponential marks: computed from the void probability of
/// {d > n1, g_mark d^-alpha > g}, whose mean count is
/// intensity (2 pi / alpha) g^(-2/alpha) Gamma(2/alpha, g n1^alpha).
///
/// At n1 = 0 this coincides with [`MarkedCdfs::gamma_cdf`]; for n1 > 0 the
/// nu1-based form cuts the mark tail at n1 instead of clipping the radius,
/// so the two laws differ there.
pub fn annulus_max_power_cdf(g: f64, intensity: f64, alpha: f64, n1: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::parameter(format!("CDF requires g > 0, got {g}")));
    }
    if !(alpha >= 2.0) || !(n1 >= 0.0) || !(intensity >= 0.0) {
        return Err(Error::parameter(
            "need alpha >= 2, n1 >= 0 and nonnegative intensity".to_string(),
        ));
    }
    let a = 2.0 / alpha;
    let cut = if n1 == 0.0 { 0.0 } else { g * n1.powf(alpha) };
    let mean_count = intensity * 2.0 * PI / alpha * g.powf(-a) * special::upper_gamma(a, cut)?;
    Ok((-mean_count).exp())
}

/// P(Delta > Gamma) = lambda_e nu / (lambda_e nu + lambda nu1).
pub fn prob_delta_gt_gamma_closed(
    lambda: f64,
    lambda_e: f64,
    alpha: f64,
    n1: f64,
) -> Result<f64> {
    if !(lambda >= 0.0) || !(lambda_e >= 0.0) || lambda + lambda_e <= 0.0 {
        return Err(Error::parameter(format!(
            "need nonnegative intensities with a positive sum, got lambda={lambda}, lambda_e={lambda_e}"
        )));
    }
    let NuIntegrals { nu, nu1 } = nu_integrals(alpha, n1)?;
    Ok(lambda_e * nu / (lambda_e * nu + lambda * nu1))
}

/// P(Delta > Gamma) with the exact annulus law for Gamma, by quadrature:
/// after substituting t = g^(-2/alpha), dF_Delta becomes c e^(-c t) dt
/// with c = lambda_e nu, and the integrand is smooth. Coincides with the
/// nu1 closed form at n1 = 0.
pub fn prob_delta_gt_gamma_exact(
    lambda: f64,
    lambda_e: f64,
    alpha: f64,
    n1: f64,
) -> Result<f64> {
    if !(lambda >= 0.0) || !(lambda_e > 0.0) {
        return Err(Error::parameter(
            "need nonnegative lambda and positive lambda_e".to_string(),
        ));
    }
    let c = lambda_e * nu_integrals(alpha, 0.0)?.nu;
    let integrand = move |t: f64| {
        if t <= 0.0 {
            return c;
        }
        let g = t.powf(-alpha / 2.0);
        annulus_max_power_cdf(g, lambda, alpha, n1).expect("validated") * c * (-c * t).exp()
    };
    Ok(adaptive_simpson(&integrand, 0.0, 50.0 / c, 1e-10))
}

/// Sub-critical lower bound on the critical intensity: pi lambda_e/(4 c^2)
/// for path loss, lambda_e/(4 c^2) for bounded fading.
pub fn subcritical_lower_bound(model: ModelKind, lambda_e: f64, c: f64) -> f64 {
    debug_assert!(c > 0.0 && lambda_e >= 0.0);
    match model {
        ModelKind::PathLoss => PI * lambda_e / (4.0 * c * c),
        ModelKind::Fading => lambda_e / (4.0 * c * c),
    }
}

/// Super-critical upper bound for given (epsilon, n1):
/// lambda_e/(1 - (1-eps) exp(-lambda_e pi n1^2)) for path loss,
/// lambda_e nu (1-eps)/(eps nu1) for fading.
pub fn supercritical_upper_bound(
    model: ModelKind,
    lambda_e: f64,
    epsilon: f64,
    n1: f64,
    alpha: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::parameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(lambda_e > 0.0) {
        return Err(Error::parameter(format!(
            "lambda_e must be positive, got {lambda_e}"
        )));
    }
    match model {
        ModelKind::PathLoss => {
            if !(n1 >= 1.0) || n1.fract() != 0.0 {
                return Err(Error::parameter(format!(
                    "path-loss upper bound requires integer n1 >= 1, got {n1}"
                )));
            }
            Ok(lambda_e / (1.0 - (1.0 - epsilon) * (-lambda_e * PI * n1 * n1).exp()))
        }
        ModelKind::Fading => {
            let NuIntegrals { nu, nu1 } = nu_integrals(alpha, n1)?;
            Ok(lambda_e * nu * (1.0 - epsilon) / (epsilon * nu1))
        }
    }
}

/// Interaction range under bounded fading: eta = (kappa/beta)^(1/alpha).
pub fn eta(kappa: f64, beta: f64, alpha: f64) -> f64 {
    debug_assert!(kappa > 0.0 && beta > 0.0 && alpha > 0.0);
    (kappa / beta).powf(1.0 / alpha)
}

/// All four bound values at one (epsilon, n1) point.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub lambda_e: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub n1: f64,
    pub kappa: f64,
    pub theorem1_lower: f64,
    pub theorem2_upper: f64,
    pub theorem3_lower: f64,
    pub theorem4_upper: f64,
    pub constants: Constants,
    pub nu: f64,
    pub nu1: f64,
}

pub fn bounds_report(
    lambda_e: f64,
    alpha: f64,
    kappa: f64,
    epsilon: f64,
    n1: f64,
    constants: &Constants,
) -> Result<BoundsReport> {
    let NuIntegrals { nu, nu1 } = nu_integrals(alpha, n1)?;
    Ok(BoundsReport {
        lambda_e,
        alpha,
        epsilon,
        n1,
        kappa,
        theorem1_lower: subcritical_lower_bound(ModelKind::PathLoss, lambda_e, constants.c),
        theorem2_upper: supercritical_upper_bound(
            ModelKind::PathLoss,
            lambda_e,
            epsilon,
            n1,
            alpha,
        )?,
        theorem3_lower: subcritical_lower_bound(ModelKind::Fading, lambda_e, constants.c),
        theorem4_upper: supercritical_upper_bound(
            ModelKind::Fading,
            lambda_e,
            epsilon,
            n1,
            alpha,
        )?,
        constants: *constants,
        nu,
        nu1,
    })
}

/// Outcome of checking the convergence-lemma hypotheses on sampled
/// estimates of f and g.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// f <= 1/2 on all samples with r in [1, 10].
    pub f_bound_ok: bool,
    /// g <= 1/4 on every sample.
    pub g_bound_ok: bool,
    /// f(x) <= scale * f(x/10)^2 + g(x) at every aligned pair.
    pub recursion_ok: bool,
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl ConvergenceReport {
    pub fn all_ok(&self) -> bool {
        self.f_bound_ok && self.g_bound_ok && self.recursion_ok
    }
}

/// Check the hypotheses of the recursion convergence lemma on sampled
/// values. `f_samples` and `g_samples` are (r, value) grids; `c3` scales
/// the quadratic term of the recursion, so pass 1 when the f-values are
/// already premultiplied by the constant and the covering constant when
/// they are raw path-event probabilities.
pub fn convergence_hypotheses_check(
    f_samples: &[(f64, f64)],
    g_samples: &[(f64, f64)],
    c3: f64,
) -> Result<ConvergenceReport> {
    if !(c3 > 0.0) {
        return Err(Error::parameter(format!("c3 must be positive, got {c3}")));
    }
    let mut violations = Vec::new();
    let mut f_bound_ok = true;
    for &(r, v) in f_samples {
        if (1.0..=10.0).contains(&r) && v > 0.5 {
            f_bound_ok = false;
            violations.push(format!("f({r}) = {v} exceeds 1/2"));
        }
    }
    let mut g_bound_ok = true;
    for &(r, v) in g_samples {
        if v > 0.25 {
            g_bound_ok = false;
            violations.push(format!("g({r}) = {v} exceeds 1/4"));
        }
    }
    let lookup = |grid: &[(f64, f64)], r: f64| -> Option<f64> {
        grid.iter()
            .find(|(x, _)| (x - r).abs() <= 1e-9 * r.abs().max(1.0))
            .map(|&(_, v)| v)
    };
    let mut recursion_ok = true;
    let mut pairs_checked = 0;
    for &(r, fv) in f_samples {
        if r < 10.0 {
            continue;
        }
        let inner = lookup(f_samples, r / 10.0).ok_or_else(|| {
            Error::parameter(format!(
                "misaligned grids: f sample at {r} has no partner at {}",
                r / 10.0
            ))
        })?;
        let gv = lookup(g_samples, r).ok_or_else(|| {
            Error::parameter(format!("misaligned grids: no g sample at {r}"))
        })?;
        pairs_checked += 1;
        if fv > c3 * inner * inner + gv {
            recursion_ok = false;
            violations.push(format!(
                "recursion fails at {r}: {fv} > {c3} * {inner}^2 + {gv}"
            ));
        }
    }
    Ok(ConvergenceReport { f_bound_ok, g_bound_ok, recursion_ok, pairs_checked, violations })
}
