//! Monte Carlo estimation of the percolation events and probability
//! identities, plus the critical-ratio search.
//!
//! Every estimator is a pure function of its parameters and a 64-bit
//! seed: trial `t` draws from substream `(seed, t)`, success counting is
//! integer addition, and floating-point reductions happen sequentially
//! over an index-ordered buffer, so results are identical for one worker
//! and N workers.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::rng::RngStream;
use crate::Result;

mod events;
mod moments;
mod spanning;

pub use events::{
    b_event_success, estimate_event_a_complement, estimate_event_b, estimate_fading_events,
    FadingEventKind,
};
pub use moments::{
    check_recursion_inequality, delta_gamma_r_max_rule, estimate_mean_rho_sq,
    estimate_prob_de_lt_dl, estimate_prob_delta_gt_gamma, recursion_satisfied, sample_dl_excess,
    sample_gamma_delta, sample_rho, MomentEstimate, RecursionCheck,
};
pub use spanning::{
    estimate_lambda_c, estimate_spanning, CurvePoint, LambdaCEstimate, SpanningMode,
    WindowCrossing,
};

/// Normal quantile backing the 95% intervals.
pub const Z95: f64 = 1.96;

/// Wilson score interval for a binomial proportion; well behaved at the
/// endpoints and always contained in [0, 1].
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::parameter("Wilson interval needs at least one trial".to_string()));
    }
    if successes > trials {
        return Err(Error::parameter(format!(
            "successes {successes} exceed trials {trials}"
        )));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// A Bernoulli Monte Carlo estimate with its 95% Wilson interval and the
/// parameter record that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct EventEstimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub params_echo: serde_json::Value,
}

impl EventEstimate {
    pub fn from_counts(
        successes: u64,
        trials: u64,
        seed: u64,
        params_echo: serde_json::Value,
    ) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95)?;
        Ok(EventEstimate {
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            seed,
            params_echo,
        })
    }

    /// Binomial standard error at the point estimate.
    pub fn se(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }
}

/// Run independent Bernoulli trials over per-trial substreams; the count
/// is order-insensitive.
pub(crate) fn count_successes<F>(trials: u64, root: RngStream, trial: F) -> u64
where
    F: Fn(RngStream) -> bool + Sync,
{
    (0..trials)
        .into_par_iter()
        .filter(|&t| trial(root.substream(t)))
        .count() as u64
}

/// Evaluate one value per trial into an index-ordered buffer; callers
/// reduce sequentially so float results stay worker-count independent.
pub(crate) fn collect_values<F>(trials: u64, root: RngStream, trial: F) -> Vec<f64>
where
    F: Fn(RngStream) -> f64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| trial(root.substream(t)))
        .collect()
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
pub fn ks_distance(values: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}
