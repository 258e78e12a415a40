//! Finite-window percolation proxy and the critical-ratio search.
//!
//! The unbounded-component event has no finite-window analogue, so the
//! standard surrogate is used: a left-right crossing between margin
//! strips of the sampling box. The critical ratio lambda/lambda_e is then
//! located by bisection on the 0.5-crossing of the spanning probability.

use serde::Serialize;
use serde_json::json;
use std::collections::VecDeque;

use super::{count_successes, EventEstimate};
use crate::error::Error;
use crate::geom::{pad_width, sample_ppp, Window};
use crate::graph::{build_graph, ModelParams, SecrecyGraph};
use crate::rng::RngStream;
use crate::Result;

/// Crossing sense: forward-directed reachability from the left strip, or
/// reachability in the symmetrized graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanningMode {
    Directed,
    Either,
}

const SPANNING_PAD_TOL: f64 = 1e-4;

fn spanning_success(graph: &SecrecyGraph, half: f64, margin: f64, mode: SpanningMode) -> bool {
    let n = graph.nodes.len();
    if n == 0 {
        return false;
    }
    let mut left = Vec::new();
    let mut right = vec![false; n];
    let mut have_right = false;
    for (i, p) in graph.nodes.iter().enumerate() {
        if p.x < -half + margin {
            left.push(i as u32);
        }
        if p.x > half - margin {
            right[i] = true;
            have_right = true;
        }
    }
    if left.is_empty() || !have_right {
        return false;
    }
    let adjacency: Vec<Vec<u32>> = match mode {
        SpanningMode::Directed => graph.adjacency.clone(),
        SpanningMode::Either => {
            let mut sym = graph.adjacency.clone();
            for (u, row) in graph.adjacency.iter().enumerate() {
                for &v in row {
                    sym[v as usize].push(u as u32);
                }
            }
            sym
        }
    };
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in &left {
        if !visited[s as usize] {
            visited[s as usize] = true;
            if right[s as usize] {
                return true;
            }
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u as usize] {
            if !visited[v as usize] {
                visited[v as usize] = true;
                if right[v as usize] {
                    return true;
                }
                queue.push_back(v);
            }
        }
    }
    false
}

/// Probability that a path connects the left margin strip of [-L, L]^2 to
/// the right one.
pub fn estimate_spanning(
    lambda: f64,
    lambda_e: f64,
    l: f64,
    margin: f64,
    params: &ModelParams,
    mode: SpanningMode,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    if !(l > 0.0) {
        return Err(Error::parameter(format!("window half-width must be positive, got {l}")));
    }
    if !(margin > 0.0 && margin < l / 4.0) {
        return Err(Error::parameter(format!(
            "margin must lie in (0, L/4), got {margin} for L = {l}"
        )));
    }
    if trials == 0 {
        return Err(Error::parameter("need at least one trial".to_string()));
    }
    if !(lambda >= 0.0) || !(lambda_e >= 0.0) {
        return Err(Error::parameter("intensities must be nonnegative".to_string()));
    }
    let window = Window::square(l)?;
    let eaves_window = if lambda_e > 0.0 {
        let expected = (lambda * window.area()).max(1.0);
        window.padded(pad_width(lambda_e, SPANNING_PAD_TOL, expected)?)
    } else {
        window
    };
    let params = *params;
    let successes = count_successes(trials, RngStream::new(seed), move |s| {
        let legit = sample_ppp(lambda, window, &s.substream(0)).expect("validated");
        if legit.points.is_empty() {
            return false;
        }
        let eaves = sample_ppp(lambda_e, eaves_window, &s.substream(1)).expect("validated");
        let graph = build_graph(&legit, &eaves, &params, s.substream(2).key())
            .expect("windows are consistent by construction");
        spanning_success(&graph, l, margin, mode)
    });
    EventEstimate::from_counts(
        successes,
        trials,
        seed,
        json!({
            "event": "spanning",
            "lambda": lambda,
            "lambda_e": lambda_e,
            "L": l,
            "margin": margin,
            "mode": mode,
            "model": params,
        }),
    )
}

/// One evaluated point of the spanning curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub window_halfwidth: f64,
    pub ratio: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Located 0.5-crossing for one window size.
#[derive(Debug, Clone, Serialize)]
pub struct WindowCrossing {
    pub window_halfwidth: f64,
    pub ratio: f64,
    pub bracket: (f64, f64),
}

/// Critical-ratio estimate: the spanning curve per window, the located
/// crossings, and the point estimate with a conservative interval from
/// the bisection bracket plus binomial error.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaCEstimate {
    pub lambda_e: f64,
    pub ratio_hat: f64,
    pub ratio_ci: (f64, f64),
    pub window_halfwidths: Vec<f64>,
    pub spanning_curve: Vec<CurvePoint>,
    pub crossings: Vec<WindowCrossing>,
    pub trials_per_point: u64,
    pub seed: u64,
}

/// Bisection on lambda/lambda_e for the 0.5-crossing of the directed
/// spanning probability. The bracket must straddle 0.5 at the largest
/// window; finite-size drift across windows is reported, not corrected.
#[allow(clippy::too_many_arguments)]
pub fn estimate_lambda_c(
    lambda_e: f64,
    params: &ModelParams,
    l_list: &[f64],
    margin: f64,
    trials: u64,
    ratio_bracket: (f64, f64),
    tol: f64,
    seed: u64,
) -> Result<LambdaCEstimate> {
    if !(lambda_e > 0.0) {
        return Err(Error::parameter(format!("lambda_e must be positive, got {lambda_e}")));
    }
    if l_list.is_empty() {
        return Err(Error::parameter("need at least one window size".to_string()));
    }
    let (lo0, hi0) = ratio_bracket;
    if !(lo0 > 0.0 && hi0 > lo0) {
        return Err(Error::parameter(format!(
            "ratio bracket must satisfy 0 < lo < hi, got ({lo0}, {hi0})"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::parameter(format!("tol must be positive, got {tol}")));
    }
    let mut windows = l_list.to_vec();
    windows.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let root = RngStream::new(seed);

    let mut curve = Vec::new();
    let mut crossings = Vec::new();
    let mut largest: Option<(Vec<CurvePoint>, (f64, f64))> = None;

    for (w_idx, &l) in windows.iter().enumerate() {
        let mut eval_idx = 0u64;
        let mut points: Vec<CurvePoint> = Vec::new();
        let mut eval = |ratio: f64, points: &mut Vec<CurvePoint>| -> Result<f64> {
            let est = estimate_spanning(
                ratio * lambda_e,
                lambda_e,
                l,
                margin,
                params,
                SpanningMode::Directed,
                trials,
                root.substream(w_idx as u64).substream(eval_idx).key(),
            )?;
            eval_idx += 1;
            points.push(CurvePoint {
                window_halfwidth: l,
                ratio,
                trials: est.trials,
                successes: est.successes,
                p_hat: est.p_hat,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
            });
            Ok(est.p_hat)
        };

        let p_lo = eval(lo0, &mut points)?;
        let p_hi = eval(hi0, &mut points)?;
        let is_largest = w_idx == windows.len() - 1;
        if !(p_lo < 0.5 && p_hi > 0.5) {
            if is_largest {
                return Err(Error::bracket(format!(
                    "spanning bracket does not straddle 0.5 at L = {l}: p({lo0}) = {p_lo}, p({hi0}) = {p_hi}"
                )));
            }
            // Smaller windows report their curve without a crossing.
            points.sort_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap());
            curve.extend(points);
            continue;
        }
        let (mut lo, mut hi) = (lo0, hi0);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let p_mid = eval(mid, &mut points)?;
            if p_mid < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossings.push(WindowCrossing {
            window_halfwidth: l,
            ratio: 0.5 * (lo + hi),
            bracket: (lo, hi),
        });
        points.sort_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap());
        if is_largest {
            largest = Some((points.clone(), (lo, hi)));
        }
        curve.extend(points);
    }

    let (largest_points, final_bracket) = largest.expect("largest window either crossed or errored");
    let ratio_hat = 0.5 * (final_bracket.0 + final_bracket.1);
    // Conservative interval: widest evaluated ratios still statistically
    // consistent with being on the far side of 0.5.
    let mut ci_lo = lo0;
    let mut ci_hi = hi0;
    for p in &largest_points {
        if p.ci_high < 0.5 && p.ratio > ci_lo {
            ci_lo = p.ratio;
        }
        if p.ci_low > 0.5 && p.ratio < ci_hi {
            ci_hi = p.ratio;
        }
    }
    Ok(LambdaCEstimate {
        lambda_e,
        ratio_hat,
        ratio_ci: (ci_lo, ci_hi),
        window_halfwidths: windows,
        spanning_curve: curve,
        crossings,
        trials_per_point: trials,
        seed,
    })
}
