//! The path-event and radius-event estimators.
//!
//! The path event asks whether a node of the inner box D_r reaches a node
//! of the annulus D_9r \ D_8r through edges shorter than r whose endpoints
//! all lie in D_10r. Both point processes are sampled on D_10r, which is
//! the exact dependency region of the event under path loss. The radius
//! event asks whether any node of D_mr has its nearest eavesdropper
//! farther than r.

use serde_json::json;
use std::collections::VecDeque;

use super::{count_successes, EventEstimate};
use crate::analytic::eta;
use crate::error::Error;
use crate::geom::{sample_ppp, GridIndex, Point2, Window};
use crate::graph::{edge_from_distance, summary_power, Fading, ModelParams};
use crate::rng::RngStream;
use crate::Result;

/// Success predicate of one path-event trial on realized samples: is
/// there a directed path from some node with sup-norm radius <= r to some
/// node in the (8r, 9r] annulus, using edges strictly shorter than r that
/// satisfy the model's secrecy predicate?
pub fn b_event_success(
    legit: &[Point2],
    eaves: &[Point2],
    r: f64,
    params: &ModelParams,
    fade_seed: u64,
) -> bool {
    let n = legit.len();
    if n == 0 {
        return false;
    }
    let mut sources = Vec::new();
    let mut is_target = vec![false; n];
    let mut have_target = false;
    for (i, p) in legit.iter().enumerate() {
        let c = p.cheb();
        if c <= r {
            sources.push(i as u32);
        } else if c > 8.0 * r && c <= 9.0 * r {
            is_target[i] = true;
            have_target = true;
        }
    }
    if sources.is_empty() || !have_target {
        return false;
    }

    let legit_idx = match GridIndex::build(legit, r) {
        Ok(idx) => idx,
        Err(_) => return false,
    };
    let eaves_idx = match GridIndex::build(eaves, r) {
        Ok(idx) => idx,
        Err(_) => return false,
    };

    // Per-source summary, computed lazily when a node is first expanded.
    // Path loss needs rho only up to r because edges are shorter than r.
    let summary = |i: usize| -> f64 {
        match params.fading {
            Fading::None => eaves_idx.nearest_dist_sq(legit[i], eaves).sqrt(),
            _ => summary_power(
                legit[i],
                i as u32,
                eaves,
                &eaves_idx,
                params,
                fade_seed,
                crate::graph::DEFAULT_G_CAP,
            ),
        }
    };

    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in &sources {
        if !visited[s as usize] {
            visited[s as usize] = true;
            if is_target[s as usize] {
                return true;
            }
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let u = u as usize;
        let su = summary(u);
        let pu = legit[u];
        let mut reached = false;
        legit_idx.for_each_in_disc_cells(pu, r, |v| {
            if reached {
                return;
            }
            let v = v as usize;
            if visited[v] || v == u {
                return;
            }
            let d = pu.dist(legit[v]);
            if d >= r {
                return;
            }
            let gain = params.legit_gain(fade_seed, u as u32, v as u32);
            if edge_from_distance(d, su, params, gain) {
                visited[v] = true;
                if is_target[v] {
                    reached = true;
                    return;
                }
                queue.push_back(v as u32);
            }
        });
        if reached {
            return true;
        }
    }
    false
}

/// Estimate the path-event probability P(B(0, r)).
pub fn estimate_event_b(
    lambda: f64,
    lambda_e: f64,
    r: f64,
    params: &ModelParams,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::parameter(format!("r must be positive, got {r}")));
    }
    if trials == 0 {
        return Err(Error::parameter("need at least one trial".to_string()));
    }
    if !(lambda >= 0.0) || !(lambda_e >= 0.0) {
        return Err(Error::parameter("intensities must be nonnegative".to_string()));
    }
    let window = Window::square(10.0 * r)?;
    let root = RngStream::new(seed);
    let params = *params;
    let successes = count_successes(trials, root, move |s| {
        let legit = sample_ppp(lambda, window, &s.substream(0)).expect("validated");
        if legit.points.is_empty() {
            return false;
        }
        let eaves = sample_ppp(lambda_e, window, &s.substream(1)).expect("validated");
        b_event_success(&legit.points, &eaves.points, r, &params, s.substream(2).key())
    });
    EventEstimate::from_counts(
        successes,
        trials,
        seed,
        json!({
            "event": "B",
            "lambda": lambda,
            "lambda_e": lambda_e,
            "r": r,
            "model": params,
        }),
    )
}

/// Pad tolerance for the radius event; the pad is widened to at least r
/// so the per-node test "no eavesdropper within r" is exact.
const A_EVENT_PAD_TOL: f64 = 1e-4;

/// Estimate P(A_{D_mr}(r)^c): some node of D_mr has its nearest
/// eavesdropper beyond r.
pub fn estimate_event_a_complement(
    lambda: f64,
    lambda_e: f64,
    m: u32,
    r: f64,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    if !(1..=100).contains(&m) {
        return Err(Error::parameter(format!("m must lie in 1..=100, got {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::parameter(format!("r must be positive, got {r}")));
    }
    if trials == 0 {
        return Err(Error::parameter("need at least one trial".to_string()));
    }
    if !(lambda >= 0.0) || !(lambda_e >= 0.0) {
        return Err(Error::parameter("intensities must be nonnegative".to_string()));
    }
    let half = m as f64 * r;
    let window = Window::square(half)?;
    let expected_nodes = lambda * window.area();
    let pad = if lambda_e > 0.0 {
        crate::geom::pad_width(lambda_e, A_EVENT_PAD_TOL, expected_nodes.max(1.0))?.max(r)
    } else {
        r
    };
    let eaves_window = window.padded(pad);
    let root = RngStream::new(seed);
    let successes = count_successes(trials, root, move |s| {
        let legit = sample_ppp(lambda, window, &s.substream(0)).expect("validated");
        if legit.points.is_empty() {
            return false;
        }
        let eaves = sample_ppp(lambda_e, eaves_window, &s.substream(1)).expect("validated");
        let idx = match GridIndex::build(&eaves.points, r) {
            Ok(idx) => idx,
            Err(_) => return false,
        };
        let r_sq = r * r;
        legit.points.iter().any(|&p| {
            // rho(p) > r iff no eavesdropper within distance r.
            let mut blocked = false;
            idx.for_each_in_disc_cells(p, r, |e| {
                if !blocked && p.dist_sq(eaves.points[e as usize]) <= r_sq {
                    blocked = true;
                }
            });
            !blocked
        })
    });
    EventEstimate::from_counts(
        successes,
        trials,
        seed,
        json!({
            "event": "Ac",
            "lambda": lambda,
            "lambda_e": lambda_e,
            "m": m,
            "r": r,
        }),
    )
}

/// Fading-regime events: the complement of the power-threshold event G,
/// and the path event Q at scale eta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingEventKind {
    GComplement,
    Q,
}

/// Estimate the bounded-fading events. `GComplement` succeeds when some
/// node of D_10eta delivers at most beta to every eavesdropper; `Q` is the
/// path event with edge lengths below eta and fading edges.
pub fn estimate_fading_events(
    kind: FadingEventKind,
    lambda: f64,
    lambda_e: f64,
    beta: f64,
    kappa: f64,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    if !(beta > 0.0) {
        return Err(Error::parameter(format!("beta must be positive, got {beta}")));
    }
    if trials == 0 {
        return Err(Error::parameter("need at least one trial".to_string()));
    }
    if !(lambda >= 0.0) || !(lambda_e >= 0.0) {
        return Err(Error::parameter("intensities must be nonnegative".to_string()));
    }
    let params = ModelParams::new(alpha, 1.0, 0.0, Fading::BoundedExp { kappa })?;
    let scale = eta(kappa, beta, alpha);
    let window = Window::square(10.0 * scale)?;
    let root = RngStream::new(seed);
    let successes = match kind {
        FadingEventKind::Q => count_successes(trials, root, move |s| {
            let legit = sample_ppp(lambda, window, &s.substream(0)).expect("validated");
            if legit.points.is_empty() {
                return false;
            }
            let eaves = sample_ppp(lambda_e, window, &s.substream(1)).expect("validated");
            b_event_success(&legit.points, &eaves.points, scale, &params, s.substream(2).key())
        }),
        FadingEventKind::GComplement => {
            // Bounded gains make the threshold test exactly local: an
            // eavesdropper farther than eta cannot receive more than beta,
            // so padding the window by eta removes all truncation error.
            let eaves_window = window.padded(scale);
            count_successes(trials, root, move |s| {
                let legit = sample_ppp(lambda, window, &s.substream(0)).expect("validated");
                if legit.points.is_empty() {
                    return false;
                }
                let eaves =
                    sample_ppp(lambda_e, eaves_window, &s.substream(1)).expect("validated");
                let idx = match GridIndex::build(&eaves.points, scale.max(1e-9)) {
                    Ok(idx) => idx,
                    Err(_) => return false,
                };
                let fade_seed = s.substream(2).key();
                legit.points.iter().enumerate().any(|(i, &p)| {
                    let t = summary_power(
                        p,
                        i as u32,
                        &eaves.points,
                        &idx,
                        &params,
                        fade_seed,
                        f64::INFINITY,
                    );
                    t <= beta
                })
            })
        }
    };
    EventEstimate::from_counts(
        successes,
        trials,
        seed,
        json!({
            "event": match kind { FadingEventKind::GComplement => "Gc", FadingEventKind::Q => "Q" },
            "lambda": lambda,
            "lambda_e": lambda_e,
            "beta": beta,
            "kappa": kappa,
            "alpha": alpha,
            "eta": scale,
        }),
    )
}
