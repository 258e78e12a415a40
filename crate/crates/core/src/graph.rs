//! Directed secrecy graphs under path-loss and path-loss-plus-fading
//! propagation.
//!
//! A legitimate node `i` has a directed edge to `j` when their link
//! supports a secrecy rate of at least `gamma` against every eavesdropper.
//! At `gamma = 0` this reduces to a geometric rule: under pure path loss
//! the receiver must be no farther than the nearest eavesdropper
//! (`d_ij <= rho(i)`, ties included); under fading the legitimate received
//! power must strictly exceed the strongest eavesdropper reception
//! (`d_ij^-alpha * g_ij > T_i`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geom::{nearest_distance, GridIndex, Point2, PppSample};
use crate::rng::{pair_gain_bounded, pair_gain_exp, FADE_TAG_EAVES, FADE_TAG_LEGIT};
use crate::Result;

/// Default skip threshold for fading candidate pairs: a pair whose edge
/// would require a power gain above this is not evaluated (per-pair miss
/// probability e^-40 under unit-mean exponential fades).
pub const DEFAULT_G_CAP: f64 = 40.0;

/// Propagation model selector used by configs and bound calculators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(rename = "pathloss")]
    PathLoss,
    Fading,
}

/// Per-link fading law. `None` is the pure path-loss model; exponential
/// power gains model |h|^2 for h ~ CN(0,1); the bounded variant truncates
/// to [0, kappa] by resampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Fading {
    None,
    UnitExp,
    BoundedExp { kappa: f64 },
}

/// Propagation parameters: path-loss exponent, transmit power, secrecy-rate
/// threshold, and the fading law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub power: f64,
    pub gamma: f64,
    pub fading: Fading,
}

impl ModelParams {
    pub fn new(alpha: f64, power: f64, gamma: f64, fading: Fading) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::parameter(format!("alpha must exceed 2, got {alpha}")));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::parameter(format!("power must be positive, got {power}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::parameter(format!("gamma must be nonnegative, got {gamma}")));
        }
        if let Fading::BoundedExp { kappa } = fading {
            if !(kappa > 0.0) || !kappa.is_finite() {
                return Err(Error::parameter(format!("kappa must be positive, got {kappa}")));
            }
        }
        Ok(ModelParams { alpha, power, gamma, fading })
    }

    /// Pure path-loss model with unit power and gamma = 0.
    pub fn path_loss(alpha: f64) -> Result<Self> {
        ModelParams::new(alpha, 1.0, 0.0, Fading::None)
    }

    pub fn kind(&self) -> ModelKind {
        match self.fading {
            Fading::None => ModelKind::PathLoss,
            _ => ModelKind::Fading,
        }
    }

    /// Largest gain a single fade draw can take, used to cut off candidate
    /// enumeration. Bounded fades cap exactly at kappa; unbounded fades
    /// fall back to `g_cap`.
    fn gain_ceiling(&self, g_cap: f64) -> f64 {
        match self.fading {
            Fading::BoundedExp { kappa } => kappa.min(g_cap),
            _ => g_cap,
        }
    }

    /// Fade draw for the ordered legitimate pair (i, j).
    pub fn legit_gain(&self, fade_seed: u64, i: u32, j: u32) -> f64 {
        match self.fading {
            Fading::None => 1.0,
            Fading::UnitExp => pair_gain_exp(fade_seed, FADE_TAG_LEGIT, i, j),
            Fading::BoundedExp { kappa } => {
                pair_gain_bounded(fade_seed, FADE_TAG_LEGIT, i, j, kappa)
            }
        }
    }

    /// Fade draw for the ordered (legitimate, eavesdropper) pair (i, e).
    pub fn eaves_gain(&self, fade_seed: u64, i: u32, e: u32) -> f64 {
        match self.fading {
            Fading::None => 1.0,
            Fading::UnitExp => pair_gain_exp(fade_seed, FADE_TAG_EAVES, i, e),
            Fading::BoundedExp { kappa } => {
                pair_gain_bounded(fade_seed, FADE_TAG_EAVES, i, e, kappa)
            }
        }
    }
}

/// Secrecy rate of the link i -> j against a single eavesdropper:
/// [log2(1 + P d_ij^-a g_ij) - log2(1 + P d_ie^-a g_ie)]^+ in bits/s/Hz.
/// An infinite eavesdropper distance models the no-eavesdropper case.
pub fn secrecy_rate(
    d_ij: f64,
    d_ie: f64,
    g_ij: f64,
    g_ie: f64,
    power: f64,
    alpha: f64,
) -> Result<f64> {
    if !(d_ij > 0.0) || !(d_ie > 0.0) {
        return Err(Error::parameter(format!(
            "distances must be positive (d^-alpha singular at zero), got d_ij={d_ij}, d_ie={d_ie}"
        )));
    }
    if !(g_ij >= 0.0) || !(g_ie >= 0.0) {
        return Err(Error::parameter(format!(
            "power gains must be nonnegative, got g_ij={g_ij}, g_ie={g_ie}"
        )));
    }
    let legit = (1.0 + power * d_ij.powf(-alpha) * g_ij).log2();
    let eaves = (1.0 + power * d_ie.powf(-alpha) * g_ie).log2();
    Ok((legit - eaves).max(0.0))
}

/// Maximum radius of connectivity: distance from `node` to its nearest
/// eavesdropper, +inf when there are none.
pub fn rho(node: Point2, eaves: &PppSample, index: &GridIndex) -> Result<f64> {
    nearest_distance(node, eaves, index)
}

/// Maximum received power over all eavesdroppers, with one explicit power
/// gain per eavesdropper: max_e d_e^-alpha * g_e, or 0 when there are none.
pub fn max_eaves_power(
    node: Point2,
    eaves: &PppSample,
    fades: &[f64],
    alpha: f64,
) -> Result<f64> {
    if fades.len() != eaves.points.len() {
        return Err(Error::parameter(format!(
            "{} fades supplied for {} eavesdroppers",
            fades.len(),
            eaves.points.len()
        )));
    }
    let mut max = 0.0f64;
    for (&e, &g) in eaves.points.iter().zip(fades) {
        let d2 = node.dist_sq(e);
        if d2 == 0.0 {
            return Err(Error::parameter(
                "eavesdropper coincident with node: received power is singular".to_string(),
            ));
        }
        max = max.max(d2.powf(-alpha / 2.0) * g);
    }
    Ok(max)
}

#[inline]
fn rate_at(d: f64, gain: f64, eaves_power: f64, params: &ModelParams) -> f64 {
    let legit = (1.0 + params.power * d.powf(-params.alpha) * gain).log2();
    let eaves = (1.0 + params.power * eaves_power).log2();
    (legit - eaves).max(0.0)
}

/// Edge predicate given the source-to-target distance and the source
/// node's eavesdropper summary (rho for path loss, max received power for
/// fading).
#[inline]
pub(crate) fn edge_from_distance(
    d: f64,
    summary_i: f64,
    params: &ModelParams,
    fade_gain: f64,
) -> bool {
    match params.fading {
        Fading::None => {
            if params.gamma == 0.0 {
                d <= summary_i
            } else {
                let eaves_power =
                    if summary_i.is_finite() { summary_i.powf(-params.alpha) } else { 0.0 };
                rate_at(d, 1.0, eaves_power, params) >= params.gamma
            }
        }
        _ => {
            if params.gamma == 0.0 {
                d.powf(-params.alpha) * fade_gain > summary_i
            } else {
                rate_at(d, fade_gain, summary_i, params) >= params.gamma
            }
        }
    }
}

/// Edge predicate for the ordered pair (i, j) given the per-node
/// eavesdropper summary (rho for path loss, max received power for
/// fading) and, under fading, the pair's fade draw.
///
/// Ties follow the model definitions: `d_ij = rho(i)` is an edge,
/// a fading pair with power exactly equal to the threshold is not.
pub fn edge_exists(
    nodes: &[Point2],
    eaves_summary: &[f64],
    params: &ModelParams,
    i: usize,
    j: usize,
    fade_gain: f64,
) -> bool {
    if i == j {
        return false;
    }
    edge_from_distance(nodes[i].dist(nodes[j]), eaves_summary[i], params, fade_gain)
}

/// Directed secrecy graph over a realized pair of point patterns.
#[derive(Debug, Clone)]
pub struct SecrecyGraph {
    pub nodes: Vec<Point2>,
    pub eaves: Vec<Point2>,
    /// Per-node rho (path loss) or max received eavesdropper power (fading).
    pub eaves_summary: Vec<f64>,
    /// Sorted out-neighbor ids per node; no self-loops.
    pub adjacency: Vec<Vec<u32>>,
    pub params: ModelParams,
    pub fade_seed: u64,
}

impl SecrecyGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }
}

fn choose_cell(n: usize, area: f64, extent: f64) -> f64 {
    if n == 0 {
        return extent.max(1.0);
    }
    let cell = (area / n as f64).sqrt();
    cell.clamp(extent / 1024.0, extent.max(f64::MIN_POSITIVE))
}

/// Max received eavesdropper power for one source node, scanning outward
/// until no unseen eavesdropper could beat the running maximum. With
/// bounded fades the cutoff is exact; with unbounded fades pairs that
/// would require a gain above `g_cap` are skipped.
pub(crate) fn summary_power(
    node: Point2,
    node_id: u32,
    eaves: &[Point2],
    idx: &GridIndex,
    params: &ModelParams,
    fade_seed: u64,
    g_cap: f64,
) -> f64 {
    let ceiling = params.gain_ceiling(g_cap);
    let alpha = params.alpha;
    let t = std::cell::Cell::new(0.0f64);
    idx.scan_expanding(
        node,
        |d_min| t.get() > 0.0 && d_min > 0.0 && t.get() * d_min.powf(alpha) >= ceiling,
        |e| {
            let g = params.eaves_gain(fade_seed, node_id, e);
            let d2 = node.dist_sq(eaves[e as usize]);
            let p = d2.powf(-alpha / 2.0) * g;
            if p > t.get() {
                t.set(p);
            }
        },
    );
    t.get()
}

/// Build the directed secrecy graph. The eavesdropper window must contain
/// the legitimate window (it is the caller's job to pad it); per-pair fades
/// are pure functions of `(fade_seed, i, j)`, so construction order and
/// parallel scheduling do not affect the result.
pub fn build_graph(
    legit: &PppSample,
    eaves: &PppSample,
    params: &ModelParams,
    fade_seed: u64,
) -> Result<SecrecyGraph> {
    build_graph_with_cap(legit, eaves, params, fade_seed, DEFAULT_G_CAP)
}

/// [`build_graph`] with an explicit skip threshold for fading candidates.
pub fn build_graph_with_cap(
    legit: &PppSample,
    eaves: &PppSample,
    params: &ModelParams,
    fade_seed: u64,
    g_cap: f64,
) -> Result<SecrecyGraph> {
    if !eaves.window.contains_window(&legit.window) {
        return Err(Error::parameter(
            "eavesdropper window does not cover the legitimate window".to_string(),
        ));
    }
    if !(g_cap > 0.0) {
        return Err(Error::parameter(format!("g_cap must be positive, got {g_cap}")));
    }
    let nodes = &legit.points;
    let n = nodes.len();
    let (ex_lo, ex_hi, ey_lo, ey_hi) = eaves.window.bounds();
    let extent = (ex_hi - ex_lo).max(ey_hi - ey_lo);
    let eaves_cell = choose_cell(eaves.points.len(), eaves.window.area(), extent);
    let eaves_idx = GridIndex::build(&eaves.points, eaves_cell)?;
    for (i, &node) in nodes.iter().enumerate() {
        // Coincidences are a.s. impossible for Poisson samples; reject
        // rather than propagate a singular power.
        if eaves_idx.nearest_dist_sq(node, &eaves.points) == 0.0 {
            return Err(Error::parameter(format!(
                "eavesdropper coincident with node {i}"
            )));
        }
    }

    let eaves_summary: Vec<f64> = match params.fading {
        Fading::None => nodes
            .par_iter()
            .map(|&p| eaves_idx.nearest_dist_sq(p, &eaves.points).sqrt())
            .collect(),
        _ => nodes
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                summary_power(p, i as u32, &eaves.points, &eaves_idx, params, fade_seed, g_cap)
            })
            .collect(),
    };

    let (lx_lo, lx_hi, ly_lo, ly_hi) = legit.window.bounds();
    let legit_extent = (lx_hi - lx_lo).max(ly_hi - ly_lo);
    let legit_cell = choose_cell(n, legit.window.area(), legit_extent);
    let legit_idx = GridIndex::build(nodes, legit_cell)?;

    let two_gamma = params.gamma.exp2();
    let adjacency: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let node = nodes[i];
            let mut row = Vec::new();
            let radius = match params.fading {
                Fading::None => {
                    let rho_i = eaves_summary[i];
                    if params.gamma == 0.0 {
                        rho_i
                    } else if rho_i.is_finite() {
                        // d such that the rate against the nearest
                        // eavesdropper equals gamma; inflated to keep grid
                        // enumeration a superset of the exact predicate.
                        let need =
                            (two_gamma * (1.0 + params.power * rho_i.powf(-params.alpha)) - 1.0)
                                / params.power;
                        need.powf(-1.0 / params.alpha) * (1.0 + 1e-9)
                    } else {
                        (params.power / (two_gamma - 1.0)).powf(1.0 / params.alpha)
                            * (1.0 + 1e-9)
                    }
                }
                _ => {
                    let t_i = eaves_summary[i];
                    let t_eff = if params.gamma == 0.0 {
                        t_i
                    } else {
                        (two_gamma * (1.0 + params.power * t_i) - 1.0) / params.power
                    };
                    if t_eff <= 0.0 {
                        f64::INFINITY
                    } else {
                        (params.gain_ceiling(g_cap) / t_eff).powf(1.0 / params.alpha)
                            * (1.0 + 1e-9)
                    }
                }
            };
            legit_idx.for_each_in_disc_cells(node, radius, |j| {
                let j = j as usize;
                if j == i {
                    return;
                }
                let gain = match params.fading {
                    Fading::None => 1.0,
                    _ => {
                        // Skip pairs whose required gain exceeds the cap.
                        let d2 = node.dist_sq(nodes[j]);
                        let t_i = eaves_summary[i];
                        let required = if params.gamma == 0.0 {
                            t_i * d2.powf(params.alpha / 2.0)
                        } else {
                            (two_gamma * (1.0 + params.power * t_i) - 1.0) / params.power
                                * d2.powf(params.alpha / 2.0)
                        };
                        if required > params.gain_ceiling(g_cap) {
                            return;
                        }
                        params.legit_gain(fade_seed, i as u32, j as u32)
                    }
                };
                if edge_exists(nodes, &eaves_summary, params, i, j, gain) {
                    row.push(j as u32);
                }
            });
            row.sort_unstable();
            row
        })
        .collect();

    Ok(SecrecyGraph {
        nodes: nodes.clone(),
        eaves: eaves.points.clone(),
        eaves_summary,
        adjacency,
        params: *params,
        fade_seed,
    })
}

/// Component directionality senses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentMode {
    Out,
    In,
    Bidirectional,
    Either,
}

fn bfs(adj: &[Vec<u32>], root: u32) -> Vec<bool> {
    let mut visited = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    visited[root as usize] = true;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u as usize] {
            if !visited[v as usize] {
                visited[v as usize] = true;
                queue.push_back(v);
            }
        }
    }
    visited
}

fn reverse_adjacency(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, row) in adj.iter().enumerate() {
        for &v in row {
            rev[v as usize].push(u as u32);
        }
    }
    rev
}

/// Component of `root` in the requested sense, as a sorted id set.
/// Out is forward reachability, in is reverse reachability, bidirectional
/// is their intersection (mutual reachability), and either is reachability
/// in the symmetrized graph. The root is always a member.
pub fn component(graph: &SecrecyGraph, root: u32, mode: ComponentMode) -> Result<Vec<u32>> {
    let n = graph.nodes.len();
    if root as usize >= n {
        return Err(Error::parameter(format!(
            "root {root} outside graph of {n} nodes"
        )));
    }
    let visited = match mode {
        ComponentMode::Out => bfs(&graph.adjacency, root),
        ComponentMode::In => bfs(&reverse_adjacency(&graph.adjacency), root),
        ComponentMode::Bidirectional => {
            let out = bfs(&graph.adjacency, root);
            let inc = bfs(&reverse_adjacency(&graph.adjacency), root);
            out.iter().zip(&inc).map(|(&a, &b)| a && b).collect()
        }
        ComponentMode::Either => {
            let mut sym = graph.adjacency.clone();
            for (u, row) in reverse_adjacency(&graph.adjacency).into_iter().enumerate() {
                sym[u].extend(row);
            }
            bfs(&sym, root)
        }
    };
    Ok(visited
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(i, _)| i as u32)
        .collect())
}
