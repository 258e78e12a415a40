//! Acceptance suite: every release gate runs here, one test per
//! criterion, each printing a single PASS/FAIL line (visible with
//! `--nocapture` and in failure output).
//!
//! Two clauses are expected to fail and are left red on purpose; their
//! tests print the full diagnosis. See the criterion 4 and criterion 11
//! test bodies: in both cases the tool's measurement is cross-validated
//! by an independent route and the interval the published formulas
//! predict is what disagrees.

use std::time::Instant;

use secperc_core::analytic::{
    covering_constants, dl_excess_cdf, marked_cdfs, nu_integrals, nu_quadrature,
    prob_de_lt_dl_closed, prob_delta_gt_gamma_closed, prob_delta_gt_gamma_exact,
    subcritical_lower_bound, supercritical_upper_bound,
};
use secperc_core::estimators::{
    check_recursion_inequality, delta_gamma_r_max_rule, estimate_event_b, estimate_lambda_c,
    estimate_mean_rho_sq, estimate_prob_de_lt_dl, estimate_prob_delta_gt_gamma, ks_distance,
    sample_dl_excess, sample_gamma_delta,
};
use secperc_core::geom::{sample_ppp, Point2, PppSample, Window};
use secperc_core::graph::{
    build_graph, component, edge_exists, ComponentMode, Fading, ModelKind, ModelParams,
};
use secperc_core::RngStream;

fn report(name: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

#[test]
fn acceptance_01_nearest_eavesdropper_moment() {
    let start = Instant::now();
    let est = estimate_mean_rho_sq(1.0, 100_000, 101).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let target = 1.0 / std::f64::consts::PI;
    let within = (est.mean - target).abs() <= 3.0 * est.se;
    let fast = elapsed < 5.0;
    let pass = report(
        "criterion 1",
        within && fast,
        &format!(
            "mean rho^2 = {:.6} vs 1/pi = {target:.6} (3 SE = {:.6}), {elapsed:.2} s",
            est.mean,
            3.0 * est.se
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_02_distance_race_closed_form() {
    let start = Instant::now();
    let closed = prob_de_lt_dl_closed(1.0, 0.5, 1.0).unwrap();
    let est = estimate_prob_de_lt_dl(1.0, 0.5, 1.0, 100_000, 102).unwrap();
    let sym = estimate_prob_de_lt_dl(1.0, 1.0, 0.0, 100_000, 103).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let closed_ok = (closed - 0.861413).abs() < 1e-6;
    let mc_ok = (est.p_hat - closed).abs() <= 3.0 * est.se();
    let sym_ok = (sym.p_hat - 0.5).abs() <= 3.0 * sym.se();
    let fast = elapsed < 20.0;
    let pass = report(
        "criterion 2",
        closed_ok && mc_ok && sym_ok && fast,
        &format!(
            "closed {closed:.6}, MC {:.6} (3 SE {:.4}); symmetric MC {:.4}; {elapsed:.2} s",
            est.p_hat,
            3.0 * est.se(),
            sym.p_hat
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_03_excess_distance_distribution() {
    let (lambda, n1) = (1.0, 1.0);
    let mut excess = sample_dl_excess(lambda, n1, 10_000, 104).unwrap();
    let d = ks_distance(&mut excess, |x| dl_excess_cdf(lambda, n1, x));
    let pass = report(
        "criterion 3",
        d < 0.02,
        &format!("KS distance of D_l - n1 to its closed CDF: {d:.4} (< 0.02)"),
    );
    assert!(pass);
}

#[test]
fn acceptance_04_power_race_closed_form() {
    let (lambda, lambda_e, alpha, n1) = (1.0, 1.0, 4.0, 1.0);
    let start = Instant::now();
    let closed = prob_delta_gt_gamma_closed(lambda, lambda_e, alpha, n1).unwrap();
    let exact = prob_delta_gt_gamma_exact(lambda, lambda_e, alpha, n1).unwrap();
    let r_max = delta_gamma_r_max_rule(lambda, lambda_e, alpha, n1, 1e-4).unwrap();
    let est =
        estimate_prob_delta_gt_gamma(lambda, lambda_e, alpha, n1, r_max, 100_000, 105).unwrap();
    let pairs = sample_gamma_delta(lambda, lambda_e, alpha, n1, r_max, 10_000, 106).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let cdfs = marked_cdfs(alpha).unwrap();
    let mut deltas: Vec<f64> = pairs.iter().map(|&(_, d)| d).filter(|&d| d > 0.0).collect();
    let delta_ks = ks_distance(&mut deltas, |g| cdfs.delta_cdf(g, lambda_e).unwrap());
    let mut gammas: Vec<f64> = pairs.iter().map(|&(g, _)| g).filter(|&g| g > 0.0).collect();
    let gamma_ks = ks_distance(&mut gammas, |g| cdfs.gamma_cdf(g, lambda, n1).unwrap());

    let closed_value_ok = (closed - 0.63598).abs() < 5e-5;
    let mc_matches_closed = (est.p_hat - closed).abs() <= 0.01;
    let delta_ks_ok = delta_ks < 0.02;
    let gamma_ks_ok = gamma_ks < 0.02;
    let fast = elapsed < 60.0;
    let mc_matches_exact = (est.p_hat - exact).abs() <= 3.0 * est.se() + 1e-3;

    println!(
        "  criterion 4 diagnosis: nu1 closed form {closed:.5}; exact annulus law {exact:.5}; \
         MC {:.5} +- {:.5}; MC-vs-exact agreement {}; Delta KS {delta_ks:.4}; Gamma KS vs nu1 \
         law {gamma_ks:.4} (the nu1 law cuts the mark tail instead of clipping the radius, \
         so it only describes the sampled maximum at n1 = 0)",
        est.p_hat,
        est.se(),
        if mc_matches_exact { "PASS" } else { "FAIL" },
    );
    let pass = report(
        "criterion 4",
        closed_value_ok && mc_matches_closed && delta_ks_ok && gamma_ks_ok && fast,
        &format!(
            "closed-form value {} | MC within 0.01 of closed form {} | Delta KS {} | Gamma KS {} | {elapsed:.1} s",
            if closed_value_ok { "ok" } else { "bad" },
            if mc_matches_closed { "ok" } else { "VIOLATED" },
            if delta_ks_ok { "ok" } else { "VIOLATED" },
            if gamma_ks_ok { "ok" } else { "VIOLATED" },
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_05_nu_integral_identity() {
    let mut max_rel = 0.0f64;
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        for n1 in [0.0, 1.0, 5.0] {
            let gamma_route = nu_integrals(alpha, n1).unwrap().nu1;
            let quad_route = nu_quadrature(alpha, n1);
            max_rel = max_rel.max((gamma_route - quad_route).abs() / gamma_route);
        }
    }
    let nu4 = nu_integrals(4.0, 0.0).unwrap().nu;
    let value_ok = (nu4 - 2.784164).abs() < 1e-6;
    let pass = report(
        "criterion 5",
        max_rel < 1e-10 && value_ok,
        &format!("max relative gap over the grid {max_rel:.2e} (< 1e-10); nu(4, 0) = {nu4:.6}"),
    );
    assert!(pass);
}

#[test]
fn acceptance_06_covering_constants() {
    let c = covering_constants().unwrap();
    let product_ok = c.c3 == (c.k_count * c.l_count) as f64;
    let max_ok = c.c == 400f64.max(400.0).max(c.c3);
    let pass = report(
        "criterion 6",
        product_ok && max_ok,
        &format!(
            "|K| = {}, |L| = {}, C3 = {}, C = {} (grid validation passed)",
            c.k_count, c.l_count, c.c3, c.c
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_07_subcritical_decay_and_recursion() {
    let (lambda, lambda_e) = (0.05, 1.0);
    let params = ModelParams::path_loss(4.0).unwrap();
    let mut ok = true;
    let mut prev = f64::INFINITY;
    let mut details = String::new();
    let mut last = 0.0;
    for (i, r) in [1.0, 2.0, 4.0, 8.0].into_iter().enumerate() {
        let start = Instant::now();
        let est = estimate_event_b(lambda, lambda_e, r, &params, 10_000, 700 + i as u64).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        ok &= est.p_hat <= prev;
        ok &= elapsed < 60.0;
        prev = est.p_hat;
        last = est.p_hat;
        details.push_str(&format!("p(B({r})) = {:.4} in {elapsed:.1} s; ", est.p_hat));
    }
    ok &= last < 0.05;
    let rec = check_recursion_inequality(lambda, lambda_e, 1.0, 10_000, 710).unwrap();
    ok &= rec.satisfied_within_ci;
    details.push_str(&format!(
        "recursion at r=1: lhs {:.4} <= rhs {:.4} ({})",
        rec.lhs_value,
        rec.rhs_value,
        if rec.satisfied_within_ci { "satisfied" } else { "violated" }
    ));
    let pass = report("criterion 7", ok, &details);
    assert!(pass);
}

#[test]
fn acceptance_08_expected_count_bound() {
    let params = ModelParams::path_loss(4.0).unwrap();
    let cases = [
        (0.05, 0.2),
        (0.05, 1.0),
        (0.05, 2.0),
        (0.05, 4.0),
        (2.0, 0.5),
        (1.0, 1.0),
    ];
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for (i, &(lambda, r)) in cases.iter().enumerate() {
        let est = estimate_event_b(lambda, 1.0, r, &params, 4_000, 800 + i as u64).unwrap();
        let bound = 400.0 * lambda * r * r + 3.0 * est.se();
        ok &= est.p_hat <= bound;
        worst = worst.max(est.p_hat - bound);
    }
    let pass = report(
        "criterion 8",
        ok,
        &format!("p(B) <= 400 lambda r^2 + 3 SE on all {} cases (worst margin {worst:.3})", cases.len()),
    );
    assert!(pass);
}

fn double(sample: &PppSample) -> PppSample {
    let (x_lo, x_hi, y_lo, y_hi) = sample.window.bounds();
    PppSample {
        points: sample.points.iter().map(|p| Point2::new(p.x * 2.0, p.y * 2.0)).collect(),
        intensity: sample.intensity / 4.0,
        window: Window::rect(x_lo * 2.0, x_hi * 2.0, y_lo * 2.0, y_hi * 2.0).unwrap(),
        seed: sample.seed,
    }
}

#[test]
fn acceptance_09_exact_scale_invariance() {
    let params = ModelParams::path_loss(4.0).unwrap();
    let root = RngStream::new(900);
    let mut identical = 0;
    let instances = 100u64;
    for t in 0..instances {
        let s = root.substream(t);
        let legit = sample_ppp(1.0, Window::square(4.0).unwrap(), &s.substream(0)).unwrap();
        let eaves = sample_ppp(1.0, Window::square(5.0).unwrap(), &s.substream(1)).unwrap();
        let base = build_graph(&legit, &eaves, &params, 0).unwrap();
        let scaled = build_graph(&double(&legit), &double(&eaves), &params, 0).unwrap();
        if base.adjacency == scaled.adjacency {
            identical += 1;
        }
    }
    let pass = report(
        "criterion 9",
        identical == instances,
        &format!("{identical}/{instances} doubled configurations edge-for-edge identical"),
    );
    assert!(pass);
}

fn brute_adjacency(
    nodes: &[Point2],
    eaves: &[Point2],
    params: &ModelParams,
    fade_seed: u64,
) -> Vec<Vec<u32>> {
    let summary: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &p)| match params.fading {
            Fading::None => eaves.iter().map(|&e| p.dist(e)).fold(f64::INFINITY, f64::min),
            _ => eaves
                .iter()
                .enumerate()
                .map(|(e, &q)| {
                    params.eaves_gain(fade_seed, i as u32, e as u32)
                        * p.dist(q).powf(-params.alpha)
                })
                .fold(0.0, f64::max),
        })
        .collect();
    (0..nodes.len())
        .map(|i| {
            (0..nodes.len())
                .filter(|&j| {
                    j != i
                        && edge_exists(
                            nodes,
                            &summary,
                            params,
                            i,
                            j,
                            params.legit_gain(fade_seed, i as u32, j as u32),
                        )
                })
                .map(|j| j as u32)
                .collect()
        })
        .collect()
}

fn reachable(edges: &[(u32, u32)], n: usize, from: u32, reversed: bool) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if reversed {
            adj[v as usize].push(u);
        } else {
            adj[u as usize].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from as usize] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u as usize] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                stack.push(v);
            }
        }
    }
    seen
}

#[test]
fn acceptance_10_brute_force_oracle_equivalence() {
    let root = RngStream::new(1000);
    let instances = 100u64;
    let mut adjacency_ok = 0;
    let mut components_ok = 0;
    for t in 0..instances {
        let s = root.substream(t);
        let mut legit = sample_ppp(0.5, Window::square(4.0).unwrap(), &s.substream(0)).unwrap();
        legit.points.truncate(50);
        let eaves = sample_ppp(0.4, Window::square(6.0).unwrap(), &s.substream(1)).unwrap();
        let fading = match t % 3 {
            0 => Fading::None,
            1 => Fading::UnitExp,
            _ => Fading::BoundedExp { kappa: 16.0 },
        };
        let gamma = if t % 5 == 0 { 0.5 } else { 0.0 };
        let params = ModelParams::new(4.0, 1.0, gamma, fading).unwrap();
        let fade_seed = s.substream(2).key();
        let graph = build_graph(&legit, &eaves, &params, fade_seed).unwrap();
        let want = brute_adjacency(&legit.points, &eaves.points, &params, fade_seed);
        if graph.adjacency == want {
            adjacency_ok += 1;
        }
        // Component modes against definitional recomputation on the
        // explicit edge list.
        let n = legit.points.len();
        if n == 0 {
            components_ok += 1;
            continue;
        }
        let edges: Vec<(u32, u32)> = want
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u as u32, v)))
            .collect();
        let root_node = (t % n as u64) as u32;
        let out_def = reachable(&edges, n, root_node, false);
        let in_def = reachable(&edges, n, root_node, true);
        let sym: Vec<(u32, u32)> =
            edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        let either_def = reachable(&sym, n, root_node, false);
        let to_set = |mask: &[bool]| -> Vec<u32> {
            mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as u32).collect()
        };
        let bd_def: Vec<u32> = out_def
            .iter()
            .zip(&in_def)
            .enumerate()
            .filter(|(_, (&a, &b))| a && b)
            .map(|(i, _)| i as u32)
            .collect();
        let all_match = component(&graph, root_node, ComponentMode::Out).unwrap()
            == to_set(&out_def)
            && component(&graph, root_node, ComponentMode::In).unwrap() == to_set(&in_def)
            && component(&graph, root_node, ComponentMode::Either).unwrap()
                == to_set(&either_def)
            && component(&graph, root_node, ComponentMode::Bidirectional).unwrap() == bd_def;
        if all_match {
            components_ok += 1;
        }
    }
    let pass = report(
        "criterion 10",
        adjacency_ok == instances && components_ok == instances,
        &format!(
            "adjacency {adjacency_ok}/{instances}, component modes {components_ok}/{instances}"
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_11_critical_ratio_consistency() {
    let start = Instant::now();
    let params = ModelParams::path_loss(4.0).unwrap();
    let constants = covering_constants().unwrap();
    let mut estimates = Vec::new();
    for (i, lambda_e) in [0.5f64, 1.0, 2.0].into_iter().enumerate() {
        let l = 40.0 / lambda_e.sqrt();
        let est = estimate_lambda_c(
            lambda_e,
            &params,
            &[l],
            l / 10.0,
            200,
            (2.0, 12.0),
            0.25,
            1100 + i as u64,
        )
        .unwrap();
        println!(
            "  lambda_e = {lambda_e}: ratio_hat = {:.3}, ratio CI = ({:.3}, {:.3})",
            est.ratio_hat, est.ratio_ci.0, est.ratio_ci.1
        );
        estimates.push(est);
    }
    // Pairwise agreement within joint 95% intervals.
    let mut agree = true;
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (a, b) = (&estimates[i], &estimates[j]);
            agree &= a.ratio_ci.0 <= b.ratio_ci.1 && b.ratio_ci.0 <= a.ratio_ci.1;
        }
    }
    // Sandwich clause: strictly inside the theorem bounds.
    let mut inside = true;
    let mut sandwich_detail = String::new();
    for est in &estimates {
        let lower = subcritical_lower_bound(ModelKind::PathLoss, est.lambda_e, constants.c)
            / est.lambda_e;
        let mut upper = f64::INFINITY;
        for n1 in 1..=5u32 {
            for eps10 in 1..=9u32 {
                let v = supercritical_upper_bound(
                    ModelKind::PathLoss,
                    est.lambda_e,
                    eps10 as f64 / 10.0,
                    n1 as f64,
                    4.0,
                )
                .unwrap()
                    / est.lambda_e;
                upper = upper.min(v);
            }
        }
        inside &= est.ratio_hat > lower && est.ratio_hat < upper;
        sandwich_detail.push_str(&format!(
            "lambda_e {}: {:.3} in ({lower:.3e}, {upper:.8})? {}; ",
            est.lambda_e,
            est.ratio_hat,
            est.ratio_hat > lower && est.ratio_hat < upper
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let fast = elapsed < 1800.0;
    println!(
        "  criterion 11 diagnosis: the measured crossings sit far above the min-grid upper \
         bound, which is within 1e-8 of lambda_e itself; the published ball-closure bound \
         does not cap the directed spanning threshold. {sandwich_detail}"
    );
    let pass = report(
        "criterion 11",
        agree && inside && fast,
        &format!(
            "pairwise CI agreement {} | inside bound sandwich {} | {elapsed:.0} s",
            if agree { "ok" } else { "VIOLATED" },
            if inside { "ok" } else { "VIOLATED" },
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_12_cli_determinism_across_workers() {
    let bin = env!("CARGO_BIN_EXE_secperc");
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (label, workers) in [("a", "1"), ("b", "2")] {
        let out_dir = tmp.path().join(label);
        let status = std::process::Command::new(bin)
            .args([
                "--seed",
                "7",
                "--trials",
                "5000",
                "--workers",
                workers,
                "--out",
                out_dir.to_str().unwrap(),
                "verify",
                "--suite",
                "closed-forms",
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "verify run failed");
        outputs.push(std::fs::read(out_dir.join("verify-7/data.csv")).unwrap());
    }
    let identical = outputs[0] == outputs[1];
    let pass = report(
        "criterion 12",
        identical,
        &format!(
            "data.csv byte-identical across worker counts ({} bytes)",
            outputs[0].len()
        ),
    );
    assert!(pass);
}
