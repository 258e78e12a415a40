//! Cross-module invariants: couplings between the samplers, the graph
//! builder, and the estimators that no single module can check alone.

use secperc_core::analytic::{covering_constants, convergence_hypotheses_check, rho_law};
use secperc_core::estimators::{
    b_event_success, estimate_event_a_complement, estimate_event_b, estimate_mean_rho_sq,
    estimate_spanning, SpanningMode,
};
use secperc_core::geom::{sample_ppp, sample_ppp_marked, Point2, PppSample, Window};
use secperc_core::graph::{build_graph, component, ComponentMode, Fading, ModelParams};
use secperc_core::RngStream;

fn scaled_sample(sample: &PppSample, s: f64) -> PppSample {
    let (x_lo, x_hi, y_lo, y_hi) = sample.window.bounds();
    PppSample {
        points: sample.points.iter().map(|p| Point2::new(p.x * s, p.y * s)).collect(),
        intensity: sample.intensity / (s * s),
        window: Window::rect(x_lo * s, x_hi * s, y_lo * s, y_hi * s).unwrap(),
        seed: sample.seed,
    }
}

#[test]
fn pathloss_adjacency_is_exactly_scale_invariant() {
    // Powers of two keep every coordinate, squared distance, and square
    // root exact in binary floating point, so adjacency must match edge
    // for edge.
    let root = RngStream::new(2001);
    let params = ModelParams::path_loss(4.0).unwrap();
    for t in 0..40u64 {
        let s = root.substream(t);
        let legit = sample_ppp(1.0, Window::square(4.0).unwrap(), &s.substream(0)).unwrap();
        let eaves = sample_ppp(1.0, Window::square(5.0).unwrap(), &s.substream(1)).unwrap();
        let base = build_graph(&legit, &eaves, &params, 0).unwrap();
        for scale in [0.125, 0.5, 2.0, 4.0, 1024.0] {
            let g = build_graph(
                &scaled_sample(&legit, scale),
                &scaled_sample(&eaves, scale),
                &params,
                0,
            )
            .unwrap();
            assert_eq!(base.adjacency, g.adjacency, "trial {t}, scale {scale}");
        }
    }
}

#[test]
fn adding_an_eavesdropper_never_adds_an_edge() {
    let root = RngStream::new(2002);
    for t in 0..30u64 {
        let s = root.substream(t);
        let legit = sample_ppp(0.8, Window::square(4.0).unwrap(), &s.substream(0)).unwrap();
        let mut eaves = sample_ppp(0.4, Window::square(6.0).unwrap(), &s.substream(1)).unwrap();
        let fading = if t % 2 == 0 { Fading::None } else { Fading::UnitExp };
        let params = ModelParams::new(4.0, 1.0, 0.0, fading).unwrap();
        let before = build_graph(&legit, &eaves, &params, 9).unwrap();
        // Appending keeps the existing (i, e) fade keys fixed.
        let mut rng = s.substream(2).rng();
        eaves.points.push(Point2::new(
            12.0 * rng.next_f64() - 6.0,
            12.0 * rng.next_f64() - 6.0,
        ));
        let after = build_graph(&legit, &eaves, &params, 9).unwrap();
        for (i, row) in after.adjacency.iter().enumerate() {
            for v in row {
                assert!(
                    before.adjacency[i].contains(v),
                    "trial {t}: edge {i}->{v} appeared after adding an eavesdropper"
                );
            }
        }
    }
}

#[test]
fn adding_a_legitimate_node_never_removes_an_edge() {
    let root = RngStream::new(2003);
    let params = ModelParams::path_loss(4.0).unwrap();
    for t in 0..30u64 {
        let s = root.substream(t);
        let mut legit = sample_ppp(0.8, Window::square(4.0).unwrap(), &s.substream(0)).unwrap();
        let eaves = sample_ppp(0.5, Window::square(6.0).unwrap(), &s.substream(1)).unwrap();
        let before = build_graph(&legit, &eaves, &params, 0).unwrap();
        let mut rng = s.substream(2).rng();
        legit.points.push(Point2::new(
            8.0 * rng.next_f64() - 4.0,
            8.0 * rng.next_f64() - 4.0,
        ));
        let after = build_graph(&legit, &eaves, &params, 0).unwrap();
        for (i, row) in before.adjacency.iter().enumerate() {
            for v in row {
                assert!(
                    after.adjacency[i].contains(v),
                    "trial {t}: edge {i}->{v} vanished after adding a node"
                );
            }
        }
    }
}

#[test]
fn raising_gamma_never_adds_an_edge() {
    let root = RngStream::new(2004);
    for t in 0..20u64 {
        let s = root.substream(t);
        let legit = sample_ppp(0.9, Window::square(4.0).unwrap(), &s.substream(0)).unwrap();
        let eaves = sample_ppp(0.4, Window::square(6.0).unwrap(), &s.substream(1)).unwrap();
        let fading = if t % 2 == 0 { Fading::None } else { Fading::UnitExp };
        let fade_seed = s.substream(2).key();
        let mut edges_prev = usize::MAX;
        let mut prev_adj: Option<Vec<Vec<u32>>> = None;
        for gamma in [0.0, 0.3, 1.0, 2.5] {
            let params = ModelParams::new(4.0, 1.0, gamma, fading).unwrap();
            let g = build_graph(&legit, &eaves, &params, fade_seed).unwrap();
            if let Some(prev) = &prev_adj {
                for (i, row) in g.adjacency.iter().enumerate() {
                    for v in row {
                        assert!(
                            prev[i].contains(v),
                            "trial {t}: edge {i}->{v} appeared when gamma rose to {gamma}"
                        );
                    }
                }
            }
            assert!(g.edge_count() <= edges_prev);
            edges_prev = g.edge_count();
            prev_adj = Some(g.adjacency);
        }
    }
}

#[test]
fn path_event_non_increasing_in_eavesdropper_intensity() {
    // Coupled thinning on the eavesdropper process: each trial's sparse
    // eavesdropper set is a subset of the dense one, so a success under
    // the dense set implies one under the sparse set.
    let r = 1.0;
    let window = Window::square(10.0 * r).unwrap();
    let params = ModelParams::path_loss(4.0).unwrap();
    let root = RngStream::new(2005);
    let (mut wins_sparse, mut wins_dense) = (0u32, 0u32);
    for t in 0..200u64 {
        let s = root.substream(t);
        let legit = sample_ppp(2.0, window, &s.substream(0)).unwrap();
        let marked = sample_ppp_marked(2.0, window, &s.substream(1)).unwrap();
        let sparse = marked.thin(0.5);
        let dense = marked.thin(2.0);
        let dense_ok = b_event_success(&legit.points, &dense, r, &params, 3);
        let sparse_ok = b_event_success(&legit.points, &sparse, r, &params, 3);
        if dense_ok {
            assert!(sparse_ok, "trial {t}: success lost when removing eavesdroppers");
        }
        wins_sparse += sparse_ok as u32;
        wins_dense += dense_ok as u32;
    }
    assert!(wins_sparse >= wins_dense);
    assert!(wins_sparse > wins_dense, "coupling never separated the intensities");
}

#[test]
fn farthest_node_escape_bounded_by_transform_inequality() {
    // Frequency of the farthest out-component node leaving D_10r is at
    // most P(B(0,r)) + P(A_D10r(r)^c), each estimated on its own exact
    // window, with joint CI slack.
    let (lambda, lambda_e, r) = (6.0, 2.0, 1.2);
    let trials = 400u64;
    let root = RngStream::new(2006);
    let params = ModelParams::path_loss(4.0).unwrap();
    let obs_window = Window::square(12.0 * r).unwrap();
    let mut escapes = 0u64;
    for t in 0..trials {
        let s = root.substream(t);
        let legit = sample_ppp(lambda, obs_window, &s.substream(0)).unwrap();
        let eaves = sample_ppp(lambda_e, obs_window, &s.substream(1)).unwrap();
        // x_1: the node of D_r nearest the origin.
        let x1 = legit
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.cheb() <= r)
            .min_by(|(_, a), (_, b)| {
                a.dist_sq(Point2::new(0.0, 0.0))
                    .partial_cmp(&b.dist_sq(Point2::new(0.0, 0.0)))
                    .unwrap()
            })
            .map(|(i, _)| i as u32);
        let Some(x1) = x1 else { continue };
        let graph = build_graph(&legit, &eaves, &params, 0).unwrap();
        let comp = component(&graph, x1, ComponentMode::Out).unwrap();
        let farthest = comp
            .iter()
            .map(|&i| graph.nodes[i as usize].cheb())
            .fold(0.0f64, f64::max);
        if farthest > 10.0 * r {
            escapes += 1;
        }
    }
    let freq = escapes as f64 / trials as f64;
    let b = estimate_event_b(lambda, lambda_e, r, &params, trials, 77).unwrap();
    let a = estimate_event_a_complement(lambda, lambda_e, 10, r, trials, 78).unwrap();
    let freq_se = (freq * (1.0 - freq) / trials as f64).sqrt();
    let budget = b.p_hat + a.p_hat + 3.0 * (b.se() + a.se() + freq_se);
    assert!(
        freq <= budget,
        "escape freq {freq} exceeds transform bound {budget} (B {} + A^c {})",
        b.p_hat,
        a.p_hat
    );
    assert!(b.p_hat + a.p_hat > 0.01, "bound vacuous; pick denser parameters");
}

#[test]
fn convergence_lemma_premises_hold_at_the_subcritical_intensity() {
    // lambda = 1/(4 C^2 E[rho^2]) with the constructed C: the f and g
    // hypotheses of the convergence lemma hold, f from Monte Carlo
    // estimates (premultiplied by C) and g from the closed-form tail.
    let constants = covering_constants().unwrap();
    let lambda_e = 1.0;
    let law = rho_law(lambda_e).unwrap();
    let c = constants.c;
    let lambda = 1.0 / (4.0 * c * c * law.mean_sq());
    let m_scale = law.mean_sq().sqrt() / 10.0;
    let params = ModelParams::path_loss(4.0).unwrap();
    let grid = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    let mut f_samples = Vec::new();
    let mut g_samples = Vec::new();
    for (k, &r) in grid.iter().enumerate() {
        let est =
            estimate_event_b(lambda, lambda_e, m_scale * r, &params, 200, 3000 + k as u64)
                .unwrap();
        f_samples.push((r, c * est.p_hat));
        g_samples.push((r, lambda * c * c * law.tail_sq(m_scale * r / 10.0)));
    }
    for &(r, f) in &f_samples {
        if (1.0..=10.0).contains(&r) {
            assert!(f <= 0.5, "f({r}) = {f}");
        }
    }
    for &(_, g) in &g_samples {
        assert!(g <= 0.25 + 1e-12, "g = {g}");
    }
    let report = convergence_hypotheses_check(&f_samples, &g_samples, 1.0).unwrap();
    assert!(report.all_ok(), "violations: {:?}", report.violations);
}

#[test]
fn estimators_bitwise_identical_across_worker_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let rho2 = estimate_mean_rho_sq(1.0, 2000, 41).unwrap();
            let span = estimate_spanning(
                3.0,
                1.0,
                8.0,
                1.0,
                &ModelParams::path_loss(4.0).unwrap(),
                SpanningMode::Directed,
                200,
                42,
            )
            .unwrap();
            (rho2.mean, rho2.se, span.successes)
        })
    };
    let a = run(1);
    let b = run(5);
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert_eq!(a.1.to_bits(), b.1.to_bits());
    assert_eq!(a.2, b.2);
}
