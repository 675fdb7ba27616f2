//! Property tests: structural invariants of the generator, the algebraic
//! identity between the two normalizer routes, and oracle equivalence for
//! percolation and susceptible sets on small random instances.

mod common;

use proptest::prelude::*;

use edgestep::certificates::find_susceptible_set;
use edgestep::edgestep::{EdgeStepFunction, StepIndexConvention};
use edgestep::generator::{generate, Step};
use edgestep::graph::{snapshot_adjacency, Multigraph};
use edgestep::normalizer::NormalizerTable;
use edgestep::percolation::run_from_initial;
use edgestep::seeds::derive_seed;

fn arb_function() -> impl Strategy<Value = EdgeStepFunction> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| EdgeStepFunction::constant(p).unwrap()),
        (0.05f64..0.95).prop_map(|g| EdgeStepFunction::power(g).unwrap()),
        (0.2f64..4.0).prop_map(|b| EdgeStepFunction::log_power(b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn generated_graphs_keep_their_structural_invariants(
        f in arb_function(),
        seed in any::<u64>(),
        t_final in 1u64..256,
    ) {
        let snap = [1, (t_final / 2).max(1), t_final];
        let trace = generate(&f, StepIndexConvention::Next, t_final, seed, &snap, true).unwrap();
        for (t, g) in &trace.snapshots {
            prop_assert_eq!(g.num_edges(), *t);
            prop_assert_eq!(g.half_edges().len() as u64, 2 * t);
            prop_assert_eq!(g.degrees().iter().sum::<u64>(), 2 * t);
            // birth times strictly increasing, every born vertex has degree
            let births = g.birth_times();
            prop_assert!(births.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.degrees().iter().all(|&d| d >= 1));
            // degree equals the number of half-edge occurrences
            let mut counted = vec![0u64; g.num_vertices() as usize];
            for &h in g.half_edges() {
                counted[h as usize - 1] += 1;
            }
            prop_assert_eq!(counted, g.degrees().to_vec());
        }
        // V_t = 1 + number of vertex-steps
        let steps = trace.steps.unwrap();
        let vertex_steps = steps.iter().filter(|s| matches!(s, Step::Vertex { .. })).count() as u64;
        let (_, g_last) = trace.snapshots.last().unwrap();
        prop_assert_eq!(g_last.num_vertices(), 1 + vertex_steps);
    }

    #[test]
    fn xi_route_matches_the_definitional_phi_product(
        f in arb_function(),
        horizon in 2u64..2000,
    ) {
        let table = NormalizerTable::build(&f, horizon).unwrap();
        // independent route: the definitional product of phi factors
        let mut phi_direct = 1.0f64;
        for s in 1..horizon {
            let fs1 = f.eval(s + 1).unwrap();
            let sf = s as f64;
            phi_direct *= 1.0 + 1.0 / sf - fs1 / (2.0 * sf);
            let t = s + 1;
            let xi = table.xi(t).unwrap();
            let other = phi_direct / t as f64;
            prop_assert!(
                (xi - other).abs() <= 1e-10 * xi,
                "routes disagree at t = {}: {} vs {}", t, xi, other
            );
            prop_assert!(
                (table.phi(t).unwrap() - phi_direct).abs() <= 1e-10 * phi_direct
            );
        }
    }

    #[test]
    fn percolation_matches_the_definitional_oracle(
        edges in prop::collection::vec((1u32..=8, 1u32..=8), 1..=12),
        initial_mask in 0u32..256,
        r in 2u32..=3,
    ) {
        let g = Multigraph::from_edges(8, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let initial: Vec<u32> = (1..=8).filter(|v| initial_mask & (1 << (v - 1)) != 0).collect();
        let run = run_from_initial(&g, &adj, &initial, r, &[], 64);
        let expected = common::naive_bootstrap(&g, &initial, r);
        for v in 1..=8u32 {
            prop_assert_eq!(run.state.round_of(v), expected[v as usize - 1], "vertex {}", v);
        }
    }

    #[test]
    fn susceptible_set_matches_the_double_loop(
        edges in prop::collection::vec((1u32..=40, 1u32..=40), 1..=120),
        hub_mask in 1u64..(1 << 12),
        r in 2u32..=3,
    ) {
        let g = Multigraph::from_edges(40, &edges, 0).unwrap();
        let adj = snapshot_adjacency(&g);
        let hub: Vec<u32> = (1..=12).filter(|v| hub_mask & (1 << (v - 1)) != 0).collect();
        prop_assume!(!hub.is_empty());
        let fast = find_susceptible_set(&adj, &hub, r).unwrap();
        let slow = common::naive_susceptible(&g, &hub, r);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn trajectories_are_deterministic_given_the_seed(
        f in arb_function(),
        seed in any::<u64>(),
    ) {
        let a = generate(&f, StepIndexConvention::Next, 300, seed, &[300], false).unwrap();
        let b = generate(&f, StepIndexConvention::Next, 300, seed, &[300], false).unwrap();
        prop_assert_eq!(a.snapshots[0].1.half_edges(), b.snapshots[0].1.half_edges());
        prop_assert_eq!(a.snapshots[0].1.birth_times(), b.snapshots[0].1.birth_times());
    }
}

/// The expected vertex count is `1 + sum_{s=2}^{T} f(s)` under the default
/// convention; the Monte Carlo mean must sit within four standard errors.
#[test]
fn vertex_count_mean_matches_the_bernoulli_schedule() {
    let t_final = 2_000u64;
    let replicas = 400u64;
    for (tag, f) in [
        ("power", EdgeStepFunction::power(0.5).unwrap()),
        ("logpower", EdgeStepFunction::log_power(2.0).unwrap()),
        ("constant", EdgeStepFunction::constant(0.3).unwrap()),
    ] {
        let expected: f64 = 1.0 + (2..=t_final).map(|s| f.eval(s).unwrap()).sum::<f64>();
        let counts: Vec<f64> = (0..replicas)
            .map(|rep| {
                let seed = derive_seed(0xbeef, 77, rep);
                let trace =
                    generate(&f, StepIndexConvention::Next, t_final, seed, &[t_final], false)
                        .unwrap();
                trace.snapshots[0].1.num_vertices() as f64
            })
            .collect();
        let stats = edgestep::stats::summarize(&counts);
        let dev = (stats.mean - expected).abs() / stats.stderr;
        assert!(
            dev <= 4.0,
            "{tag}: mean {} vs expected {expected}, deviation {dev} se",
            stats.mean
        );
    }
}

/// Under the alternative step-index convention the expected vertex count
/// shifts to `1 + sum_{s=1}^{T-1} f(s)`; the switch must actually switch.
#[test]
fn conventions_shift_the_vertex_schedule() {
    let f = EdgeStepFunction::power(0.5).unwrap();
    let t_final = 500u64;
    let replicas = 400u64;
    let expected: f64 = 1.0 + (1..t_final).map(|s| f.eval(s).unwrap()).sum::<f64>();
    let counts: Vec<f64> = (0..replicas)
        .map(|rep| {
            let seed = derive_seed(0xfeed, 78, rep);
            let trace =
                generate(&f, StepIndexConvention::Current, t_final, seed, &[t_final], false)
                    .unwrap();
            trace.snapshots[0].1.num_vertices() as f64
        })
        .collect();
    let stats = edgestep::stats::summarize(&counts);
    let dev = (stats.mean - expected).abs() / stats.stderr;
    assert!(dev <= 4.0, "mean {} vs expected {expected}", stats.mean);
}

/// Nested-horizon convergence of `xi` for summable schedules.
#[test]
fn xi_converges_on_nested_horizons_under_summability() {
    let f = EdgeStepFunction::power(0.5).unwrap();
    let table = NormalizerTable::build(&f, 1_000_000).unwrap();
    let mut prev_gap = f64::INFINITY;
    for t in [1_000u64, 10_000, 100_000, 500_000] {
        let gap = (table.xi(2 * t).unwrap() - table.xi(t).unwrap()).abs();
        assert!(gap < prev_gap, "gap grew at t = {t}");
        prev_gap = gap;
    }
    assert!(prev_gap < 1e-3);
    // the envelope constant stays positive and nearly converged
    let b = table.growth_bounds();
    assert!(b.c1 > 0.0);
    assert!((table.xi(1_000_000).unwrap() - table.xi(100_000).unwrap()).abs() < 1e-3);
}
