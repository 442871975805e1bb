use poisson_zoo::graph::{ball, known_constants, GraphSpec, VertexSet};
use poisson_zoo::rng::stream;
use poisson_zoo::walk::{
    capacity, escape_probability, estimate_spectral_radius, simulate_walk, trace_size, tree_log_return_probabilities,
};
use proptest::prelude::*;

#[test]
fn single_vertex_escape_on_trees() {
    for d in [3u32, 4] {
        let g = GraphSpec::RegularTree(d);
        let k: VertexSet = [g.origin()].into_iter().collect();
        let e = escape_probability(&g, &k, &g.origin(), 64, 20_000, &mut stream(d as u64, &[])).unwrap();
        let want = (d as f64 - 2.0) / (d as f64 - 1.0);
        assert!((e.value - want).abs() < 4.0 * e.stderr.max(1e-3), "d={d} {e:?}");
    }
}

#[test]
fn capacity_of_a_ball_counts_its_leaves() {
    let g = GraphSpec::RegularTree(3);
    let k = ball(&g, &g.origin(), 2).unwrap();
    let c = capacity(&g, &k, 64, 2000, &mut stream(1, &[])).unwrap();
    // Only the 6 leaves escape: step outward, then never come back.
    let want = 6.0 * (2.0 / 3.0) * 0.5;
    assert!((c.value - want).abs() < 4.0 * c.stderr + 0.02, "{c:?}");
}

#[test]
fn return_probabilities_decay_at_the_spectral_radius() {
    let lp = tree_log_return_probabilities(3, 400);
    let rho = known_constants(&GraphSpec::RegularTree(3)).spectral_radius.unwrap();
    let r = (lp[400] / 400.0).exp();
    assert!(r < rho && r > rho * 0.98, "{r} vs {rho}");
    assert!(lp[1].is_infinite());
    let est = estimate_spectral_radius(&GraphSpec::RegularTree(3), 20, 20_000, &mut stream(2, &[])).unwrap();
    assert!((est.value - (lp[20] / 20.0).exp()).abs() < 4.0 * est.stderr + 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walk_steps_are_edges(n in 0usize..60, seed in any::<u64>()) {
        let g = GraphSpec::Lattice(2);
        let p = simulate_walk(&g, &g.origin(), n, &mut stream(seed, &[])).unwrap();
        prop_assert_eq!(p.length(), n);
        for w in p.steps.windows(2) {
            prop_assert!(poisson_zoo::graph::neighbors(&g, &w[0]).unwrap().contains(&w[1]));
        }
        let t = trace_size(&p, 0, n).unwrap();
        prop_assert!(t >= 1 && t <= n + 1);
        prop_assert!(trace_size(&p, 0, n + 1).is_err());
    }
}
