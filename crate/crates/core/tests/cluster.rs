use std::collections::{BTreeMap, VecDeque};

use poisson_zoo::animal::AnimalLaw;
use poisson_zoo::cluster::{clusters, coupled_crossings, crossing_probability, lambda_sweep, lambda_views};
use poisson_zoo::graph::{ball, neighbors, GraphSpec, VertexId, VertexSet};
use poisson_zoo::rng::unit;
use poisson_zoo::zoo::{realize, Backend, ViewSpec, WindowSample, ZooOptions};
use proptest::prelude::*;

fn window(g: &GraphSpec, radius: u32, occupied: VertexSet) -> WindowSample {
    WindowSample {
        center: g.origin(),
        radius,
        mu: occupied.iter().map(|v| (v.clone(), 1)).collect::<BTreeMap<_, _>>(),
        animal_count: occupied.len(),
        occupied,
        lambda: 1.0,
        cap: 1,
        seed: 0,
    }
}

fn bfs_components(g: &GraphSpec, occ: &VertexSet) -> Vec<usize> {
    let mut seen = VertexSet::new();
    let mut sizes = Vec::new();
    for v in occ.sorted() {
        if !seen.insert(v.clone()) {
            continue;
        }
        let mut q = VecDeque::from([v.clone()]);
        let mut n = 0;
        while let Some(x) = q.pop_front() {
            n += 1;
            for u in neighbors(g, &x).unwrap() {
                if occ.contains(&u) && seen.insert(u.clone()) {
                    q.push_back(u);
                }
            }
        }
        sizes.push(n);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Site percolation on the `d`-regular tree: probability that an open
/// origin connects to the sphere of radius `r`.
fn tree_crossing(d: u32, p: f64, r: u32) -> f64 {
    let mut s = p;
    for _ in 1..r {
        s = p * (1.0 - (1.0 - s).powi(d as i32 - 1));
    }
    p * (1.0 - (1.0 - s).powi(d as i32))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn union_find_matches_breadth_first_search(seed in any::<u64>(), p in 0.1f64..0.9, which in 0usize..2) {
        let g = [GraphSpec::Lattice(2), GraphSpec::RegularTree(3)][which].clone();
        let occ: VertexSet = ball(&g, &g.origin(), 6)
            .unwrap()
            .into_iter()
            .filter(|v| unit(seed, &[poisson_zoo::graph::vertex_key(v)]) < p)
            .collect();
        let rep = clusters(&g, &window(&g, 6, occ.clone())).unwrap();
        prop_assert_eq!(&rep.sizes, &bfs_components(&g, &occ));
        prop_assert_eq!(rep.sizes.iter().sum::<usize>(), occ.len());
        prop_assert_eq!(rep.origin_cluster_size.is_some(), occ.contains(&g.origin()));
    }
}

#[test]
fn crossing_of_a_full_ray() {
    let g = GraphSpec::Lattice(2);
    let occ: VertexSet = (0..=4).map(|x| VertexId::Coords(vec![x, 0])).collect();
    let rep = clusters(&g, &window(&g, 4, occ)).unwrap();
    assert!(rep.crossing);
    assert_eq!(rep.boundary_crossing_clusters, 1);
    assert_eq!(rep.sizes, vec![5]);
}

#[test]
fn singleton_zoo_is_site_percolation() {
    let g = GraphSpec::RegularTree(3);
    let lambda = 1.0f64;
    let p = 1.0 - (-lambda).exp();
    let n = 3000;
    for backend in [Backend::Memo, Backend::Auto] {
        let opts = ZooOptions { backend, ..Default::default() };
        let est = crossing_probability(&g, &AnimalLaw::Singleton, lambda, 1, 8, n, 5, opts).unwrap();
        let want = tree_crossing(3, p, 8);
        let se = (want * (1.0 - want) / n as f64).sqrt();
        assert!((est.value - want).abs() < 4.0 * se, "{backend:?}: {} vs {want}", est.value);
    }
}

#[test]
fn coupled_views_are_monotone() {
    let g = GraphSpec::RegularTree(3);
    let law: AnimalLaw = "worm(power(2.5))".parse().unwrap();
    let views: Vec<ViewSpec> = [5, 50, 500].iter().map(|&c| ViewSpec::full(c)).collect();
    let rows = coupled_crossings(&g, &law, 0.3, 500, 6, &views, 200, 2, ZooOptions::default()).unwrap();
    for r in &rows {
        assert!(r.windows(2).all(|w| w[0] <= w[1]), "{r:?}");
    }
    let grid = [0.2, 0.4, 0.8];
    let vs = lambda_views(&grid, 500, 3).unwrap();
    assert!(vs.windows(2).all(|w| w[0].hi <= w[1].hi));
    let sweep = lambda_sweep(&g, &law, 500, 6, &grid, 200, 4, ZooOptions::default()).unwrap();
    let ps: Vec<u64> = sweep.crossing_prob.iter().map(|p| p.successes).collect();
    assert!(ps.windows(2).all(|w| w[0] <= w[1]), "{ps:?}");
}

#[test]
fn windows_repeat_under_equal_seeds() {
    let g = GraphSpec::RegularTree(3);
    let law: AnimalLaw = "worm(power(2.5))".parse().unwrap();
    let mut a = realize(&g, &law, 0.4, 30, 9).unwrap();
    let mut b = realize(&g, &law, 0.4, 30, 9).unwrap();
    let (wa, wb) = (a.window_sample(&g.origin(), 5).unwrap(), b.window_sample(&g.origin(), 5).unwrap());
    assert_eq!(clusters(&g, &wa).unwrap(), clusters(&g, &wb).unwrap());
}
