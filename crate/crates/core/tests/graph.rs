use poisson_zoo::graph::{
    ball, closure, dist, dist_from_origin, ext_boundary, int_boundary, is_connected, known_constants, neighbors,
    GraphSpec, VertexId, VertexSet,
};
use poisson_zoo::rng::stream;
use poisson_zoo::walk::simulate_walk;
use proptest::prelude::*;

const SPECS: &[&str] = &[
    "tree(3)",
    "tree(5)",
    "lattice(2)",
    "free(cycle(3),cycle(4))",
    "grandparent(3)",
    "prod(tree(3),lattice(1))",
];

fn spec(i: usize) -> GraphSpec {
    SPECS[i].parse().unwrap()
}

fn walk(g: &GraphSpec, n: usize, seed: u64) -> Vec<VertexId> {
    simulate_walk(g, &g.origin(), n, &mut stream(seed, &[])).unwrap().steps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_and_regular(i in 0..SPECS.len(), n in 0usize..30, seed in any::<u64>()) {
        let g = spec(i);
        let v = walk(&g, n, seed).pop().unwrap();
        let nb = neighbors(&g, &v).unwrap();
        prop_assert_eq!(nb.len(), g.degree());
        for u in &nb {
            prop_assert!(neighbors(&g, u).unwrap().contains(&v));
            prop_assert_ne!(u, &v);
        }
    }

    #[test]
    fn distance_agrees_with_bfs(i in 0..SPECS.len(), n in 0usize..5, seed in any::<u64>()) {
        let g = spec(i);
        let v = walk(&g, n, seed).pop().unwrap();
        let d = dist(&g, &g.origin(), &v, 5).unwrap().unwrap();
        prop_assert_eq!(d as u64, dist_from_origin(&g, &v));
        prop_assert!(d <= n);
    }

    #[test]
    fn boundaries_partition_the_closure(i in 0..SPECS.len(), n in 0usize..15, seed in any::<u64>()) {
        let g = spec(i);
        let a: VertexSet = walk(&g, n, seed).into_iter().collect();
        let ext = ext_boundary(&g, &a).unwrap();
        let int = int_boundary(&g, &a).unwrap();
        let cl = closure(&g, &a).unwrap();
        prop_assert!(ext.is_disjoint(&a));
        prop_assert!(int.is_subset(&a));
        prop_assert_eq!(cl.len(), a.len() + ext.len());
        prop_assert!(is_connected(&g, &a).unwrap());
        prop_assert!(is_connected(&g, &cl).unwrap());
    }
}

#[test]
fn tree_balls_have_closed_form_sizes() {
    for d in [3u32, 4, 6] {
        let g = GraphSpec::RegularTree(d);
        for r in 0..5usize {
            let want = if r == 0 { 1 } else { 1 + d as usize * ((d as usize - 1).pow(r as u32) - 1) / (d as usize - 2) };
            assert_eq!(ball(&g, &g.origin(), r).unwrap().len(), want);
        }
    }
}

#[test]
fn lattice_balls_are_diamonds() {
    let g = GraphSpec::Lattice(2);
    for r in 0..6usize {
        assert_eq!(ball(&g, &g.origin(), r).unwrap().len(), 2 * r * r + 2 * r + 1);
    }
}

#[test]
fn cheeger_of_trees_and_amenable_graphs() {
    assert_eq!(known_constants(&GraphSpec::RegularTree(5)).cheeger, Some(3.0));
    let rho = known_constants(&GraphSpec::RegularTree(3)).spectral_radius.unwrap();
    assert!((rho - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
    assert_eq!(known_constants(&GraphSpec::Lattice(3)).cheeger, Some(0.0));
}

#[test]
fn disconnected_pairs_are_detected() {
    let g = GraphSpec::Lattice(2);
    let s: VertexSet = [VertexId::Coords(vec![0, 0]), VertexId::Coords(vec![2, 0])].into_iter().collect();
    assert!(!is_connected(&g, &s).unwrap());
    assert_eq!(dist(&g, &g.origin(), &VertexId::Coords(vec![2, 0]), 1).unwrap(), None);
}
