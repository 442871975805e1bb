use poisson_zoo::animal::{length_moment, sample_animal, sample_volumes, truncated_volume_moment, AnimalLaw, LengthLaw};
use poisson_zoo::graph::{is_connected, neighbors, GraphSpec, VertexId};
use poisson_zoo::rng::stream;
use proptest::prelude::*;

fn law(s: &str) -> AnimalLaw {
    s.parse().unwrap()
}

#[test]
fn two_step_worm_backtracks_a_third_of_the_time() {
    let g = GraphSpec::RegularTree(3);
    let n = 30_000;
    let vols = sample_volumes(&law("worm(const(3))"), &g, 10, n, &mut stream(1, &[])).unwrap();
    let two = vols.iter().filter(|v| **v == Some(2)).count() as f64 / n as f64;
    let se = (1.0 / 3.0 * 2.0 / 3.0 / n as f64).sqrt();
    assert!((two - 1.0 / 3.0).abs() < 4.0 * se, "{two}");
    assert!(vols.iter().all(|v| matches!(v, Some(2) | Some(3))));
}

#[test]
fn one_step_worm_is_rotation_invariant() {
    let g = GraphSpec::RegularTree(4);
    let o = g.origin();
    let nb = neighbors(&g, &o).unwrap();
    let mut counts = vec![0f64; nb.len()];
    let mut rng = stream(2, &[]);
    let n = 8000;
    for _ in 0..n {
        let a = sample_animal(&law("worm(const(2))"), &g, &o, None, &mut rng).unwrap().unwrap();
        let other = a.members.iter().find(|v| **v != o).unwrap();
        counts[nb.iter().position(|u| u == other).unwrap()] += 1.0;
    }
    let e = n as f64 / nb.len() as f64;
    let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
    // 3 degrees of freedom, 0.999 quantile.
    assert!(chi2 < 16.27, "{chi2} {counts:?}");
}

#[test]
fn down_paths_descend_one_generation_per_step() {
    let g: GraphSpec = "grandparent(3)".parse().unwrap();
    let mut rng = stream(3, &[]);
    for _ in 0..200 {
        let a = sample_animal(&law("downpath(power(2.5))"), &g, &g.origin(), Some(50), &mut rng).unwrap();
        let Some(a) = a else { continue };
        let mut downs: Vec<Vec<u8>> = a
            .members
            .iter()
            .map(|v| match v {
                VertexId::Grand { up: 0, down } => down.clone(),
                other => panic!("not below the root: {other}"),
            })
            .collect();
        downs.sort_by_key(|d| d.len());
        for (k, d) in downs.iter().enumerate() {
            assert_eq!(d.len(), k);
            assert!(d.starts_with(&downs[k.saturating_sub(1)]));
        }
    }
}

#[test]
fn truncated_moments_approach_exact_values() {
    let g = GraphSpec::RegularTree(3);
    let m = truncated_volume_moment(&law("ball(geom(0.85))"), &g, 1, 1 << 20, 20_000, &mut stream(4, &[])).unwrap();
    let mut exact = 0.0;
    for r in 1..60u64 {
        let p = 0.85 * 0.15f64.powi(r as i32 - 1);
        let size = 1.0 + 3.0 * (2f64.powi(r as i32) - 1.0);
        exact += p * size;
    }
    assert!(m.estimate.within(exact, 4.0), "{:?} vs {exact}", m.estimate);
    let w = length_moment(&LengthLaw::PowerLaw(3.5), 1, None);
    assert!(w > 1.0 && w.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn animals_are_connected_rooted_and_capped(seed in any::<u64>(), cap in 1usize..40, which in 0usize..4) {
        let (g, l): (GraphSpec, &str) = [
            (GraphSpec::RegularTree(3), "worm(power(2.2))"),
            (GraphSpec::Lattice(2), "worm(power(2.5))"),
            (GraphSpec::RegularTree(4), "ball(power(3.5))"),
            ("prod(tree(3),lattice(1))".parse().unwrap(), "fiberworm(power(2.4),0.1)"),
        ][which].clone();
        let root = g.origin();
        if let Some(a) = sample_animal(&law(l), &g, &root, Some(cap), &mut stream(seed, &[])).unwrap() {
            prop_assert!(a.volume() <= cap);
            prop_assert!(a.members.contains(&root));
            prop_assert!(is_connected(&g, &a.members).unwrap());
        }
    }
}
