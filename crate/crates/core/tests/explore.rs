use poisson_zoo::animal::AnimalLaw;
use poisson_zoo::explore::*;
use poisson_zoo::graph::{ext_boundary, factor_neighborhood, GraphSpec, VertexSet};
use poisson_zoo::rng::stream;
use poisson_zoo::walk::simulate_walk;
use poisson_zoo::zoo::{realize, realize_with, Backend, ViewSpec, ZooOptions};
use poisson_zoo::Error;
use proptest::prelude::*;

fn free34() -> GraphSpec {
    "free(cycle(3),cycle(4))".parse().unwrap()
}

fn worm() -> AnimalLaw {
    "worm(power(2.5))".parse().unwrap()
}

fn memo() -> ZooOptions {
    ZooOptions { backend: Backend::Memo, ..Default::default() }
}

fn walk_set(g: &GraphSpec, steps: usize, seed: u64) -> VertexSet {
    let p = simulate_walk(g, &g.origin(), steps, &mut stream(seed, &[])).unwrap();
    p.steps.into_iter().collect()
}

#[test]
fn threshold_spot_value() {
    let p = 1.0 - (-0.5f64).exp();
    let want = (p.powi(-2) + 5.0) * 2.0 * 3.0 / 4.0;
    let t = reproduction_threshold(&GraphSpec::RegularTree(4), 1.0, 1.0).unwrap();
    assert!((t - want).abs() < 1e-12);
    assert!((t - 17.19).abs() < 0.01, "{t}");
}

#[test]
fn threshold_small_lambda_asymptotics() {
    let g = GraphSpec::RegularTree(4);
    let ratios: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&l| l * l * l * reproduction_threshold(&g, l, 1.0).unwrap() / (16.0 / 4.0))
        .collect();
    for w in ratios.windows(2) {
        assert!((w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    }
    assert!((ratios[2] - 1.0).abs() < 0.1, "{ratios:?}");
}

#[test]
fn threshold_errors() {
    assert!(matches!(reproduction_threshold(&GraphSpec::Lattice(2), 1.0, 1.0), Err(Error::Spec(_))));
    assert!(matches!(reproduction_threshold(&GraphSpec::RegularTree(3), 0.0, 1.0), Err(Error::Argument(_))));
    let r = required_r(&GraphSpec::RegularTree(4), &AnimalLaw::Singleton, 1.0, 1000, 1);
    assert!(matches!(r, Err(Error::Unattainable(_))));
}

#[test]
fn required_cap_exceeds_threshold() {
    let law: AnimalLaw = "worm(power(2.2))".parse().unwrap();
    let r = required_r(&free34(), &law, 0.5, 20_000, 3).unwrap();
    assert!(r.m1_exact);
    assert!(r.m2_at_cap > r.threshold);
    let again = required_r(&free34(), &law, 0.5, 20_000, 3).unwrap();
    assert_eq!(r, again);
}

#[test]
fn growth_harness_extremes() {
    let p = GrowthParams::new(2.0, 40.0, 10.0).unwrap();
    let det = growth_lemma_harness(IncrementModel::Deterministic, p, 50, 10, 1).unwrap();
    assert_eq!(det.survival.value, 1.0);
    let zero = growth_lemma_harness(IncrementModel::Zero, p, 50, 10, 1).unwrap();
    assert_eq!(zero.survival.value, 0.0);
    let pois = growth_lemma_harness(IncrementModel::Poisson, p, 2000, 10, 1).unwrap();
    assert!(pois.survival.value >= pois.bound - 3.0 * pois.survival.stderr);
    assert!(GrowthParams::new(2.0, 10.0, 5.0).is_err());
    assert!(GrowthParams::new(1.0, 10.0, 1.0).is_err());
    assert!(GrowthParams::new(2.0, 0.0, 1.0).is_err());
}

#[test]
fn default_a_on_trees() {
    let a = default_growth_a(&GraphSpec::RegularTree(3)).unwrap();
    assert!(a > 1.0);
    assert_eq!(default_growth_a(&GraphSpec::Lattice(2)), None);
}

#[test]
fn worms_with_singletons_start_at_the_origin() {
    let g = GraphSpec::RegularTree(3);
    let mut z = realize(&g, &AnimalLaw::Singleton, 0.7, 1, 5).unwrap();
    let mut cfg = WormsConfig::new(2.0, 3);
    cfg.record_sets = true;
    for s in 0..40 {
        z.reseed(s).unwrap();
        let st = worms_explore(&mut z, &cfg).unwrap();
        let (e0, b0, _) = &st.sets[0];
        if st.steps[0].e == 0 {
            assert!(!st.alive && b0.is_empty());
        } else {
            assert_eq!(e0.len(), 1);
            assert!(e0.contains(&g.origin()));
            assert_eq!(b0.len(), 3);
        }
    }
}

#[test]
fn worms_zero_intensity_dies() {
    let mut z = realize(&GraphSpec::RegularTree(3), &worm(), 0.0, 100, 1).unwrap();
    let st = worms_explore(&mut z, &WormsConfig::new(2.0, 5)).unwrap();
    assert!(!st.alive);
    assert_eq!(st.step(), 0);
    assert!(worms_explore(&mut z, &WormsConfig::new(1.0, 5)).is_err());
}

#[test]
fn worms_sets_nest_and_boundaries_are_fresh() {
    let g = GraphSpec::RegularTree(3);
    let mut z = realize_with(&g, &worm(), 0.4, 10, 9, memo()).unwrap();
    let mut cfg = WormsConfig::new(2.0, 4);
    cfg.record_sets = true;
    let mut ran = 0;
    for s in 0..30 {
        z.reseed(s).unwrap();
        let st = worms_explore(&mut z, &cfg).unwrap();
        assert_eq!(st.duplicate_animals, 0);
        assert_eq!(st.boundary_overlaps, 0);
        for w in st.sets.windows(2) {
            let (e0, _, _) = &w[0];
            let (e1, b1, c1) = &w[1];
            ran += 1;
            assert!(e0.is_subset(e1) && c1.is_subset(e1));
            let bd0 = ext_boundary(&g, e0).unwrap();
            let bd1 = ext_boundary(&g, e1).unwrap();
            assert!(b1.is_subset(&bd1));
            assert!(b1.is_disjoint(&bd0));
            assert!(e1.iter().all(|v| e0.contains(v) || c1.contains(v)));
        }
    }
    assert!(ran > 0);
}

#[test]
fn psi_fixes_vertices_whose_block_avoids_the_closure() {
    let g = free34();
    let o = g.origin();
    let a: VertexSet = [o.clone()].into_iter().collect();
    for x in factor_neighborhood(&g, &o, 2).unwrap() {
        assert_eq!(psi_map(&g, &x, &a, 1).unwrap(), x);
    }
    for x in factor_neighborhood(&g, &o, 1).unwrap() {
        let y = psi_map(&g, &x, &a, 1).unwrap();
        assert_ne!(y, x);
        assert!(factor_neighborhood(&g, &x, 2).unwrap().contains(&y));
        assert_eq!(psi_inverse(&g, &y, &a, 1).unwrap(), x);
    }
    assert!(matches!(psi_map(&g, &o, &a, 1), Err(Error::Argument(_))));
    assert!(matches!(psi_map(&GraphSpec::RegularTree(3), &o, &a, 1), Err(Error::Spec(_))));
}

#[test]
fn phi_needs_sprinkle_roots() {
    let g = free34();
    let mut z = realize(&g, &worm(), 5.0, 50, 2).unwrap();
    let a: VertexSet = [g.origin()].into_iter().collect();
    let empty = ViewSpec { lo: 0.5, hi: 0.5, color_seed: 1, cap: 50 };
    for x in ext_boundary(&g, &a).unwrap() {
        assert_eq!(phi_map(&mut z, &x, &a, 1, &empty).unwrap(), None);
        if let Some(y) = phi_map(&mut z, &x, &a, 1, &ViewSpec::full(50)).unwrap() {
            assert_eq!(y, psi_map(&g, &x, &a, 1).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psi_is_injective_on_the_boundary(seed in any::<u64>(), steps in 0usize..12, i in 1u8..=2) {
        let g = free34();
        let a = walk_set(&g, steps, seed);
        let bd = ext_boundary(&g, &a).unwrap();
        let image: VertexSet = bd.iter().map(|x| psi_map(&g, x, &a, i).unwrap()).collect();
        prop_assert_eq!(image.len(), bd.len());
        for x in &bd {
            let y = psi_map(&g, x, &a, i).unwrap();
            prop_assert!(!a.contains(&y));
            prop_assert_eq!(&psi_inverse(&g, &y, &a, i).unwrap(), x);
        }
    }

    #[test]
    fn growth_bound_is_a_probability(a in 1.01f64..10.0, b in 1.0f64..100.0, frac in 0.01f64..0.49, steps in 0usize..20) {
        let p = GrowthParams::new(a, b, frac * b).unwrap();
        let v = p.survival_bound(1.0, steps);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(p.survival_bound(1.0, steps + 1) <= v);
    }
}

fn singleton_first_generation(lambda: f64) -> f64 {
    let q = 1.0 - (-lambda / 2.0).exp();
    q * (2.0 * q * q + 2.0 * q)
}

#[test]
fn singleton_first_generation_mean() {
    let g = free34();
    let cfg = BranchingConfig::new(1, 1);
    let s = branching_survival(&g, &AnimalLaw::Singleton, 1.0, 1, &cfg, 4000, 11, memo()).unwrap();
    let want = singleton_first_generation(1.0);
    let got = s.mean_generations[1];
    assert!((got - want).abs() < 0.1, "{got} vs {want}");
    assert_eq!(s.offspring_overlaps, 0);
    assert_eq!(s.duplicate_animals, 0);
}

#[test]
fn swapped_views_give_the_same_law() {
    let g = free34();
    let mut z = realize_with(&g, &worm(), 1.0, 6, 4, memo()).unwrap();
    let mut base = BranchingConfig::new(1, 1);
    base.saturation = usize::MAX;
    let mut swapped = base.clone();
    swapped.swap_views = true;
    let (mut s1, mut s2) = (Vec::new(), Vec::new());
    for t in 0..400 {
        z.reseed(poisson_zoo::rng::trial_seed(4, t)).unwrap();
        s1.push(free_product_explore(&z, &base, z.seed()).unwrap().generations[1] as f64);
        s2.push(free_product_explore(&z, &swapped, z.seed()).unwrap().generations[1] as f64);
    }
    let mv = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (m, var / v.len() as f64)
    };
    let ((m1, v1), (m2, v2)) = (mv(&s1), mv(&s2));
    assert!((m1 - m2).abs() < 4.0 * (v1 + v2).sqrt(), "{m1} vs {m2}");
}

#[test]
fn branching_records_are_consistent() {
    let g = free34();
    let z = realize_with(&g, &worm(), 1.0, 6, 8, memo()).unwrap();
    let mut cfg = BranchingConfig::new(2, 3);
    cfg.record_sets = true;
    let st = free_product_explore(&z, &cfg, 8).unwrap();
    assert_eq!(st.generations[0], 1);
    assert_eq!(st.generation_sets.len(), st.a_sizes.len());
    for (set, &n) in st.generation_sets.iter().zip(&st.generations[1..]) {
        assert_eq!(set.len(), n);
        assert!(set.is_subset(&st.explored_set));
    }
    assert!(free_product_explore(&z, &BranchingConfig::new(3, 1), 8).is_err());
}

#[test]
fn fat_moment_is_deterministic() {
    let g = GraphSpec::RegularTree(3);
    let a = fat_second_moment(&g, &worm(), 0.5, 5, 8, 40, 3.0, 1, memo()).unwrap();
    let b = fat_second_moment(&g, &worm(), 0.5, 5, 8, 40, 3.0, 1, memo()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 8);
    assert!(a.iter().all(|m| m.mean.value >= 0.0 && m.b_size >= 1));
}
