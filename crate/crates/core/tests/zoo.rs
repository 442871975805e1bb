use poisson_zoo::animal::AnimalLaw;
use poisson_zoo::graph::{ball, GraphSpec, VertexId, VertexSet};
use poisson_zoo::zoo::{
    campbell_check, coupled_pair, realize, realize_with, size_biasing_stats, Backend, CampbellTest, RestrictionFilter,
    ZooOptions,
};

fn tree() -> GraphSpec {
    GraphSpec::RegularTree(3)
}

fn law(s: &str) -> AnimalLaw {
    s.parse().unwrap()
}

fn opts(backend: Backend) -> ZooOptions {
    ZooOptions { backend, ..Default::default() }
}

#[test]
fn singleton_root_counts_are_poisson() {
    let g = tree();
    let region = ball(&g, &g.origin(), 9).unwrap();
    let mut z = realize(&g, &AnimalLaw::Singleton, 0.5, 1, 7).unwrap();
    let (mut total, mut empty) = (0usize, 0usize);
    for x in region.iter() {
        let list = z.root_animals(x).unwrap();
        assert!(list.iter().all(|a| a.volume() == 1 && a.members.contains(&a.root)));
        total += list.len();
        empty += list.is_empty() as usize;
    }
    let n = region.len() as f64;
    let mean = total as f64 / n;
    assert!((mean - 0.5).abs() < 3.0 * (0.5 / n).sqrt(), "mean {mean}");
    let p0 = (-0.5f64).exp();
    let f0 = empty as f64 / n;
    assert!((f0 - p0).abs() < 3.0 * (p0 * (1.0 - p0) / n).sqrt(), "P(0) {f0}");
}

#[test]
fn equal_seeds_give_equal_windows() {
    let l = law("worm(power(2.5))");
    let o = tree().origin();
    let mut a = realize(&tree(), &l, 0.3, 6, 42).unwrap();
    let mut b = realize(&tree(), &l, 0.3, 6, 42).unwrap();
    b.root_animals(&VertexId::Word(vec![2, 1, 0])).unwrap();
    assert_eq!(a.window_sample(&o, 3).unwrap(), b.window_sample(&o, 3).unwrap());
    let mut c = realize(&tree(), &l, 0.3, 6, 43).unwrap();
    let differs = (0..20).any(|r| {
        let w1 = a.window_sample(&o, 2 + r % 3).unwrap();
        let w2 = c.window_sample(&o, 2 + r % 3).unwrap();
        w1.mu != w2.mu
    });
    assert!(differs);
}

#[test]
fn size_biasing_memo_and_entrance_agree_at_small_cap() {
    let l = law("worm(power(2.5))");
    for backend in [Backend::Memo, Backend::Entrance] {
        let recs = size_biasing_stats(&tree(), &l, 0.3, &[10], 10_000, 100_000, 5, opts(backend)).unwrap();
        let (z1, z2) = recs[0].z_scores();
        assert!(z1.abs() < 4.0 && z2.abs() < 4.0, "{backend:?} {:?}", recs[0]);
    }
}

#[test]
fn campbell_volume_squared_walk_enumeration() {
    let region: VertexSet = [tree().origin()].into_iter().collect();
    let rec = campbell_check(&tree(), &law("worm(const(3))"), 0.5, 3, |a| CampbellTest::VolumeSquared.eval(a), &region, 10_000, 0, 3).unwrap();
    let exact = 0.5 * 22.0 / 3.0;
    assert!(rec.empirical.within(exact, 3.5), "{:?}", rec.empirical);
}

#[test]
fn coupled_pair_traces_are_nested() {
    let l = law("worm(power(2.5))");
    let o = tree().origin();
    for seed in 0..20 {
        let (mut lo, mut hi) = coupled_pair(&tree(), &l, 8, seed, 0.2, 0.6).unwrap();
        let (wl, wh) = (lo.window_sample(&o, 3).unwrap(), hi.window_sample(&o, 3).unwrap());
        assert!(wl.occupied.is_subset(&wh.occupied));
    }
}

#[test]
fn restricted_samples_respect_the_filter() {
    let g = tree();
    let a: VertexSet = [g.origin(), VertexId::Word(vec![0])].into_iter().collect();
    let b: VertexSet = [VertexId::Word(vec![1]), VertexId::Word(vec![0, 2])].into_iter().collect();
    let f = RestrictionFilter { a, b, cap: 5 };
    let mut z = realize_with(&g, &law("worm(power(2.5))"), 1.5, 5, 9, opts(Backend::Memo)).unwrap();
    let mut seen = 0;
    for s in 0..50 {
        z.reseed(s).unwrap();
        for x in z.restricted_sample(&f).unwrap() {
            assert!(f.passes(&g, &x).unwrap());
            seen += 1;
        }
    }
    assert!(seen > 0);
    let empty = RestrictionFilter { b: VertexSet::new(), ..f.clone() };
    assert!(z.restricted_sample(&empty).unwrap().is_empty());
    let bad = RestrictionFilter { b: [VertexId::Word(vec![1, 2])].into_iter().collect(), ..f };
    assert!(z.restricted_sample(&bad).is_err());
}
