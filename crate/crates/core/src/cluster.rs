//! Site-percolation statistics of the zoo trace: components, crossing of a
//! window, coupled sweeps in `lambda`, threshold bisection and the
//! uniqueness probe.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::animal::AnimalLaw;
use crate::error::{Error, Result};
use crate::graph::{neighbors, GraphSpec, VertexId, VertexSet, Vid};
use crate::rng::mix;
use crate::stats::{Proportion, Running};
use crate::zoo::{par_trials, realize_with, Backend, LocalWindow, ViewSpec, WindowSample, ZooOptions, ZooRealization};

/// Disjoint-set forest with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }

    pub fn size_of(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterReport {
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    #[serde(skip)]
    pub components: Vec<VertexSet>,
    /// `None` when the center is unoccupied.
    pub origin_cluster_size: Option<usize>,
    /// The center's cluster reaches the sphere of the window radius.
    pub crossing: bool,
    /// Clusters meeting both the ball of radius `radius / 4` and the sphere.
    pub boundary_crossing_clusters: usize,
}

/// Components of the subgraph induced on the occupied vertices of a window.
pub fn clusters(g: &GraphSpec, window: &WindowSample) -> Result<ClusterReport> {
    let verts: Vec<&VertexId> = window.occupied.sorted();
    let index: FxHashMap<&VertexId, u32> = verts.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
    let mut uf = UnionFind::new(verts.len());
    for (i, v) in verts.iter().enumerate() {
        for u in neighbors(g, v)? {
            if let Some(&j) = index.get(&u) {
                uf.union(i as u32, j);
            }
        }
    }
    let dist = crate::graph::ball_layers(g, &window.center, window.radius as usize)?;
    let depth = |v: &VertexId| dist.get(v).copied().unwrap_or(usize::MAX) as u32;
    let mut groups: FxHashMap<u32, Vec<usize>> = FxHashMap::default();
    for i in 0..verts.len() {
        groups.entry(uf.find(i as u32)).or_default().push(i);
    }
    let mut components: Vec<VertexSet> = groups
        .into_values()
        .map(|ix| ix.into_iter().map(|i| verts[i].clone()).collect())
        .collect();
    components.sort_by(|a: &VertexSet, b: &VertexSet| b.len().cmp(&a.len()).then_with(|| a.sorted().cmp(&b.sorted())));
    let r = window.radius;
    let inner = r / 4;
    let origin = components.iter().find(|c| c.contains(&window.center));
    let crossing = origin.is_some_and(|c| c.iter().any(|v| depth(v) == r));
    let boundary_crossing_clusters = components
        .iter()
        .filter(|c| c.iter().any(|v| depth(v) <= inner) && c.iter().any(|v| depth(v) == r))
        .count();
    Ok(ClusterReport {
        sizes: components.iter().map(|c| c.len()).collect(),
        origin_cluster_size: origin.map(|c| c.len()),
        crossing,
        boundary_crossing_clusters,
        components,
    })
}

/// Number of clusters linking the inner ball to the boundary sphere.
pub fn uniqueness_probe(g: &GraphSpec, window: &WindowSample) -> Result<usize> {
    Ok(clusters(g, window)?.boundary_crossing_clusters)
}

/// Statistics of the center's cluster in one window.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct OriginCluster {
    pub(crate) size: usize,
    pub(crate) crossing: bool,
    pub(crate) at_radius: usize,
    pub(crate) at_half: usize,
}

/// Breadth-first search of the origin cluster of a view within `radius`.
fn origin_cluster(zoo: &mut ZooRealization, window: Option<(&LocalWindow, &[u32])>, radius: u32, view: &ViewSpec) -> Result<OriginCluster> {
    let o = zoo.local().origin();
    let half = radius / 2;
    let occupied = |zoo: &mut ZooRealization, v: Vid| -> Result<bool> {
        match window {
            Some((w, mu)) => Ok(w.index.get(&v).is_some_and(|&i| mu[i as usize] > 0)),
            None => zoo.covered(v, view),
        }
    };
    let mut out = OriginCluster::default();
    if !occupied(zoo, o)? {
        return Ok(out);
    }
    let mut seen: FxHashMap<Vid, u32> = FxHashMap::default();
    seen.insert(o, 0);
    let mut queue = VecDeque::from([o]);
    while let Some(v) = queue.pop_front() {
        let d = zoo.local().depth(v);
        out.size += 1;
        if d == radius {
            out.at_radius += 1;
        }
        if d == half {
            out.at_half += 1;
        }
        for u in zoo.local().neighbors(v) {
            if seen.contains_key(&u) || zoo.local().depth(u) > radius {
                continue;
            }
            seen.insert(u, 0);
            if occupied(zoo, u)? {
                queue.push_back(u);
            }
        }
    }
    out.crossing = out.at_radius > 0;
    Ok(out)
}

/// Origin-cluster statistics for several views of one realization, from a
/// single window when the backend needs one.
pub(crate) fn origin_clusters(zoo: &mut ZooRealization, radius: u32, views: &[ViewSpec]) -> Result<Vec<OriginCluster>> {
    match zoo.backend() {
        Backend::Memo => views.iter().map(|v| origin_cluster(zoo, None, radius, v)).collect(),
        _ => {
            let o = zoo.local().origin();
            let w = zoo.window_local(o, radius)?;
            let seed = zoo.seed();
            views
                .iter()
                .map(|v| {
                    let mu = w.mu(seed, v);
                    origin_cluster(zoo, Some((&w, &mu)), radius, v)
                })
                .collect()
        }
    }
}

fn check_origin_distance(g: &GraphSpec) -> Result<()> {
    if g.order().is_some() {
        return Err(Error::Spec(format!("crossing needs an infinite graph, got {g}")));
    }
    Ok(())
}

/// Fraction of seeds whose origin cluster crosses `ball(o, radius)`.
#[allow(clippy::too_many_arguments)]
pub fn crossing_probability(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    radius: u32,
    trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<Proportion> {
    check_origin_distance(g)?;
    if trials == 0 {
        return Err(Error::Argument("trials must be positive".into()));
    }
    let zoo = realize_with(g, law, lambda, cap, seed, opts)?;
    let view = ViewSpec::full(cap);
    let rows = par_trials(&zoo, trials, seed, |z| Ok(origin_clusters(z, radius, &[view])?[0].crossing))?;
    Ok(Proportion::new(rows.iter().filter(|&&c| c).count() as u64, trials as u64))
}

/// Per-seed crossing indicators for coupled views, one row per seed.
#[allow(clippy::too_many_arguments)]
pub fn coupled_crossings(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    radius: u32,
    views: &[ViewSpec],
    trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<Vec<Vec<bool>>> {
    check_origin_distance(g)?;
    let zoo = realize_with(g, law, lambda, cap, seed, opts)?;
    par_trials(&zoo, trials, seed, |z| Ok(origin_clusters(z, radius, views)?.iter().map(|c| c.crossing).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub lambda_grid: Vec<f64>,
    pub crossing_prob: Vec<Proportion>,
    pub trials: usize,
    /// Every seed's indicator vector is nondecreasing along the grid.
    pub monotone: bool,
}

impl SweepResult {
    /// `lambda,crossing_prob,ci_lo,ci_hi,trials` rows.
    pub fn rows(&self) -> Vec<[f64; 5]> {
        self.lambda_grid
            .iter()
            .zip(&self.crossing_prob)
            .map(|(&l, p)| [l, p.value, p.ci_lo, p.ci_hi, self.trials as f64])
            .collect()
    }
}

const TAG_SWEEP: u64 = 0x7377_6565_70;

/// Views of a zoo realized at `lambda_max` with colour intervals `[0, l / lambda_max)`.
pub fn lambda_views(grid: &[f64], cap: usize, color_seed: u64) -> Result<Vec<ViewSpec>> {
    let max = grid.iter().copied().fold(0.0, f64::max);
    if grid.windows(2).any(|w| w[0] > w[1]) || grid.first().is_none_or(|&l| l < 0.0) || max <= 0.0 {
        return Err(Error::Argument("lambda grid must be ascending, nonnegative and not all zero".into()));
    }
    Ok(grid.iter().map(|&l| ViewSpec { lo: 0.0, hi: l / max, color_seed, cap }).collect())
}

/// Crossing probabilities along an ascending grid, all points read from one
/// realization per seed.
#[allow(clippy::too_many_arguments)]
pub fn lambda_sweep(
    g: &GraphSpec,
    law: &AnimalLaw,
    cap: usize,
    radius: u32,
    grid: &[f64],
    trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<SweepResult> {
    let views = lambda_views(grid, cap, mix(seed, TAG_SWEEP))?;
    let max = grid[grid.len() - 1];
    let rows = coupled_crossings(g, law, max, cap, radius, &views, trials, seed, opts)?;
    let monotone = rows.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1]));
    let crossing_prob = (0..grid.len())
        .map(|i| Proportion::new(rows.iter().filter(|r| r[i]).count() as u64, trials as u64))
        .collect();
    Ok(SweepResult { lambda_grid: grid.to_vec(), crossing_prob, trials, monotone })
}

/// Finite-window statistic whose sign change locates the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ThresholdProxy {
    /// `P(cross) - threshold`.
    Crossing { threshold: f64 },
    /// Mean of `|C ∩ S_r| - |C ∩ S_{r/2}|` for the origin cluster `C`;
    /// positive exactly when the cluster's sphere profile grows.
    SphereGrowth,
}

impl ThresholdProxy {
    fn value(&self, c: &OriginCluster) -> f64 {
        match self {
            ThresholdProxy::Crossing { threshold } => c.crossing as u8 as f64 - threshold,
            ThresholdProxy::SphereGrowth => c.at_radius as f64 - c.at_half as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaInterval {
    pub lo: f64,
    pub hi: f64,
    pub proxy: ThresholdProxy,
    pub radius: u32,
    /// `(lambda, statistic, stderr, trials)` at every evaluated point.
    pub evaluations: Vec<(f64, f64, f64, usize)>,
    /// Midpoints where the statistic stayed within its confidence band at
    /// the largest trial count and the sign of the point estimate decided.
    pub ambiguous: usize,
}

/// Settings of the threshold bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct BisectionConfig {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub trials: usize,
    /// Trials are doubled while the comparison is ambiguous, up to this.
    pub max_trials: usize,
    pub z: f64,
    pub proxy: ThresholdProxy,
}

impl BisectionConfig {
    pub fn new(lo: f64, hi: f64, tol: f64, trials: usize) -> Self {
        BisectionConfig { lo, hi, tol, trials, max_trials: 8 * trials, z: 2.0, proxy: ThresholdProxy::SphereGrowth }
    }
}

fn proxy_at(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    radius: u32,
    trials: usize,
    seed: u64,
    proxy: ThresholdProxy,
) -> Result<Running> {
    let zoo = realize_with(g, law, lambda, cap, seed, ZooOptions::default())?;
    let view = ViewSpec::full(cap);
    let xs = par_trials(&zoo, trials, seed, |z| Ok(proxy.value(&origin_clusters(z, radius, &[view])?[0])))?;
    Ok(xs.into_iter().collect())
}

/// Bisection for the zero of the proxy statistic in `lambda`.
pub fn estimate_lambda_c(
    g: &GraphSpec,
    law: &AnimalLaw,
    cap: usize,
    radius: u32,
    cfg: &BisectionConfig,
    seed: u64,
) -> Result<LambdaInterval> {
    check_origin_distance(g)?;
    if !(cfg.tol > 0.0 && cfg.lo < cfg.hi && cfg.trials > 0) {
        return Err(Error::Argument("need tol > 0, lo < hi and trials > 0".into()));
    }
    let mut evals = Vec::new();
    let mut eval = |lambda: f64, trials: usize, k: u64| -> Result<Running> {
        let r = proxy_at(g, law, lambda, cap, radius, trials, mix(seed, k), cfg.proxy)?;
        let e = r.estimate();
        evals.push((lambda, e.value, e.stderr, trials));
        Ok(r)
    };
    let (flo, fhi) = (eval(cfg.lo, cfg.trials, 0)?.mean(), eval(cfg.hi, cfg.trials, 1)?.mean());
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Argument(format!(
            "[{}, {}] does not bracket the threshold: statistic {flo} and {fhi}",
            cfg.lo, cfg.hi
        )));
    }
    let (mut lo, mut hi) = (cfg.lo, cfg.hi);
    let mut ambiguous = 0;
    let mut k = 2;
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        let mut n = cfg.trials;
        let above = loop {
            let r = eval(mid, n, k)?;
            k += 1;
            let e = r.estimate();
            if e.value.abs() > cfg.z * e.stderr {
                break e.value > 0.0;
            }
            if n >= cfg.max_trials {
                ambiguous += 1;
                break e.value > 0.0;
            }
            n *= 2;
        };
        if above {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(LambdaInterval { lo, hi, proxy: cfg.proxy, radius, evaluations: evals, ambiguous })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_merges() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 4));
        assert_eq!(uf.size_of(3), 4);
        assert_eq!(uf.size_of(2), 1);
    }
}
