use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::animal::{moment_from_volumes, sample_volumes, AnimalLaw};
use crate::error::{Error, Result};
use crate::graph::{closure, ext_boundary, factor_neighborhood, known_constants, GraphSpec, LocalGraph, VertexId, VertexSet, Vid};
use crate::rng::{stream, trial_seed};
use crate::stats::{Estimate, Proportion, Running};
use crate::zoo::{par_trials, realize_with, AnimalKey, ViewSpec, VidSet, ZooOptions, ZooRealization};

const TAG_PILOT: u64 = 0x7069_6c6f_74;
const TAG_REPRO: u64 = 0x7265_7072_6f;

fn check_direction(i: u8) -> Result<()> {
    if i == 1 || i == 2 {
        Ok(())
    } else {
        Err(Error::Argument(format!("direction {i} must be 1 or 2")))
    }
}

fn check_free(g: &GraphSpec) -> Result<()> {
    if g.is_free_product() {
        Ok(())
    } else {
        Err(Error::Spec(format!("{g} is not a free product")))
    }
}

/// `Psi_i(x, A)`: `x` itself when its `G_i`-neighbourhood avoids the closure
/// of `A`, otherwise the least vertex of its other neighbourhood.
pub fn psi_map(g: &GraphSpec, x: &VertexId, a: &VertexSet, i: u8) -> Result<VertexId> {
    check_free(g)?;
    check_direction(i)?;
    if !ext_boundary(g, a)?.contains(x) {
        return Err(Error::Argument(format!("{x} is not on the exterior boundary")));
    }
    let cl = closure(g, a)?;
    psi_unchecked(g, x, &cl, i)
}

fn psi_unchecked(g: &GraphSpec, x: &VertexId, cl: &VertexSet, i: u8) -> Result<VertexId> {
    if factor_neighborhood(g, x, i as usize)?.iter().all(|y| !cl.contains(y)) {
        return Ok(x.clone());
    }
    Ok(factor_neighborhood(g, x, 3 - i as usize)?.into_iter().min().expect("nonempty factor"))
}

/// The boundary vertex `x` with `Psi_i(x, A) = y`.
pub fn psi_inverse(g: &GraphSpec, y: &VertexId, a: &VertexSet, i: u8) -> Result<VertexId> {
    check_free(g)?;
    check_direction(i)?;
    let bd = ext_boundary(g, a)?;
    let cl = closure(g, a)?;
    if bd.contains(y) && psi_unchecked(g, y, &cl, i)? == *y {
        return Ok(y.clone());
    }
    for x in factor_neighborhood(g, y, 3 - i as usize)? {
        if bd.contains(&x) && psi_unchecked(g, &x, &cl, i)? == *y {
            return Ok(x);
        }
    }
    Err(Error::Argument(format!("{y} is not an image of the boundary")))
}

/// `Phi_i(x, A)`: the vertex `Psi_i(x, A)` when both it and `x` carry a root
/// of `sprinkle` (animals over the cap count), else `None`.
pub fn phi_map(zoo: &mut ZooRealization, x: &VertexId, a: &VertexSet, i: u8, sprinkle: &ViewSpec) -> Result<Option<VertexId>> {
    let g = zoo.graph().clone();
    let z = psi_map(&g, x, a, i)?;
    let hx = zoo.local().intern(x)?;
    let hz = zoo.local().intern(&z)?;
    Ok((zoo.has_root_in(hx, sprinkle) && zoo.has_root_in(hz, sprinkle)).then_some(z))
}

fn block(lg: &mut LocalGraph, h: Vid, factor: u8) -> Vec<Vid> {
    let nb = lg.neighbors(h);
    nb.iter().enumerate().filter(|&(k, _)| lg.factor_of_slot(k) == Some(factor)).map(|(_, &u)| u).collect()
}

fn psi_local(zoo: &mut ZooRealization, y: Vid, cl: &VidSet, i: u8) -> Vid {
    let own = block(zoo.local(), y, i - 1);
    if own.iter().all(|u| !cl.contains(u)) {
        return y;
    }
    let other = block(zoo.local(), y, 2 - i);
    other.into_iter().min_by_key(|&u| zoo.vertex_of(u)).expect("nonempty factor")
}

/// The mapped boundary of `set`, skipping `skip`: pairs `(y, Phi_i(y))` in
/// key order.
fn phi_boundary(zoo: &mut ZooRealization, set: &VidSet, skip: &VidSet, i: u8, sprinkle: &ViewSpec) -> Vec<(Vid, Vid)> {
    let cl = zoo.closure_local(set);
    let mut bd: Vec<(u64, Vid)> = {
        let lg = zoo.local();
        cl.iter().filter(|v| !set.contains(v) && !skip.contains(v)).map(|&v| (lg.key(v), v)).collect()
    };
    bd.sort_unstable();
    let mut out = Vec::new();
    for (_, y) in bd {
        if !zoo.has_root_in(y, sprinkle) {
            continue;
        }
        let z = psi_local(zoo, y, &cl, i);
        if z == y || zoo.has_root_in(z, sprinkle) {
            out.push((y, z));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchingConfig {
    /// Factor (1 or 2) the offspring grow into.
    pub direction: u8,
    pub max_gens: usize,
    /// A generation larger than this ends the run as surviving.
    pub saturation: usize,
    /// Use the first half of the colour split for branching instead.
    pub swap_views: bool,
    pub record_sets: bool,
}

impl BranchingConfig {
    pub fn new(direction: u8, max_gens: usize) -> Self {
        BranchingConfig { direction, max_gens, saturation: 2_000, swap_views: false, record_sets: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchingState {
    pub direction: u8,
    /// `|B_n|`, starting with `|B_0| = 1`.
    pub generations: Vec<usize>,
    /// `|A_n|` for `n >= 1`.
    pub a_sizes: Vec<usize>,
    pub explored: usize,
    pub alive: bool,
    pub saturated: bool,
    /// Vertices claimed by two offspring sets of one generation.
    pub offspring_overlaps: usize,
    pub duplicate_animals: usize,
    #[serde(skip)]
    pub generation_sets: Vec<VertexSet>,
    #[serde(skip)]
    pub a_sets: Vec<VertexSet>,
    #[serde(skip)]
    pub explored_set: VertexSet,
}

/// Branching exploration of a free product. The zoo is split into a
/// sprinkling half, whose roots glue offspring to the explored set, and a
/// branching half, whose capped animals grow it.
pub fn free_product_explore(zoo: &ZooRealization, cfg: &BranchingConfig, sprinkle_seed: u64) -> Result<BranchingState> {
    check_free(zoo.graph())?;
    check_direction(cfg.direction)?;
    let (mut s_view, mut b_view) = zoo.view().split(0.5, sprinkle_seed)?;
    if cfg.swap_views {
        std::mem::swap(&mut s_view, &mut b_view);
    }
    let mut br = zoo.with_view(b_view)?;
    let i = cfg.direction;
    let mut used: FxHashSet<AnimalKey> = FxHashSet::default();
    let mut st = BranchingState {
        direction: i,
        generations: vec![1],
        a_sizes: Vec::new(),
        explored: 0,
        alive: true,
        saturated: false,
        offspring_overlaps: 0,
        duplicate_animals: 0,
        generation_sets: Vec::new(),
        a_sets: Vec::new(),
        explored_set: VertexSet::new(),
    };
    let o = br.local().origin();
    let mut explored: VidSet = [o].into_iter().collect();
    let mut gen: Vec<Vid> = vec![o];
    for n in 1..=cfg.max_gens {
        let mut a_n = VidSet::default();
        let mut b_n: Vec<Vid> = Vec::new();
        let mut claimed = VidSet::default();
        for &x in &gen {
            let (alpha, skip) = if n == 1 {
                let target: VidSet = [x].into_iter().collect();
                (br.hitting(&target, None)?, VidSet::default())
            } else {
                let entry: VidSet = block(br.local(), x, i - 1).into_iter().collect();
                let mut ball = entry.clone();
                ball.extend(block(br.local(), x, 2 - i));
                ball.insert(x);
                (br.hitting(&ball, Some(&entry))?, ball)
            };
            for a in &alpha {
                if !used.insert(a.id) {
                    st.duplicate_animals += 1;
                }
            }
            let set: VidSet = alpha.iter().flat_map(|a| a.members.iter().copied()).collect();
            for (y, z) in phi_boundary(&mut br, &set, &skip, i, &s_view) {
                if !claimed.insert(z) {
                    st.offspring_overlaps += 1;
                    continue;
                }
                b_n.push(z);
                explored.insert(y);
                explored.insert(z);
            }
            explored.extend(set.iter().copied());
            a_n.extend(set);
        }
        st.a_sizes.push(a_n.len());
        st.generations.push(b_n.len());
        if cfg.record_sets {
            st.a_sets.push(a_n.iter().map(|&h| br.vertex_of(h)).collect());
            st.generation_sets.push(b_n.iter().map(|&h| br.vertex_of(h)).collect());
        }
        if b_n.is_empty() {
            st.alive = false;
            break;
        }
        if b_n.len() > cfg.saturation {
            st.saturated = true;
            break;
        }
        gen = b_n;
    }
    st.explored = explored.len();
    if cfg.record_sets {
        st.explored_set = explored.iter().map(|&h| br.vertex_of(h)).collect();
    }
    Ok(st)
}

/// The direction whose fat `alpha_o` is larger on average over `pilot`
/// independent zoos; ties go to 1.
pub fn favored_direction(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    pilot: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<u8> {
    let rec = reproduction_mean_estimate(g, law, lambda, cap, pilot, 1, seed ^ TAG_PILOT, opts)?;
    Ok(if rec.mean_alpha[1].value > rec.mean_alpha[0].value { 2 } else { 1 })
}

/// Mean offspring count of one vertex in each direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionRecord {
    pub mean_alpha: [Estimate; 2],
    pub mean_beta_hat: [Estimate; 2],
    pub mean_beta: [Estimate; 2],
    /// Direction with the larger `mean_beta`.
    pub best: u8,
    pub m1: Estimate,
    pub m2: Estimate,
    /// Lower bound on the mean offspring count of the favored direction;
    /// `None` when the Cheeger constant is unknown.
    pub claim_bound: Option<f64>,
}

impl ReproductionRecord {
    pub fn best_beta(&self) -> &Estimate {
        &self.mean_beta[self.best as usize - 1]
    }

    /// Whether the claimed bound is nonpositive, so says nothing.
    pub fn vacuous(&self) -> bool {
        self.claim_bound.is_none_or(|b| b <= 0.0)
    }
}

/// `(1 - e^{-lambda/2})^2 (lambda h^2 m2 / (2 (lambda m1 + 2)) - (d + 1))`.
pub fn reproduction_bound(lambda: f64, h: f64, d: usize, m1: f64, m2: f64) -> f64 {
    let p = 1.0 - (-lambda / 2.0).exp();
    p * p * (lambda * h * h * m2 / (2.0 * (lambda * m1 + 2.0)) - (d as f64 + 1.0))
}

/// Samples `alpha_x`, `beta_hat_x` and `beta_x` at the origin in `trials`
/// independent zoos, for both directions; moments of the capped volume come
/// from `moment_trials` animal samples.
#[allow(clippy::too_many_arguments)]
pub fn reproduction_mean_estimate(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    trials: usize,
    moment_trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<ReproductionRecord> {
    check_free(g)?;
    let mut zoo = realize_with(g, law, lambda, cap, seed, opts)?;
    let (s_view, b_view) = zoo.view().split(0.5, seed ^ TAG_REPRO)?;
    let mut stats = [[Running::new(), Running::new(), Running::new()], [Running::new(), Running::new(), Running::new()]];
    for t in 0..trials {
        zoo.reseed(trial_seed(seed, t as u64))?;
        let mut br = zoo.with_view(b_view)?;
        let x = br.local().origin();
        for i in 1..=2u8 {
            let entry: VidSet = block(br.local(), x, i - 1).into_iter().collect();
            let mut ball = entry.clone();
            ball.extend(block(br.local(), x, 2 - i));
            ball.insert(x);
            let alpha = br.hitting(&ball, Some(&entry))?;
            let set: VidSet = alpha.iter().flat_map(|a| a.members.iter().copied()).collect();
            let cl = br.closure_local(&set);
            let hat = cl.iter().filter(|v| !set.contains(v) && !ball.contains(v)).count();
            let beta = phi_boundary(&mut br, &set, &ball, i, &s_view).len();
            let s = &mut stats[i as usize - 1];
            s[0].push(set.len() as f64);
            s[1].push(hat as f64);
            s[2].push(beta as f64);
        }
    }
    let (m1, m2) = if moment_trials > 0 {
        let vols = sample_volumes(law, g, cap, moment_trials, &mut stream(seed, &[TAG_REPRO]))?;
        (moment_from_volumes(&vols, 1, cap).estimate, moment_from_volumes(&vols, 2, cap).estimate)
    } else {
        (Estimate::exact(f64::NAN), Estimate::exact(f64::NAN))
    };
    let k = known_constants(g);
    let claim_bound = k.cheeger.map(|h| reproduction_bound(lambda, h, k.degree, m1.value, m2.value));
    let est = |j: usize| [stats[0][j].estimate(), stats[1][j].estimate()];
    let mean_beta = est(2);
    let best = if mean_beta[1].value > mean_beta[0].value { 2 } else { 1 };
    Ok(ReproductionRecord { mean_alpha: est(0), mean_beta_hat: est(1), mean_beta, best, m1, m2, claim_bound })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchingSurvival {
    pub direction: u8,
    pub survival: Proportion,
    pub mean_generations: Vec<f64>,
    pub offspring_overlaps: usize,
    pub duplicate_animals: usize,
}

/// Runs the branching exploration in `trials` independent zoos.
#[allow(clippy::too_many_arguments)]
pub fn branching_survival(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    cfg: &BranchingConfig,
    trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<BranchingSurvival> {
    let zoo = realize_with(g, law, lambda, cap, seed, opts)?;
    let runs = par_trials(&zoo, trials, seed, |z| free_product_explore(z, cfg, z.seed()))?;
    let mut alive = 0;
    let mut sums = vec![0.0; cfg.max_gens + 1];
    let (mut overlaps, mut dups) = (0, 0);
    for st in runs {
        alive += st.alive as u64;
        overlaps += st.offspring_overlaps;
        dups += st.duplicate_animals;
        for (n, &b) in st.generations.iter().enumerate() {
            sums[n] += b as f64;
        }
    }
    Ok(BranchingSurvival {
        direction: cfg.direction,
        survival: Proportion::new(alive, trials as u64),
        mean_generations: sums.iter().map(|s| s / trials.max(1) as f64).collect(),
        offspring_overlaps: overlaps,
        duplicate_animals: dups,
    })
}
