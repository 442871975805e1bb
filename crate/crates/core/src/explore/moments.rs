use rand::Rng;
use serde::Serialize;

use crate::animal::AnimalLaw;
use crate::error::Result;
use crate::graph::{ball, GraphSpec};
use crate::rng::{stream, trial_seed};
use crate::stats::{variance_estimate, Estimate, Running};
use crate::zoo::{realize_with, VidSet, ZooOptions};

const TAG_PAIRS: u64 = 0x7061_6972;

/// Fat size moments for one random pair `(A, B)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FatMoments {
    pub a_size: usize,
    pub b_size: usize,
    pub mean: Estimate,
    pub variance: Estimate,
    /// `(|ball(o, R)| + 1) * mean`.
    pub bound: f64,
    pub violated: bool,
}

/// For `pairs` random connected sets `A` (random-walk traces from the
/// origin) and nonempty `B` inside their exterior boundary, compares the
/// variance of the fat trace size over `n_seeds` zoos with
/// `(|ball(o, R)| + 1)` times its mean, allowing `z` standard errors.
#[allow(clippy::too_many_arguments)]
pub fn fat_second_moment(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    pairs: usize,
    n_seeds: usize,
    z: f64,
    seed: u64,
    opts: ZooOptions,
) -> Result<Vec<FatMoments>> {
    let k = (ball(g, &g.origin(), cap)?.len() + 1) as f64;
    let mut zoo = realize_with(g, law, lambda, cap, seed, opts)?;
    let mut rng = stream(seed, &[TAG_PAIRS]);
    let deg = g.degree();
    let mut out = Vec::with_capacity(pairs);
    for p in 0..pairs {
        let lg = zoo.local();
        let mut h = lg.origin();
        let mut a: VidSet = [h].into_iter().collect();
        for _ in 0..rng.random_range(0..12) {
            h = lg.neighbor(h, rng.random_range(0..deg));
            a.insert(h);
        }
        let cl = zoo.closure_local(&a);
        let mut bd: Vec<_> = cl.iter().copied().filter(|v| !a.contains(v)).collect();
        bd.sort_unstable_by_key(|&v| zoo.local().key(v));
        let mut b: VidSet = bd.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if b.is_empty() {
            b.insert(bd[rng.random_range(0..bd.len())]);
        }
        let mut xs = Vec::with_capacity(n_seeds);
        for t in 0..n_seeds {
            zoo.reseed(trial_seed(mix_pair(seed, p), t as u64))?;
            let fat = zoo.hitting(&cl, Some(&b))?;
            let tr: VidSet = fat.iter().flat_map(|x| x.members.iter().copied()).collect();
            xs.push(tr.len() as f64);
        }
        let mean = xs.iter().copied().collect::<Running>().estimate();
        let variance = variance_estimate(&xs);
        let slack = z * variance.stderr.hypot(k * mean.stderr);
        out.push(FatMoments {
            a_size: a.len(),
            b_size: b.len(),
            bound: k * mean.value,
            violated: variance.value > k * mean.value + slack,
            mean,
            variance,
        });
    }
    Ok(out)
}

fn mix_pair(seed: u64, p: usize) -> u64 {
    crate::rng::mix(seed ^ TAG_PAIRS, p as u64)
}
