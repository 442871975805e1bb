use serde::Serialize;

use super::{realize_with, Backend, VidSet, ZooOptions};
use crate::animal::{sample_volumes, AnimalLaw, Animal, moment_from_volumes};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, VertexSet};
use crate::rng::{stream, trial_seed};
use crate::stats::{Estimate, Running};

const TAG_MOMENTS: u64 = 0x6d6f_6d;

/// Occupation and hitting volume at the origin against their size-biased
/// predictions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeBiasRecord {
    pub cap: usize,
    pub mean_mu: Estimate,
    pub mean_sigma_hit: Estimate,
    pub pred_mu: Estimate,
    pub pred_sigma: Estimate,
}

impl SizeBiasRecord {
    /// Distance of each empirical mean from its prediction in combined
    /// standard errors.
    pub fn z_scores(&self) -> (f64, f64) {
        let z = |a: &Estimate, b: &Estimate| (a.value - b.value) / a.stderr.hypot(b.stderr).max(f64::MIN_POSITIVE);
        (z(&self.mean_mu, &self.pred_mu), z(&self.mean_sigma_hit, &self.pred_sigma))
    }
}

/// Runs `n_seeds` zoos sampled at the largest cap and reads each smaller cap
/// off the same animals, so the caps are coupled.
#[allow(clippy::too_many_arguments)]
pub fn size_biasing_stats(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    caps: &[usize],
    n_seeds: usize,
    moment_trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<Vec<SizeBiasRecord>> {
    let cmax = caps.iter().copied().max().ok_or_else(|| Error::Argument("no caps given".into()))?;
    let vols = sample_volumes(law, g, cmax, moment_trials, &mut stream(seed, &[TAG_MOMENTS]))?;
    let mut zoo = realize_with(g, law, lambda, cmax, seed, opts)?;
    let o = zoo.local().origin();
    let target: VidSet = [o].into_iter().collect();
    let mut mu = vec![Running::new(); caps.len()];
    let mut sigma = vec![Running::new(); caps.len()];
    for t in 0..n_seeds {
        zoo.reseed(trial_seed(seed, t as u64))?;
        let hits = zoo.hitting_base(&target, None)?;
        for (i, &c) in caps.iter().enumerate() {
            let (mut m, mut s) = (0.0, 0.0);
            for a in hits.iter().filter(|a| a.volume() <= c) {
                m += 1.0;
                s += a.volume() as f64;
            }
            mu[i].push(m);
            sigma[i].push(s);
        }
    }
    Ok(caps
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let scale = |e: Estimate| Estimate { value: lambda * e.value, stderr: lambda * e.stderr, n: e.n };
            SizeBiasRecord {
                cap: c,
                mean_mu: mu[i].estimate(),
                mean_sigma_hit: sigma[i].estimate(),
                pred_mu: scale(moment_from_volumes(&vols, 1, c).estimate),
                pred_sigma: scale(moment_from_volumes(&vols, 2, c).estimate),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampbellRecord {
    pub empirical: Estimate,
    pub predicted: Estimate,
}

impl CampbellRecord {
    pub fn z_score(&self) -> f64 {
        (self.empirical.value - self.predicted.value) / self.empirical.stderr.hypot(self.predicted.stderr).max(f64::MIN_POSITIVE)
    }
}

/// Named test functions for the Campbell check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CampbellTest {
    Count,
    Volume,
    VolumeSquared,
}

impl CampbellTest {
    pub fn eval(self, a: &Animal) -> f64 {
        let v = a.volume() as f64;
        match self {
            CampbellTest::Count => 1.0,
            CampbellTest::Volume => v,
            CampbellTest::VolumeSquared => v * v,
        }
    }
}

/// Mean of `sum f(animal)` over animals rooted in `region` against
/// `lambda |region| E[f]`, the expectation estimated from `pred_trials`
/// animals rooted at the origin.
#[allow(clippy::too_many_arguments)]
pub fn campbell_check(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    f: impl Fn(&Animal) -> f64,
    region: &VertexSet,
    n_seeds: usize,
    pred_trials: usize,
    seed: u64,
) -> Result<CampbellRecord> {
    let mut zoo = realize_with(g, law, lambda, cap, seed, ZooOptions { backend: Backend::Memo, ..Default::default() })?;
    let mut roots = Vec::new();
    for v in region.sorted() {
        roots.push(zoo.local().intern(v)?);
    }
    let mut emp = Running::new();
    for t in 0..n_seeds {
        zoo.reseed(trial_seed(seed, t as u64))?;
        let mut s = 0.0;
        for &h in &roots {
            for a in zoo.root_animals_local(h)? {
                s += f(&zoo.to_animal(&a));
            }
        }
        emp.push(s);
    }
    let mut rng = stream(seed, &[TAG_MOMENTS]);
    let origin = g.origin();
    let mut pred = Running::new();
    for _ in 0..pred_trials {
        let v = crate::animal::sample_animal(law, g, &origin, Some(cap), &mut rng)?;
        pred.push(v.map_or(0.0, |a| f(&a)));
    }
    let k = lambda * region.len() as f64;
    let p = pred.estimate();
    Ok(CampbellRecord {
        empirical: emp.estimate(),
        predicted: Estimate { value: k * p.value, stderr: k * p.stderr, n: p.n },
    })
}

/// Conditional multiplicity at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicityRecord {
    /// `E[mu(o)]`, the fitted Poisson mean.
    pub mean_mu: Estimate,
    /// `E[mu(o) | mu(o) > 0]`.
    pub conditional_mean: Estimate,
    /// `lambda m_1 + 1` with `m_1` estimated.
    pub bound: f64,
    /// Mean trace size and total volume of the animals hitting the origin.
    pub mean_trace: Estimate,
    pub mean_sigma: Estimate,
}

pub fn multiplicity_stats(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    n_seeds: usize,
    moment_trials: usize,
    seed: u64,
) -> Result<MultiplicityRecord> {
    let vols = sample_volumes(law, g, cap, moment_trials, &mut stream(seed, &[TAG_MOMENTS]))?;
    let m1 = moment_from_volumes(&vols, 1, cap).estimate.value;
    let mut zoo = realize_with(g, law, lambda, cap, seed, ZooOptions::default())?;
    let o = zoo.local().origin();
    let target: VidSet = [o].into_iter().collect();
    let (mut all, mut cond, mut trace, mut sigma) = (Running::new(), Running::new(), Running::new(), Running::new());
    for t in 0..n_seeds {
        zoo.reseed(trial_seed(seed, t as u64))?;
        let hits = zoo.hitting(&target, None)?;
        let m = hits.len() as f64;
        all.push(m);
        if m > 0.0 {
            cond.push(m);
        }
        let tr: VidSet = hits.iter().flat_map(|a| a.members.iter().copied()).collect();
        trace.push(tr.len() as f64);
        sigma.push(hits.iter().map(|a| a.volume() as f64).sum());
    }
    Ok(MultiplicityRecord {
        mean_mu: all.estimate(),
        conditional_mean: cond.estimate(),
        bound: lambda * m1 + 1.0,
        mean_trace: trace.estimate(),
        mean_sigma: sigma.estimate(),
    })
}
