use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::animal::AnimalLaw;
use crate::error::{Error, Result};
use crate::graph::{known_constants, GraphSpec, VertexSet};
use crate::stats::Proportion;
use crate::zoo::{par_trials, realize_with, AnimalKey, VidSet, ZooOptions, ZooRealization};

#[derive(Clone, Debug, PartialEq)]
pub struct WormsConfig {
    /// Growth factor of the events `|E_n| >= a |E_{n-1}|`.
    pub a: f64,
    pub max_steps: usize,
    /// Once `|E_n|` exceeds this the run stops and counts as surviving.
    pub saturation: usize,
    /// Keep every `(E_n, B_n, C_n)` as vertex sets.
    pub record_sets: bool,
}

impl WormsConfig {
    pub fn new(a: f64, max_steps: usize) -> Self {
        WormsConfig { a, max_steps, saturation: 100_000, record_sets: false }
    }
}

/// `d / (2 c_2) ∨ 1` with `c_2 = (1 - rho)^2 (1 + h) / 2`, from tabulated
/// constants; `None` when either constant is unknown.
pub fn default_growth_a(g: &GraphSpec) -> Option<f64> {
    let k = known_constants(g);
    let c2 = (1.0 - k.spectral_radius?).powi(2) * (1.0 + k.cheeger?) / 2.0;
    if c2 <= 0.0 {
        return None;
    }
    Some((k.degree as f64 / (2.0 * c2)).max(1.0))
}

/// One step of the fattening exploration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepLog {
    pub n: usize,
    pub e: usize,
    pub b: usize,
    pub c: usize,
    pub growth_ok: bool,
    pub animals_consumed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplorationState {
    /// `steps[0]` describes `E_0, B_0`; `steps[n]` the sets after step `n`.
    pub steps: Vec<StepLog>,
    pub alive: bool,
    pub saturated: bool,
    /// Animals met by more than one step; zero when the restriction filters
    /// are disjoint.
    pub duplicate_animals: usize,
    /// Steps where `B_{n+1}` met `∂E_n`.
    pub boundary_overlaps: usize,
    /// Steps after a growth event where `|∂E_n| - |B_n| > d |E_{n-1}|`.
    pub old_boundary_violations: usize,
    #[serde(skip)]
    pub sets: Vec<(VertexSet, VertexSet, VertexSet)>,
}

impl ExplorationState {
    pub fn step(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    /// Survived with every growth event holding.
    pub fn conformant(&self) -> bool {
        self.alive && self.steps.iter().skip(1).all(|s| s.growth_ok)
    }
}

fn boundary(zoo: &mut ZooRealization, e: &VidSet) -> VidSet {
    let lg = zoo.local();
    let mut out = VidSet::default();
    for &v in e {
        for u in lg.neighbors(v) {
            if !e.contains(&u) {
                out.insert(u);
            }
        }
    }
    out
}

/// The fattening exploration from the origin: `E_0` is the trace of the
/// animals of the view through the origin, and step `n + 1` adds the
/// animals that meet `B_n` while avoiding the rest of the closure of `E_n`.
pub fn worms_explore(zoo: &mut ZooRealization, cfg: &WormsConfig) -> Result<ExplorationState> {
    if !(cfg.a > 1.0) {
        return Err(Error::Argument(format!("growth factor a = {} must exceed 1", cfg.a)));
    }
    let d = zoo.graph().degree();
    let o = zoo.local().origin();
    let mut used: FxHashSet<AnimalKey> = FxHashSet::default();
    let mut state = ExplorationState {
        steps: Vec::new(),
        alive: false,
        saturated: false,
        duplicate_animals: 0,
        boundary_overlaps: 0,
        old_boundary_violations: 0,
        sets: Vec::new(),
    };
    let origin: VidSet = [o].into_iter().collect();
    let first = zoo.hitting(&origin, None)?;
    let mut e: VidSet = first.iter().flat_map(|a| a.members.iter().copied()).collect();
    used.extend(first.iter().map(|a| a.id));
    let mut bd = boundary(zoo, &e);
    let mut b = bd.clone();
    state.steps.push(StepLog { n: 0, e: e.len(), b: b.len(), c: 0, growth_ok: true, animals_consumed: first.len() });
    if cfg.record_sets {
        state.sets.push((to_set(zoo, &e), to_set(zoo, &b), VertexSet::new()));
    }
    if e.is_empty() {
        return Ok(state);
    }
    state.alive = true;
    let mut grew = true;
    for n in 0..cfg.max_steps {
        if e.len() > cfg.saturation {
            state.saturated = true;
            break;
        }
        let mut w = e.clone();
        w.extend(bd.iter().copied());
        let fat = zoo.hitting(&w, Some(&b))?;
        for a in &fat {
            if !used.insert(a.id) {
                state.duplicate_animals += 1;
            }
        }
        let c: VidSet = fat.iter().flat_map(|a| a.members.iter().copied()).collect();
        if c.is_empty() {
            state.alive = false;
            state.steps.push(StepLog { n: n + 1, e: e.len(), b: 0, c: 0, growth_ok: false, animals_consumed: 0 });
            break;
        }
        let prev_e = e.len();
        e.extend(c.iter().copied());
        let mut next_bd: VidSet = bd.iter().copied().filter(|v| !e.contains(v)).collect();
        let lg = zoo.local();
        for &v in &c {
            for u in lg.neighbors(v) {
                if !e.contains(&u) {
                    next_bd.insert(u);
                }
            }
        }
        let next_b: VidSet = next_bd.iter().copied().filter(|v| !bd.contains(v)).collect();
        if next_b.iter().any(|v| bd.contains(v)) {
            state.boundary_overlaps += 1;
        }
        if grew && next_bd.len() - next_b.len() > d * prev_e {
            state.old_boundary_violations += 1;
        }
        let growth_ok = e.len() as f64 >= cfg.a * prev_e as f64;
        grew = growth_ok;
        state.steps.push(StepLog { n: n + 1, e: e.len(), b: next_b.len(), c: c.len(), growth_ok, animals_consumed: fat.len() });
        if cfg.record_sets {
            state.sets.push((to_set(zoo, &e), to_set(zoo, &next_b), to_set(zoo, &c)));
        }
        bd = next_bd;
        b = next_b;
        if b.is_empty() {
            state.alive = false;
            break;
        }
    }
    Ok(state)
}

fn to_set(zoo: &ZooRealization, s: &VidSet) -> VertexSet {
    s.iter().map(|&h| zoo.vertex_of(h)).collect()
}

/// Survival of the exploration at several caps, read from one realization
/// per seed sampled at the largest cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalRecord {
    pub cap: usize,
    /// Runs still alive after `max_steps` (saturated runs included).
    pub survival: Proportion,
    /// Runs alive with every growth event holding.
    pub conformant: Proportion,
    pub saturated: u64,
    pub duplicate_animals: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn worms_survival(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    caps: &[usize],
    cfg: &WormsConfig,
    trials: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<Vec<SurvivalRecord>> {
    let cmax = caps.iter().copied().max().ok_or_else(|| Error::Argument("no caps given".into()))?;
    let base = realize_with(g, law, lambda, cmax, seed, opts)?;
    let runs = par_trials(&base, trials, seed, |z| {
        caps.iter().map(|&c| worms_explore(&mut z.with_cap(c)?, cfg)).collect::<Result<Vec<_>>>()
    })?;
    let mut counts = vec![(0u64, 0u64, 0u64, 0usize); caps.len()];
    for run in &runs {
        for (i, s) in run.iter().enumerate() {
            counts[i].0 += s.alive as u64;
            counts[i].1 += s.conformant() as u64;
            counts[i].2 += s.saturated as u64;
            counts[i].3 += s.duplicate_animals;
        }
    }
    Ok(caps
        .iter()
        .zip(counts)
        .map(|(&cap, (a, c, s, d))| SurvivalRecord {
            cap,
            survival: Proportion::new(a, trials as u64),
            conformant: Proportion::new(c, trials as u64),
            saturated: s,
            duplicate_animals: d,
        })
        .collect())
}
