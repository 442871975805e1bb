//! The Poisson zoo: a Poisson point process of rooted animals with
//! intensity `lambda` per vertex, truncated at a volume cap.
//!
//! A [`ZooRealization`] is lazy and seed-deterministic. Two backends answer
//! the same queries:
//!
//! * the memo backend draws the animals of each root once, from a stream
//!   keyed by the seed and the root, so every query sees the same zoo;
//! * the entrance backend samples only the worms that reach the queried set,
//!   by reversing the walk at its first entrance. It handles caps in the
//!   thousands, but each query draws afresh, so it is exact only for a single
//!   window or for queries with disjoint restriction filters, which is how the
//!   explorations use it.
//!
//! Views restrict a realization to animals with a colour in an interval and
//! volume under a smaller cap; they implement thinning, monotone coupling in
//! `lambda`, and coupling across caps.

mod entrance;
mod lazy;
mod stats;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

pub use stats::{campbell_check, multiplicity_stats, size_biasing_stats, CampbellRecord, CampbellTest, MultiplicityRecord, SizeBiasRecord};

use crate::animal::{AnimalLaw, AnimalSampler, Reach, Animal};
use crate::error::{Error, Result};
use crate::graph::{ext_boundary, GraphSpec, LocalGraph, VertexId, VertexSet, Vid};
use crate::rng::{mix, stream, trial_seed, unit};
use entrance::EntranceZoo;
use lazy::LazyZoo;

pub(crate) const TAG_COUNT: u64 = 0x636f_756e_74;
pub(crate) const TAG_ROOT: u64 = 0x726f_6f74;
pub(crate) const TAG_ENTRY: u64 = 0x656e_7472_79;
const TAG_COLOR: u64 = 0x636f_6c6f_72;

/// Default bound on the number of candidate roots a memo query may scan.
pub const DEFAULT_PAD_LIMIT: usize = 5_000_000;

pub type VidSet = FxHashSet<Vid>;

pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    let x: f64 = Poisson::new(mean).expect("finite positive mean").sample(rng);
    x as u32
}

/// Number of points rooted at the vertex with `key`, before truncation.
pub(crate) fn root_count(seed: u64, lambda: f64, key: u64) -> u32 {
    poisson(lambda, &mut stream(seed, &[TAG_COUNT, key]))
}

/// Identity of one point of the process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AnimalKey {
    pub tag: u64,
    pub index: u64,
}

/// An animal with members as handles of the realization's [`LocalGraph`].
#[derive(Clone, Debug, PartialEq)]
pub struct LocalAnimal {
    pub id: AnimalKey,
    pub root: Vid,
    pub members: Vec<Vid>,
}

impl LocalAnimal {
    pub fn volume(&self) -> usize {
        self.members.len()
    }
}

/// Colour interval and volume cap selecting a sub-zoo.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ViewSpec {
    pub lo: f64,
    pub hi: f64,
    pub color_seed: u64,
    pub cap: usize,
}

impl ViewSpec {
    pub fn full(cap: usize) -> Self {
        ViewSpec { lo: 0.0, hi: 1.0, color_seed: 0, cap }
    }

    pub fn fraction(&self) -> f64 {
        self.hi - self.lo
    }

    fn is_full(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 1.0
    }

    pub fn color(&self, zoo_seed: u64, id: AnimalKey) -> f64 {
        unit(mix(self.color_seed, zoo_seed), &[TAG_COLOR, id.tag, id.index])
    }

    pub fn admits_id(&self, zoo_seed: u64, id: AnimalKey) -> bool {
        if self.is_full() {
            return true;
        }
        let c = self.color(zoo_seed, id);
        self.lo <= c && c < self.hi
    }

    pub fn admits(&self, zoo_seed: u64, a: &LocalAnimal) -> bool {
        a.volume() <= self.cap && self.admits_id(zoo_seed, a.id)
    }

    /// Splits the colour interval at fraction `p`.
    pub fn split(&self, p: f64, color_seed: u64) -> Result<(Self, Self)> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!("thinning probability {p} outside [0,1]")));
        }
        if !self.is_full() && color_seed != self.color_seed {
            return Err(Error::Argument("nested thinning must reuse the colour seed".into()));
        }
        let mid = self.lo + p * (self.hi - self.lo);
        Ok((ViewSpec { hi: mid, color_seed, ..*self }, ViewSpec { lo: mid, color_seed, ..*self }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Backend {
    Auto,
    Memo,
    Entrance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZooOptions {
    pub backend: Backend,
    pub pad_limit: usize,
}

impl Default for ZooOptions {
    fn default() -> Self {
        ZooOptions { backend: Backend::Auto, pad_limit: DEFAULT_PAD_LIMIT }
    }
}

#[derive(Clone)]
enum Inner {
    Memo(LazyZoo),
    Entrance(EntranceZoo),
}

/// A lazily sampled Poisson zoo, possibly restricted to a view.
#[derive(Clone)]
pub struct ZooRealization {
    spec: GraphSpec,
    law: AnimalLaw,
    lambda: f64,
    cap: usize,
    seed: u64,
    view: ViewSpec,
    pad_limit: usize,
    lg: LocalGraph,
    inner: Inner,
}

/// Runs `f` on a copy of `zoo` reseeded with `trial_seed(seed, t)` for every
/// trial `t`, on the rayon pool; results come back in trial order.
pub(crate) fn par_trials<T, F>(zoo: &ZooRealization, trials: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ZooRealization) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map_init(
            || zoo.clone(),
            |z, t| {
                z.reseed(trial_seed(seed, t as u64))?;
                f(z)
            },
        )
        .collect()
}

pub fn realize(g: &GraphSpec, law: &AnimalLaw, lambda: f64, cap: usize, seed: u64) -> Result<ZooRealization> {
    realize_with(g, law, lambda, cap, seed, ZooOptions::default())
}

const ENTRANCE_MIN_REACH: u32 = 8;

pub fn realize_with(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    cap: usize,
    seed: u64,
    opts: ZooOptions,
) -> Result<ZooRealization> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Argument(format!("intensity {lambda} must be finite and nonnegative")));
    }
    if cap == 0 {
        return Err(Error::Argument("volume cap must be at least 1".into()));
    }
    let sampler = AnimalSampler::new(law, g)?;
    let reach = sampler.reach(g, cap);
    let worm = law
        .as_worm()
        .filter(|l| crate::animal::length_moment(l, 1, None).is_finite() && g.order().is_none());
    let backend = match opts.backend {
        Backend::Auto => match (&worm, &reach) {
            (Some(_), Reach::Ball(r)) if *r > ENTRANCE_MIN_REACH => Backend::Entrance,
            _ => Backend::Memo,
        },
        b => b,
    };
    let inner = match backend {
        Backend::Entrance => {
            let Some(len) = worm else {
                return Err(Error::Spec(format!("entrance backend needs a worm law with finite mean on an infinite graph, got {law} on {g}")));
            };
            Inner::Entrance(EntranceZoo::new(&len, lambda, cap, seed)?)
        }
        _ => Inner::Memo(LazyZoo::new(sampler, reach, lambda, cap, seed, opts.pad_limit)),
    };
    Ok(ZooRealization {
        spec: g.clone(),
        law: law.clone(),
        lambda,
        cap,
        seed,
        view: ViewSpec::full(cap),
        pad_limit: opts.pad_limit,
        lg: LocalGraph::new(g)?,
        inner,
    })
}

/// Realizes at `lambda_hi` and thins with `p = lambda_lo / lambda_hi`; the
/// first view is the low-intensity zoo and its trace is contained in the
/// second's.
pub fn coupled_pair(
    g: &GraphSpec,
    law: &AnimalLaw,
    cap: usize,
    seed: u64,
    lambda_lo: f64,
    lambda_hi: f64,
) -> Result<(ZooRealization, ZooRealization)> {
    if !(lambda_lo > 0.0 && lambda_lo <= lambda_hi) {
        return Err(Error::Argument(format!("need 0 < {lambda_lo} <= {lambda_hi}")));
    }
    let hi = realize(g, law, lambda_hi, cap, seed)?;
    let (lo, _) = hi.thin(lambda_lo / lambda_hi, mix(seed, TAG_COLOR))?;
    Ok((lo, hi))
}

/// Occupation of a ball around a center.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSample {
    pub center: VertexId,
    pub radius: u32,
    pub occupied: VertexSet,
    pub mu: BTreeMap<VertexId, u32>,
    pub animal_count: usize,
    pub lambda: f64,
    pub cap: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowSummary {
    pub occupied_count: usize,
    pub animal_count: usize,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub cap: usize,
    pub seed: u64,
}

impl WindowSample {
    pub fn summary(&self) -> WindowSummary {
        WindowSummary {
            occupied_count: self.occupied.len(),
            animal_count: self.animal_count,
            lambda: self.lambda,
            cap: self.cap,
            seed: self.seed,
        }
    }

    /// `vertex,multiplicity` rows in vertex order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,multiplicity\n");
        for (v, m) in &self.mu {
            let _ = writeln!(s, "\"{v}\",{m}");
        }
        s
    }
}

/// Animals of volume at most `cap` that meet `b` and avoid the rest of the
/// closure of `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionFilter {
    pub a: VertexSet,
    pub b: VertexSet,
    pub cap: usize,
}

impl RestrictionFilter {
    pub fn validate(&self, g: &GraphSpec) -> Result<()> {
        let boundary = ext_boundary(g, &self.a)?;
        if !self.b.is_subset(&boundary) {
            return Err(Error::Argument("B must lie in the exterior boundary of A".into()));
        }
        Ok(())
    }

    pub fn passes(&self, g: &GraphSpec, animal: &Animal) -> Result<bool> {
        let closure = crate::graph::closure(g, &self.a)?;
        Ok(animal.volume() <= self.cap
            && animal.members.iter().any(|m| self.b.contains(m))
            && animal.members.iter().all(|m| self.b.contains(m) || !closure.contains(m)))
    }
}

/// Window vertices (in breadth-first order with distances) and the animals
/// meeting them.
#[derive(Clone, Debug)]
pub(crate) struct LocalWindow {
    pub(crate) verts: Vec<(Vid, u32)>,
    pub(crate) index: FxHashMap<Vid, u32>,
    pub(crate) animals: Vec<LocalAnimal>,
}

impl LocalWindow {
    /// Multiplicity per window vertex under `view`.
    pub(crate) fn mu(&self, zoo_seed: u64, view: &ViewSpec) -> Vec<u32> {
        let mut mu = vec![0; self.verts.len()];
        for a in self.animals.iter().filter(|a| view.admits(zoo_seed, a)) {
            for m in &a.members {
                if let Some(&i) = self.index.get(m) {
                    mu[i as usize] += 1;
                }
            }
        }
        mu
    }
}

impl ZooRealization {
    pub fn graph(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn law(&self) -> &AnimalLaw {
        &self.law
    }

    /// Intensity of the view.
    pub fn lambda(&self) -> f64 {
        self.lambda * self.view.fraction()
    }

    /// Intensity the realization was sampled at.
    pub fn base_lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cap(&self) -> usize {
        self.view.cap
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn view(&self) -> &ViewSpec {
        &self.view
    }

    pub fn backend(&self) -> Backend {
        match self.inner {
            Inner::Memo(_) => Backend::Memo,
            Inner::Entrance(_) => Backend::Entrance,
        }
    }

    /// Forgets every sampled animal and switches to `seed`, keeping the
    /// interned graph unless it has grown large.
    pub fn reseed(&mut self, seed: u64) -> Result<()> {
        self.seed = seed;
        if self.lg.len() > crate::walk::ARENA_LIMIT {
            self.lg = LocalGraph::new(&self.spec)?;
        }
        match &mut self.inner {
            Inner::Memo(z) => z.reseed(seed),
            Inner::Entrance(z) => z.reseed(seed),
        }
        Ok(())
    }

    pub fn local(&mut self) -> &mut LocalGraph {
        &mut self.lg
    }

    pub fn with_view(&self, view: ViewSpec) -> Result<Self> {
        if view.cap > self.cap {
            return Err(Error::Argument(format!("view cap {} exceeds sampled cap {}", view.cap, self.cap)));
        }
        Ok(ZooRealization { view, ..self.clone() })
    }

    /// The same zoo truncated at a smaller cap.
    pub fn with_cap(&self, cap: usize) -> Result<Self> {
        self.with_view(ViewSpec { cap, ..self.view })
    }

    /// Colours every point Bernoulli(`p`); the views partition the zoo.
    pub fn thin(&self, p: f64, color_seed: u64) -> Result<(Self, Self)> {
        let (a, b) = self.view.split(p, color_seed)?;
        Ok((self.with_view(a)?, self.with_view(b)?))
    }

    /// Memo backend: the animals rooted at `x` that belong to the view, in
    /// sampling order.
    pub fn root_animals(&mut self, x: &VertexId) -> Result<Vec<Animal>> {
        let h = self.lg.intern(x)?;
        let (seed, view) = (self.seed, self.view);
        let Inner::Memo(z) = &mut self.inner else {
            return Err(Error::Spec("root_animals needs the memo backend".into()));
        };
        let list: Vec<LocalAnimal> = z
            .root_animals(&mut self.lg, h)
            .iter()
            .filter(|a| view.admits(seed, a))
            .cloned()
            .collect();
        Ok(list.iter().map(|a| self.to_animal(a)).collect())
    }

    pub(crate) fn root_animals_local(&mut self, h: Vid) -> Result<Vec<LocalAnimal>> {
        let (seed, view) = (self.seed, self.view);
        let Inner::Memo(z) = &mut self.inner else {
            return Err(Error::Spec("root_animals needs the memo backend".into()));
        };
        Ok(z.root_animals(&mut self.lg, h).iter().filter(|a| view.admits(seed, a)).cloned().collect())
    }

    pub(crate) fn vertex_of(&self, h: Vid) -> VertexId {
        self.lg.vertex(h)
    }

    pub fn to_animal(&self, a: &LocalAnimal) -> Animal {
        Animal { root: self.lg.vertex(a.root), members: a.members.iter().map(|&m| self.lg.vertex(m)).collect() }
    }

    /// Animals (of the sampled cap, ignoring the view) meeting `entry` and
    /// avoiding `target \ entry`; `entry = None` means the whole target.
    pub(crate) fn hitting_base(&mut self, target: &VidSet, entry: Option<&VidSet>) -> Result<Vec<LocalAnimal>> {
        let entry = entry.unwrap_or(target);
        match &mut self.inner {
            Inner::Memo(z) => z.hitting(&mut self.lg, target, entry),
            Inner::Entrance(z) => Ok(z.hitting(&mut self.lg, target, entry)),
        }
    }

    /// As [`Self::hitting_base`], restricted to the view.
    pub(crate) fn hitting(&mut self, target: &VidSet, entry: Option<&VidSet>) -> Result<Vec<LocalAnimal>> {
        let (seed, view) = (self.seed, self.view);
        let mut out = self.hitting_base(target, entry)?;
        out.retain(|a| view.admits(seed, a));
        Ok(out)
    }

    /// Whether some point of `view` is rooted at `h`, counting points whose
    /// animal exceeds the cap.
    pub(crate) fn has_root_in(&mut self, h: Vid, view: &ViewSpec) -> bool {
        let key = self.lg.key(h);
        let n = root_count(self.seed, self.lambda, key);
        (0..n as u64).any(|i| view.admits_id(self.seed, AnimalKey { tag: key, index: i }))
    }

    /// Memo backend only: whether `v` is covered by an animal of `view`.
    pub(crate) fn covered(&mut self, v: Vid, view: &ViewSpec) -> Result<bool> {
        let seed = self.seed;
        let Inner::Memo(z) = &mut self.inner else {
            return Err(Error::Spec("pointwise occupation needs the memo backend".into()));
        };
        z.ensure(&mut self.lg, v)?;
        Ok(z.animals_at(v).any(|a| view.admits(seed, a)))
    }

    pub(crate) fn window_local(&mut self, center: Vid, radius: u32) -> Result<LocalWindow> {
        let verts = self.lg.ball(center, radius, self.pad_limit)?;
        let index: FxHashMap<Vid, u32> = verts.iter().enumerate().map(|(i, &(h, _))| (h, i as u32)).collect();
        let target: VidSet = verts.iter().map(|&(h, _)| h).collect();
        let animals = self.hitting_base(&target, None)?;
        Ok(LocalWindow { verts, index, animals })
    }

    /// Trace and multiplicities of the view on `ball(center, radius)`.
    pub fn window_sample(&mut self, center: &VertexId, radius: u32) -> Result<WindowSample> {
        let c = self.lg.intern(center)?;
        let w = self.window_local(c, radius)?;
        let mu = w.mu(self.seed, &self.view);
        let animal_count = w.animals.iter().filter(|a| self.view.admits(self.seed, a)).count();
        let mut occupied = VertexSet::new();
        let mut map = BTreeMap::new();
        for (i, &(h, _)) in w.verts.iter().enumerate() {
            if mu[i] > 0 {
                let v = self.lg.vertex(h);
                occupied.insert(v.clone());
                map.insert(v, mu[i]);
            }
        }
        Ok(WindowSample {
            center: center.clone(),
            radius,
            occupied,
            mu: map,
            animal_count,
            lambda: self.lambda(),
            cap: self.cap(),
            seed: self.seed,
        })
    }

    pub(crate) fn intern_set(&mut self, s: &VertexSet) -> Result<VidSet> {
        s.iter().map(|v| self.lg.intern(v)).collect()
    }

    pub(crate) fn closure_local(&mut self, a: &VidSet) -> VidSet {
        let mut out = a.clone();
        for &v in a {
            for u in self.lg.neighbors(v) {
                out.insert(u);
            }
        }
        out
    }

    /// The animals passing `filter`, restricted to the view.
    pub fn restricted_sample(&mut self, filter: &RestrictionFilter) -> Result<Vec<Animal>> {
        filter.validate(&self.spec)?;
        if filter.b.is_empty() {
            return Ok(Vec::new());
        }
        let a = self.intern_set(&filter.a)?;
        let b = self.intern_set(&filter.b)?;
        let target = self.closure_local(&a);
        let list = self.hitting(&target, Some(&b))?;
        Ok(list.iter().filter(|x| x.volume() <= filter.cap).map(|x| self.to_animal(x)).collect())
    }
}
