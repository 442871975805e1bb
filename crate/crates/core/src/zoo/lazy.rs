use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::{root_count, AnimalKey, LocalAnimal, VidSet, TAG_ROOT};
use crate::animal::{AnimalSampler, Reach};
use crate::error::{Error, Result};
use crate::graph::{LocalGraph, Marks, Vid};
use crate::rng::stream;

/// Per-root memo: every root's animals are drawn once from a stream that
/// depends only on the seed and the root's key.
#[derive(Clone)]
pub(crate) struct LazyZoo {
    sampler: AnimalSampler,
    reach: Reach,
    lambda: f64,
    cap: usize,
    seed: u64,
    pad_limit: usize,
    roots: FxHashMap<Vid, (u32, u32, u32)>,
    animals: Vec<LocalAnimal>,
    cover: FxHashMap<Vid, SmallVec<[u32; 2]>>,
    marks: Marks,
    scratch: Vec<Vid>,
}

impl LazyZoo {
    pub(crate) fn new(sampler: AnimalSampler, reach: Reach, lambda: f64, cap: usize, seed: u64, pad_limit: usize) -> Self {
        LazyZoo {
            sampler,
            reach,
            lambda,
            cap,
            seed,
            pad_limit,
            roots: FxHashMap::default(),
            animals: Vec::new(),
            cover: FxHashMap::default(),
            marks: Marks::new(),
            scratch: Vec::new(),
        }
    }

    pub(crate) fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        self.roots.clear();
        self.animals.clear();
        self.cover.clear();
        self.marks = Marks::new();
    }

    fn fill(&mut self, lg: &mut LocalGraph, h: Vid) -> (u32, u32, u32) {
        if let Some(&e) = self.roots.get(&h) {
            return e;
        }
        let key = lg.key(h);
        let n = root_count(self.seed, self.lambda, key);
        let start = self.animals.len() as u32;
        if n > 0 {
            let mut rng = stream(self.seed, &[TAG_ROOT, key]);
            for i in 0..n {
                let ok = self.sampler.sample(lg, h, self.cap, &mut rng, &mut self.marks, &mut self.scratch);
                if ok {
                    let idx = self.animals.len() as u32;
                    for &m in &self.scratch {
                        self.cover.entry(m).or_default().push(idx);
                    }
                    self.animals.push(LocalAnimal {
                        id: AnimalKey { tag: key, index: i as u64 },
                        root: h,
                        members: self.scratch.clone(),
                    });
                }
            }
        }
        let e = (n, start, self.animals.len() as u32);
        self.roots.insert(h, e);
        e
    }

    pub(crate) fn root_animals(&mut self, lg: &mut LocalGraph, h: Vid) -> &[LocalAnimal] {
        let (_, s, e) = self.fill(lg, h);
        &self.animals[s as usize..e as usize]
    }

    /// Roots whose animals may meet one of `sources`.
    fn candidate_roots(&self, lg: &mut LocalGraph, sources: &[Vid]) -> Result<Vec<Vid>> {
        match self.reach {
            Reach::Ball(r) => Ok(lg.ball_from(sources, r, 0..lg.degree(), self.pad_limit)?.into_iter().map(|(h, _)| h).collect()),
            Reach::Slots(r, lo, hi) => Ok(lg.ball_from(sources, r, lo..hi, self.pad_limit)?.into_iter().map(|(h, _)| h).collect()),
            Reach::Ancestors(r) => {
                let mut seen = VidSet::default();
                let mut out = Vec::new();
                for &s in sources {
                    let mut h = s;
                    for k in 0..=r {
                        if k > 0 {
                            h = lg.neighbor(h, 0);
                        }
                        if seen.insert(h) {
                            out.push(h);
                            if out.len() > self.pad_limit {
                                return Err(Error::Resource(format!("more than {} candidate roots", self.pad_limit)));
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Animals meeting `entry` and avoiding `target \ entry`.
    pub(crate) fn hitting(&mut self, lg: &mut LocalGraph, target: &VidSet, entry: &VidSet) -> Result<Vec<LocalAnimal>> {
        let mut sources: Vec<Vid> = entry.iter().copied().collect();
        sources.sort_unstable();
        for h in self.candidate_roots(lg, &sources)? {
            self.fill(lg, h);
        }
        let mut picked = VidSet::default();
        let mut out = Vec::new();
        for &v in &sources {
            let Some(list) = self.cover.get(&v) else { continue };
            for &i in list {
                if !picked.insert(i) {
                    continue;
                }
                let a = &self.animals[i as usize];
                if a.members.iter().all(|m| !target.contains(m) || entry.contains(m)) {
                    out.push(a.clone());
                }
            }
        }
        Ok(out)
    }

    /// Fills every root whose animals may contain `v`.
    pub(crate) fn ensure(&mut self, lg: &mut LocalGraph, v: Vid) -> Result<()> {
        for h in self.candidate_roots(lg, &[v])? {
            self.fill(lg, h);
        }
        Ok(())
    }

    /// Memoized animals containing `v`; complete only after [`Self::ensure`].
    pub(crate) fn animals_at(&self, v: Vid) -> impl Iterator<Item = &LocalAnimal> {
        self.cover.get(&v).into_iter().flatten().map(|&i| &self.animals[i as usize])
    }
}
