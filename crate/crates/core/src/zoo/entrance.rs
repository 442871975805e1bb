use rand::Rng;

use super::{poisson, AnimalKey, LocalAnimal, VidSet, TAG_ENTRY};
use crate::animal::{length_moment, LengthLaw, LengthSampler};
use crate::error::{Error, Result};
use crate::graph::{LocalGraph, Marks, Vid};
use crate::rng::{mix, stream};

/// Worm sampler driven by the vertex where an animal first enters the query
/// set.
///
/// On a regular graph the walk is reversible, so the worms of length `l`
/// that first enter `W` at `w` after `t` steps have total intensity
/// `lambda P(L = l)` times the probability that a `t`-step walk from `w`
/// stays outside `W`. Summing over `t < l` gives `lambda E[L]` candidates per
/// entry vertex with `l` size-biased and `t` uniform; a candidate is kept when
/// its backward part avoids `W`. Each query uses fresh randomness, which is
/// exact for queries whose filters are disjoint.
#[derive(Clone)]
pub(crate) struct EntranceZoo {
    biased: LengthSampler,
    rate: f64,
    cap: usize,
    seed: u64,
    query: u64,
    marks: Marks,
}

impl EntranceZoo {
    pub(crate) fn new(len: &LengthLaw, lambda: f64, cap: usize, seed: u64) -> Result<Self> {
        let mean = length_moment(len, 1, None);
        if !mean.is_finite() {
            return Err(Error::Spec(format!("entrance sampling needs a finite mean length, {len} has none")));
        }
        Ok(EntranceZoo {
            biased: LengthSampler::size_biased(len)?,
            rate: lambda * mean,
            cap,
            seed,
            query: 0,
            marks: Marks::new(),
        })
    }

    pub(crate) fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        self.query = 0;
        self.marks = Marks::new();
    }

    pub(crate) fn hitting(&mut self, lg: &mut LocalGraph, target: &VidSet, entry: &VidSet) -> Vec<LocalAnimal> {
        self.query += 1;
        let q = self.query;
        let deg = lg.degree();
        let mut sources: Vec<(u64, Vid)> = entry.iter().map(|&w| (lg.key(w), w)).collect();
        sources.sort_unstable();
        let mut out = Vec::new();
        let mut trace = Vec::new();
        for (key, w) in sources {
            let mut rng = stream(self.seed, &[TAG_ENTRY, q, key]);
            let n = poisson(self.rate, &mut rng);
            for j in 0..n {
                let l = self.biased.sample(&mut rng);
                let t = rng.random_range(0..l);
                trace.clear();
                self.marks.clear();
                self.marks.insert(w);
                trace.push(w);
                let mut ok = true;
                let mut h = w;
                for _ in 0..t {
                    h = lg.neighbor(h, rng.random_range(0..deg));
                    if target.contains(&h) {
                        ok = false;
                        break;
                    }
                    if self.marks.insert(h) {
                        trace.push(h);
                        if trace.len() > self.cap {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let root = h;
                h = w;
                for _ in 0..l - 1 - t {
                    h = lg.neighbor(h, rng.random_range(0..deg));
                    if target.contains(&h) && !entry.contains(&h) {
                        ok = false;
                        break;
                    }
                    if self.marks.insert(h) {
                        trace.push(h);
                        if trace.len() > self.cap {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    out.push(LocalAnimal {
                        id: AnimalKey { tag: mix(mix(TAG_ENTRY, q), key), index: j as u64 },
                        root,
                        members: trace.clone(),
                    });
                }
            }
        }
        out
    }
}
