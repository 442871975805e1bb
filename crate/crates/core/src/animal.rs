//! Laws of rooted lattice animals: worms, balls, singletons, directed paths on
//! the grandparent tree, fibre worms on direct products, and mixtures.

use std::fmt;
use std::str::FromStr;

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::{Geometric, Zeta};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, LocalGraph, Marks, VertexId, VertexSet, Vid};
use crate::parse::Cursor;
use crate::stats::{Estimate, Running};

/// Lengths above this are folded onto it when sampling power laws.
pub const LENGTH_CAP: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub enum LengthLaw {
    /// `P(L = l) = l^(-alpha) / zeta(alpha)`, `l >= 1`.
    PowerLaw(f64),
    Deterministic(u64),
    /// `P(L = l) = p (1-p)^(l-1)`, `l >= 1`.
    Geometric(f64),
    /// `P(L = l) = table[l-1]`.
    Table(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnimalLaw {
    /// Trace of a simple random walk with `L` vertices visited in time, i.e.
    /// `L - 1` steps.
    Worm(LengthLaw),
    /// Ball of random radius around the root.
    Ball(LengthLaw),
    Singleton,
    Mixture(Vec<(f64, AnimalLaw)>),
    /// Grandparent trees only: a path of `L` vertices descending from the
    /// root through uniformly chosen children.
    DownPath(LengthLaw),
    /// Direct products only: a worm moving in the second factor; with
    /// probability `atom` the animal is the root alone.
    FiberWorm(LengthLaw, f64),
}

/// A rooted, finite, connected vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct Animal {
    pub root: VertexId,
    pub members: VertexSet,
}

impl Animal {
    pub fn volume(&self) -> usize {
        self.members.len()
    }
}

// ---------------------------------------------------------------- zeta sums

const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
const EM_START: u64 = 32;

/// `k`-th derivative of `x^(-s)`.
fn power_derivative(s: f64, k: u32, x: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= -s - i as f64;
    }
    c * x.powf(-s - k as f64)
}

fn em_correction(s: f64, x: f64) -> f64 {
    let mut fact = 1.0;
    let mut acc = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let n = 2 * (j as u32 + 1);
        fact *= ((n - 1) * n) as f64;
        acc += b / fact * power_derivative(s, n - 1, x);
    }
    acc
}

/// `sum_{l=1}^{n} l^(-s)` for any real `s`.
pub fn power_partial_sum(s: f64, n: u64) -> f64 {
    if n <= 4 * EM_START {
        return (1..=n).map(|l| (l as f64).powf(-s)).sum();
    }
    let a = EM_START as f64;
    let b = n as f64;
    let head: f64 = (1..EM_START).map(|l| (l as f64).powf(-s)).sum();
    let integral = if (s - 1.0).abs() < 1e-15 { (b / a).ln() } else { (b.powf(1.0 - s) - a.powf(1.0 - s)) / (1.0 - s) };
    head + integral + (a.powf(-s) + b.powf(-s)) / 2.0 + em_correction(s, b) - em_correction(s, a)
}

/// Riemann zeta function for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    let a = EM_START as f64;
    let head: f64 = (1..EM_START).map(|l| (l as f64).powf(-s)).sum();
    head + a.powf(1.0 - s) / (s - 1.0) + a.powf(-s) / 2.0 - em_correction(s, a)
}

// ---------------------------------------------------------------- lengths

impl LengthLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            LengthLaw::PowerLaw(a) if !(*a > 1.0) => Err(Error::Spec(format!("power law exponent {a} must exceed 1"))),
            LengthLaw::Deterministic(0) => Err(Error::Spec("deterministic length must be positive".into())),
            LengthLaw::Geometric(p) if !(*p > 0.0 && *p <= 1.0) => Err(Error::Spec(format!("geometric p = {p} outside (0,1]"))),
            LengthLaw::Table(t) => {
                let s: f64 = t.iter().sum();
                if t.is_empty() || t.iter().any(|&x| !(x >= 0.0)) || (s - 1.0).abs() > 1e-9 {
                    Err(Error::Spec("length table must be a probability vector".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Largest value in the support, if bounded.
    pub fn max_value(&self) -> Option<u64> {
        match self {
            LengthLaw::Deterministic(l) => Some(*l),
            LengthLaw::Table(t) => Some(t.len() as u64),
            LengthLaw::Geometric(p) if *p >= 1.0 => Some(1),
            _ => None,
        }
    }

    pub fn pmf(&self, l: u64) -> f64 {
        match self {
            LengthLaw::PowerLaw(a) => {
                if l == 0 {
                    0.0
                } else {
                    (l as f64).powf(-a) / zeta(*a)
                }
            }
            LengthLaw::Deterministic(l0) => (l == *l0) as u8 as f64,
            LengthLaw::Geometric(p) => {
                if l == 0 {
                    0.0
                } else {
                    p * (1.0 - p).powi((l - 1) as i32)
                }
            }
            LengthLaw::Table(t) => {
                if l == 0 {
                    0.0
                } else {
                    t.get(l as usize - 1).copied().unwrap_or(0.0)
                }
            }
        }
    }
}

/// `E[L^k 1{L <= R}]`, with `R = None` meaning no truncation; divergent
/// moments are `f64::INFINITY`.
pub fn length_moment(law: &LengthLaw, k: u32, r: Option<u64>) -> f64 {
    match law {
        LengthLaw::PowerLaw(a) => {
            let s = a - k as f64;
            match r {
                Some(r) => power_partial_sum(s, r) / zeta(*a),
                None if s > 1.0 => zeta(s) / zeta(*a),
                None => f64::INFINITY,
            }
        }
        LengthLaw::Deterministic(l) => {
            if r.is_none_or(|r| *l <= r) {
                (*l as f64).powi(k as i32)
            } else {
                0.0
            }
        }
        LengthLaw::Geometric(p) => {
            let mut acc = 0.0;
            let mut l = 1u64;
            loop {
                if r.is_some_and(|r| l > r) {
                    break acc;
                }
                let term = (l as f64).powi(k as i32) * p * (1.0 - p).powi((l - 1) as i32);
                acc += term;
                if (l > 10 && term < 1e-17 * acc) || term == 0.0 && l > 1 {
                    break acc;
                }
                l += 1;
            }
        }
        LengthLaw::Table(t) => t
            .iter()
            .enumerate()
            .map(|(i, &q)| (i as u64 + 1, q))
            .filter(|(l, _)| r.is_none_or(|r| *l <= r))
            .map(|(l, q)| (l as f64).powi(k as i32) * q)
            .sum(),
    }
}

/// Prebuilt sampler for a length law or its size-biased version.
#[derive(Clone, Debug)]
pub(crate) enum LengthSampler {
    Zeta(Zeta<f64>),
    Const(u64),
    Geom(Geometric),
    /// Sum of two independent geometrics minus one: `P(l) = l p^2 (1-p)^(l-1)`.
    GeomPair(Geometric),
    Table(Vec<f64>),
}

impl LengthSampler {
    pub(crate) fn new(law: &LengthLaw) -> Result<Self> {
        law.validate()?;
        Ok(match law {
            LengthLaw::PowerLaw(a) => LengthSampler::Zeta(Zeta::new(*a).map_err(|e| Error::Spec(e.to_string()))?),
            LengthLaw::Deterministic(l) => LengthSampler::Const(*l),
            LengthLaw::Geometric(p) => LengthSampler::Geom(Geometric::new(*p).map_err(|e| Error::Spec(e.to_string()))?),
            LengthLaw::Table(t) => LengthSampler::Table(cumulative(t)),
        })
    }

    /// Sampler of `l P(L = l) / E[L]`.
    pub(crate) fn size_biased(law: &LengthLaw) -> Result<Self> {
        law.validate()?;
        Ok(match law {
            LengthLaw::PowerLaw(a) if *a > 2.0 => {
                LengthSampler::Zeta(Zeta::new(a - 1.0).map_err(|e| Error::Spec(e.to_string()))?)
            }
            LengthLaw::PowerLaw(a) => {
                return Err(Error::Spec(format!("power({a}) has infinite mean; size-biasing is undefined")))
            }
            LengthLaw::Deterministic(l) => LengthSampler::Const(*l),
            LengthLaw::Geometric(p) => LengthSampler::GeomPair(Geometric::new(*p).map_err(|e| Error::Spec(e.to_string()))?),
            LengthLaw::Table(t) => {
                let w: Vec<f64> = t.iter().enumerate().map(|(i, q)| (i + 1) as f64 * q).collect();
                let s: f64 = w.iter().sum();
                LengthSampler::Table(cumulative(&w.iter().map(|x| x / s).collect::<Vec<_>>()))
            }
        })
    }

    #[inline]
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            LengthSampler::Zeta(z) => {
                let x = z.sample(rng);
                if x >= LENGTH_CAP as f64 {
                    LENGTH_CAP
                } else {
                    x as u64
                }
            }
            LengthSampler::Const(l) => *l,
            LengthSampler::Geom(g) => 1 + g.sample(rng),
            LengthSampler::GeomPair(g) => 1 + g.sample(rng) + g.sample(rng),
            LengthSampler::Table(c) => {
                let u: f64 = rng.random();
                (c.partition_point(|&x| x <= u).min(c.len() - 1) + 1) as u64
            }
        }
    }
}

fn cumulative(t: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    t.iter()
        .map(|q| {
            acc += q;
            acc
        })
        .collect()
}

// ---------------------------------------------------------------- grammar

impl fmt::Display for LengthLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthLaw::PowerLaw(a) => write!(f, "power({a:?})"),
            LengthLaw::Deterministic(l) => write!(f, "const({l})"),
            LengthLaw::Geometric(p) => write!(f, "geom({p:?})"),
            LengthLaw::Table(t) => {
                f.write_str("table(")?;
                for (i, q) in t.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{q:?}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for AnimalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnimalLaw::Worm(l) => write!(f, "worm({l})"),
            AnimalLaw::Ball(l) => write!(f, "ball({l})"),
            AnimalLaw::Singleton => write!(f, "singleton"),
            AnimalLaw::Mixture(parts) => {
                f.write_str("mix(")?;
                for (i, (w, law)) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{w:?}:{law}")?;
                }
                f.write_str(")")
            }
            AnimalLaw::DownPath(l) => write!(f, "downpath({l})"),
            AnimalLaw::FiberWorm(l, p) => write!(f, "fiberworm({l},{p:?})"),
        }
    }
}

fn parse_length(c: &mut Cursor) -> Result<LengthLaw> {
    let name = c.ident()?;
    c.expect('(')?;
    let law = match name {
        "power" => LengthLaw::PowerLaw(c.number()?),
        "const" => LengthLaw::Deterministic(c.integer()?),
        "geom" => LengthLaw::Geometric(c.number()?),
        "table" => {
            let mut t = vec![c.number()?];
            while c.eat(',') {
                t.push(c.number()?);
            }
            LengthLaw::Table(t)
        }
        other => return c.err(format!("unknown length law '{other}'")),
    };
    c.expect(')')?;
    Ok(law)
}

fn parse_law(c: &mut Cursor) -> Result<AnimalLaw> {
    let name = c.ident()?;
    if name == "singleton" {
        return Ok(AnimalLaw::Singleton);
    }
    c.expect('(')?;
    let law = match name {
        "worm" => AnimalLaw::Worm(parse_length(c)?),
        "ball" => AnimalLaw::Ball(parse_length(c)?),
        "downpath" => AnimalLaw::DownPath(parse_length(c)?),
        "fiberworm" => {
            let l = parse_length(c)?;
            let p = if c.eat(',') { c.number()? } else { 0.1 };
            AnimalLaw::FiberWorm(l, p)
        }
        "mix" => {
            let mut parts = Vec::new();
            loop {
                let w = c.number()?;
                c.expect(':')?;
                parts.push((w, parse_law(c)?));
                if !c.eat(',') {
                    break;
                }
            }
            AnimalLaw::Mixture(parts)
        }
        other => return c.err(format!("unknown animal law '{other}'")),
    };
    c.expect(')')?;
    Ok(law)
}

impl FromStr for AnimalLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let law = parse_law(&mut c)?;
        c.finish()?;
        law.validate()?;
        Ok(law)
    }
}

impl FromStr for LengthLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let law = parse_length(&mut c)?;
        c.finish()?;
        law.validate()?;
        Ok(law)
    }
}

impl AnimalLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            AnimalLaw::Worm(l) | AnimalLaw::Ball(l) | AnimalLaw::DownPath(l) => l.validate(),
            AnimalLaw::FiberWorm(l, p) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Spec(format!("fibre worm atom {p} is not a probability")));
                }
                l.validate()
            }
            AnimalLaw::Singleton => Ok(()),
            AnimalLaw::Mixture(parts) => {
                let s: f64 = parts.iter().map(|(w, _)| w).sum();
                if parts.is_empty() || parts.iter().any(|(w, _)| !(*w >= 0.0)) || (s - 1.0).abs() > 1e-9 {
                    return Err(Error::Spec("mixture weights must be nonnegative and sum to 1".into()));
                }
                parts.iter().try_for_each(|(_, l)| l.validate())
            }
        }
    }

    /// Checks that the law makes sense on `g`.
    pub fn check_graph(&self, g: &GraphSpec) -> Result<()> {
        self.validate()?;
        match self {
            AnimalLaw::DownPath(_) if !matches!(g, GraphSpec::GrandparentTree(_)) => {
                Err(Error::Spec(format!("downpath needs a grandparent tree, got {g}")))
            }
            AnimalLaw::FiberWorm(..) if !matches!(g, GraphSpec::DirectProduct(..)) => {
                Err(Error::Spec(format!("fiberworm needs a direct product, got {g}")))
            }
            AnimalLaw::Mixture(parts) => parts.iter().try_for_each(|(_, l)| l.check_graph(g)),
            _ => Ok(()),
        }
    }

    /// The worm length law if this is a plain worm law, with singletons read as
    /// one-vertex worms.
    pub fn as_worm(&self) -> Option<LengthLaw> {
        match self {
            AnimalLaw::Worm(l) => Some(l.clone()),
            AnimalLaw::Singleton => Some(LengthLaw::Deterministic(1)),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------- sampling

/// Region of possible roots of an animal that meets a given vertex.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Reach {
    /// Anywhere within this graph distance.
    Ball(u32),
    /// Only ancestors up to this many levels (grandparent trees).
    Ancestors(u32),
    /// Within this distance moving through the neighbour slots `lo..hi` only.
    Slots(u32, usize, usize),
}

#[derive(Clone, Debug)]
enum Compiled {
    Worm(LengthSampler, usize),
    Ball(LengthSampler),
    Singleton,
    Mixture(Vec<f64>, Vec<Compiled>),
    DownPath(LengthSampler, usize),
    Fiber(LengthSampler, f64, usize, usize, usize),
}

fn order_or_max(g: &GraphSpec) -> usize {
    g.order().map_or(usize::MAX, |n| n.min(usize::MAX as u64) as usize)
}

/// A law compiled against one graph, ready to sample on a [`LocalGraph`].
#[derive(Clone, Debug)]
pub(crate) struct AnimalSampler {
    law: AnimalLaw,
    compiled: Compiled,
}

fn compile(law: &AnimalLaw, g: &GraphSpec) -> Result<Compiled> {
    Ok(match law {
        AnimalLaw::Worm(l) => Compiled::Worm(LengthSampler::new(l)?, order_or_max(g)),
        AnimalLaw::Ball(l) => Compiled::Ball(LengthSampler::new(l)?),
        AnimalLaw::Singleton => Compiled::Singleton,
        AnimalLaw::Mixture(parts) => Compiled::Mixture(
            cumulative(&parts.iter().map(|(w, _)| *w).collect::<Vec<_>>()),
            parts.iter().map(|(_, l)| compile(l, g)).collect::<Result<_>>()?,
        ),
        AnimalLaw::DownPath(l) => {
            let GraphSpec::GrandparentTree(d) = g else { unreachable!() };
            Compiled::DownPath(LengthSampler::new(l)?, *d as usize - 1)
        }
        AnimalLaw::FiberWorm(l, p) => {
            let GraphSpec::DirectProduct(a, b) = g else { unreachable!() };
            Compiled::Fiber(LengthSampler::new(l)?, *p, a.degree(), g.degree(), order_or_max(b))
        }
    })
}

fn walk_trace<R: Rng + ?Sized>(
    lg: &mut LocalGraph,
    root: Vid,
    steps: u64,
    slots: (usize, usize),
    full: usize,
    cap: usize,
    rng: &mut R,
    marks: &mut Marks,
    out: &mut Vec<Vid>,
) -> bool {
    marks.clear();
    marks.insert(root);
    out.push(root);
    let mut h = root;
    let width = slots.1 - slots.0;
    for _ in 0..steps {
        h = lg.neighbor(h, slots.0 + rng.random_range(0..width));
        if marks.insert(h) {
            out.push(h);
            if out.len() > cap {
                return false;
            }
            if out.len() == full {
                break;
            }
        }
    }
    true
}

fn sample_compiled<R: Rng + ?Sized>(
    c: &Compiled,
    lg: &mut LocalGraph,
    root: Vid,
    cap: usize,
    rng: &mut R,
    marks: &mut Marks,
    out: &mut Vec<Vid>,
) -> bool {
    out.clear();
    match c {
        Compiled::Singleton => {
            out.push(root);
            cap >= 1
        }
        Compiled::Worm(len, full) => {
            let l = len.sample(rng);
            let deg = lg.degree();
            walk_trace(lg, root, l - 1, (0, deg), *full, cap, rng, marks, out)
        }
        Compiled::Fiber(len, atom, lo, hi, full) => {
            if rng.random::<f64>() < *atom {
                out.push(root);
                return cap >= 1;
            }
            let l = len.sample(rng);
            walk_trace(lg, root, l - 1, (*lo, *hi), *full, cap, rng, marks, out)
        }
        Compiled::Ball(len) => {
            let r = len.sample(rng).min(u32::MAX as u64) as u32;
            match lg.ball(root, r, cap) {
                Ok(b) => {
                    out.extend(b.into_iter().map(|(h, _)| h));
                    true
                }
                Err(_) => false,
            }
        }
        Compiled::DownPath(len, kids) => {
            let r = len.sample(rng);
            if r as usize > cap {
                return false;
            }
            let mut h = root;
            out.push(h);
            for _ in 1..r {
                h = lg.neighbor(h, 1 + rng.random_range(0..*kids));
                out.push(h);
            }
            true
        }
        Compiled::Mixture(cum, parts) => {
            let u: f64 = rng.random();
            let i = cum.partition_point(|&x| x <= u).min(parts.len() - 1);
            sample_compiled(&parts[i], lg, root, cap, rng, marks, out)
        }
    }
}

fn reach_of(law: &AnimalLaw, g: &GraphSpec, cap: usize) -> Reach {
    let capped = |l: &LengthLaw, minus: u64| {
        let m = l.max_value().map_or(u64::MAX, |m| m.saturating_sub(minus));
        m.min(cap.saturating_sub(1) as u64).min(u32::MAX as u64) as u32
    };
    match law {
        AnimalLaw::Singleton => Reach::Ball(0),
        AnimalLaw::Worm(l) => Reach::Ball(capped(l, 1)),
        AnimalLaw::Ball(l) => Reach::Ball(capped(l, 0)),
        AnimalLaw::DownPath(l) => Reach::Ancestors(capped(l, 1)),
        AnimalLaw::FiberWorm(l, _) => {
            let GraphSpec::DirectProduct(a, _) = g else { unreachable!() };
            Reach::Slots(capped(l, 1), a.degree(), g.degree())
        }
        AnimalLaw::Mixture(parts) => {
            let rs: Vec<Reach> = parts.iter().map(|(_, l)| reach_of(l, g, cap)).collect();
            let radius = |r: &Reach| match r {
                Reach::Ball(x) | Reach::Ancestors(x) | Reach::Slots(x, ..) => *x,
            };
            let max = rs.iter().map(radius).max().unwrap_or(0);
            match &rs[0] {
                Reach::Ancestors(_) if rs.iter().all(|r| matches!(r, Reach::Ancestors(_))) => Reach::Ancestors(max),
                Reach::Slots(_, lo, hi) if rs.iter().all(|r| matches!(r, Reach::Slots(..))) => Reach::Slots(max, *lo, *hi),
                _ => Reach::Ball(max),
            }
        }
    }
}

impl AnimalSampler {
    pub(crate) fn new(law: &AnimalLaw, g: &GraphSpec) -> Result<Self> {
        law.check_graph(g)?;
        Ok(AnimalSampler { law: law.clone(), compiled: compile(law, g)? })
    }

    /// Samples members into `out`; returns `false` (rejected) when the volume
    /// would exceed `cap`.
    pub(crate) fn sample<R: Rng + ?Sized>(
        &self,
        lg: &mut LocalGraph,
        root: Vid,
        cap: usize,
        rng: &mut R,
        marks: &mut Marks,
        out: &mut Vec<Vid>,
    ) -> bool {
        sample_compiled(&self.compiled, lg, root, cap, rng, marks, out)
    }

    pub(crate) fn reach(&self, g: &GraphSpec, cap: usize) -> Reach {
        reach_of(&self.law, g, cap)
    }
}

/// Draws one animal of `law` rooted at `root`; `None` when its volume exceeds
/// `volume_cap` (the animal does not belong to the truncated zoo).
pub fn sample_animal<R: Rng + ?Sized>(
    law: &AnimalLaw,
    g: &GraphSpec,
    root: &VertexId,
    volume_cap: Option<usize>,
    rng: &mut R,
) -> Result<Option<Animal>> {
    let sampler = AnimalSampler::new(law, g)?;
    let mut lg = LocalGraph::new(g)?;
    let h = lg.intern(root)?;
    let mut marks = Marks::new();
    let mut out = Vec::new();
    let ok = sampler.sample(&mut lg, h, volume_cap.unwrap_or(usize::MAX), rng, &mut marks, &mut out);
    Ok(ok.then(|| Animal {
        root: root.clone(),
        members: out.iter().map(|&m| lg.vertex(m)).collect(),
    }))
}

/// Volumes of `trials` animals rooted at the origin, `None` for those above
/// `cap`.
pub fn sample_volumes<R: Rng + ?Sized>(
    law: &AnimalLaw,
    g: &GraphSpec,
    cap: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<Option<usize>>> {
    let sampler = AnimalSampler::new(law, g)?;
    let mut lg = LocalGraph::new(g)?;
    let mut marks = Marks::new();
    let mut out = Vec::new();
    let mut vols = Vec::with_capacity(trials);
    for _ in 0..trials {
        if lg.len() > crate::walk::ARENA_LIMIT {
            lg = LocalGraph::new(g)?;
            marks = Marks::new();
        }
        let ok = sampler.sample(&mut lg, 0, cap, rng, &mut marks, &mut out);
        vols.push(ok.then_some(out.len()));
    }
    Ok(vols)
}

/// Monte Carlo `m_k^R = E[|H|^k 1{|H| <= R}]` with its acceptance rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeMoment {
    pub k: u32,
    pub cap: usize,
    pub estimate: Estimate,
    pub acceptance: f64,
}

pub fn truncated_volume_moment<R: Rng + ?Sized>(
    law: &AnimalLaw,
    g: &GraphSpec,
    k: u32,
    cap: usize,
    trials: usize,
    rng: &mut R,
) -> Result<VolumeMoment> {
    if !(1..=2).contains(&k) {
        return Err(Error::Argument(format!("moment order {k} must be 1 or 2")));
    }
    let vols = sample_volumes(law, g, cap, trials, rng)?;
    Ok(moment_from_volumes(&vols, k, cap))
}

pub fn moment_from_volumes(vols: &[Option<usize>], k: u32, cap: usize) -> VolumeMoment {
    let run: Running = vols
        .iter()
        .map(|v| v.filter(|&v| v <= cap).map_or(0.0, |v| (v as f64).powi(k as i32)))
        .collect();
    let acc = vols.iter().filter(|v| v.is_some_and(|v| v <= cap)).count();
    VolumeMoment {
        k,
        cap,
        estimate: run.estimate(),
        acceptance: acc as f64 / vols.len().max(1) as f64,
    }
}
