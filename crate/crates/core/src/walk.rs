//! Simple random walk and the functionals built from it: spectral radius,
//! escape probabilities, capacity.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{closure, ext_boundary, vertex_key, GraphSpec, LocalGraph, Marks, VertexId, VertexSet, Vid};
use crate::rng::{stream, StreamRng};
use crate::stats::Estimate;

/// A walk `steps[0] = start, steps[1], ...`; `length` counts steps, not vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPath {
    pub start: VertexId,
    pub steps: Vec<VertexId>,
}

impl WalkPath {
    pub fn length(&self) -> usize {
        self.steps.len() - 1
    }
}

pub fn simulate_walk<R: Rng + ?Sized>(g: &GraphSpec, x: &VertexId, n_steps: usize, rng: &mut R) -> Result<WalkPath> {
    let mut lg = LocalGraph::new(g)?;
    let mut h = lg.intern(x)?;
    let deg = lg.degree();
    let mut handles = Vec::with_capacity(n_steps + 1);
    handles.push(h);
    for _ in 0..n_steps {
        h = lg.neighbor(h, rng.random_range(0..deg));
        handles.push(h);
    }
    Ok(WalkPath {
        start: x.clone(),
        steps: handles.iter().map(|&h| lg.vertex(h)).collect(),
    })
}

/// Number of distinct vertices among `X(t0), ..., X(t1)`.
pub fn trace_size(path: &WalkPath, t0: usize, t1: usize) -> Result<usize> {
    if t0 > t1 || t1 > path.length() {
        return Err(Error::Range(format!("trace window {t0}..={t1} outside 0..={}", path.length())));
    }
    let set: VertexSet = path.steps[t0..=t1].iter().cloned().collect();
    Ok(set.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectralMethod {
    /// Exact dynamic programming on the distance-from-origin chain of a tree.
    DistanceChain,
    /// Exact central binomial coefficient on the line.
    Binomial,
    /// Fraction of walks back at the origin after `n` steps.
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// `p_n(o,o)^(1/n)`.
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub log_return_probability: f64,
    pub method: SpectralMethod,
}

/// `ln p_n(o,o)` for `n = 0..=n_max` on the `d`-regular tree, `-inf` for odd `n`.
pub fn tree_log_return_probabilities(d: u32, n_max: usize) -> Vec<f64> {
    let d = d as f64;
    let up = (d - 1.0) / d;
    let down = 1.0 / d;
    let mut q = vec![0.0f64; n_max / 2 + 3];
    q[0] = 1.0;
    let mut log_scale = 0.0;
    let mut out = vec![0.0];
    for n in 1..=n_max {
        let reach = n.min(q.len() - 2);
        let mut next = vec![0.0; q.len()];
        next[1] += q[0];
        for k in 1..=reach {
            if q[k] == 0.0 {
                continue;
            }
            next[k + 1] += q[k] * up;
            next[k - 1] += q[k] * down;
        }
        let total: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= total;
        }
        log_scale += total.ln();
        q = next;
        out.push(if q[0] > 0.0 { log_scale + q[0].ln() } else { f64::NEG_INFINITY });
    }
    out
}

pub fn estimate_spectral_radius<R: Rng + ?Sized>(
    g: &GraphSpec,
    n_max: usize,
    trials: usize,
    rng: &mut R,
) -> Result<SpectralEstimate> {
    if n_max == 0 || n_max % 2 == 1 {
        return Err(Error::Argument(format!("n_max = {n_max} must be positive and even")));
    }
    let exact = |log_p: f64, method| SpectralEstimate {
        value: (log_p / n_max as f64).exp(),
        stderr: 0.0,
        n: n_max,
        log_return_probability: log_p,
        method,
    };
    match g {
        GraphSpec::RegularTree(d) => {
            let lp = tree_log_return_probabilities(*d, n_max)[n_max];
            Ok(exact(lp, SpectralMethod::DistanceChain))
        }
        GraphSpec::Line | GraphSpec::Lattice(1) => {
            let m = n_max / 2;
            let lp = (1..=m).map(|i| ((m + i) as f64 / i as f64).ln()).sum::<f64>() - n_max as f64 * 2f64.ln();
            Ok(exact(lp, SpectralMethod::Binomial))
        }
        _ => {
            if trials == 0 {
                return Err(Error::Argument("trials must be positive".into()));
            }
            let mut lg = LocalGraph::new(g)?;
            let deg = lg.degree();
            let base: u64 = rng.random();
            let mut hits = 0u64;
            for t in 0..trials {
                let mut r = stream(base, &[t as u64]);
                let mut h = lg.origin();
                for _ in 0..n_max {
                    h = lg.neighbor(h, r.random_range(0..deg));
                }
                hits += (h == lg.origin()) as u64;
                if lg.len() > ARENA_LIMIT {
                    lg = LocalGraph::new(g)?;
                }
            }
            if hits == 0 {
                return Err(Error::Underflow(format!(
                    "no return to the origin at n = {n_max} in {trials} walks, use the exact method"
                )));
            }
            let p = hits as f64 / trials as f64;
            let se_p = (p * (1.0 - p) / trials as f64).sqrt();
            let value = p.powf(1.0 / n_max as f64);
            Ok(SpectralEstimate {
                value,
                stderr: value * se_p / (n_max as f64 * p),
                n: n_max,
                log_return_probability: p.ln(),
                method: SpectralMethod::MonteCarlo,
            })
        }
    }
}

pub(crate) const ARENA_LIMIT: usize = 3_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EscapeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub horizon: usize,
    pub trials: usize,
    pub converged: bool,
}

const MAX_DOUBLINGS: u32 = 12;

/// Walks for escape estimates. Each trial owns the stream `(base, trial)`, so
/// runs with the same `base` but nested targets are coupled walk by walk.
struct EscapeRunner {
    spec: GraphSpec,
    target: Vec<VertexId>,
    lg: LocalGraph,
    marks: Marks,
}

impl EscapeRunner {
    fn new(spec: &GraphSpec, target: &[VertexId]) -> Result<Self> {
        let mut r = EscapeRunner {
            spec: spec.clone(),
            target: target.to_vec(),
            lg: LocalGraph::new(spec)?,
            marks: Marks::new(),
        };
        r.reset()?;
        Ok(r)
    }

    fn reset(&mut self) -> Result<()> {
        self.lg = LocalGraph::new(&self.spec)?;
        self.marks = Marks::new();
        for v in &self.target {
            let h = self.lg.intern(v)?;
            self.marks.insert(h);
        }
        Ok(())
    }

    /// First return time to the target within `horizon` steps.
    fn first_return(&mut self, start: Vid, rng: &mut StreamRng, horizon: usize) -> Option<usize> {
        let deg = self.lg.degree();
        let mut h = start;
        for t in 1..=horizon {
            h = self.lg.neighbor(h, rng.random_range(0..deg));
            if self.marks.contains(h) {
                return Some(t);
            }
        }
        None
    }

    fn return_times(&mut self, x: &VertexId, base: u64, trials: usize, horizon: usize) -> Result<Vec<Option<usize>>> {
        let mut out = Vec::with_capacity(trials);
        for t in 0..trials {
            if self.lg.len() > ARENA_LIMIT {
                self.reset()?;
            }
            let start = self.lg.intern(x)?;
            let mut r = stream(base, &[t as u64]);
            out.push(self.first_return(start, &mut r, horizon));
        }
        Ok(out)
    }
}

fn escape_with_base(
    runner: &mut EscapeRunner,
    x: &VertexId,
    base: u64,
    horizon: usize,
    trials: usize,
) -> Result<EscapeEstimate> {
    let summarize = |times: &[Option<usize>], h: usize| {
        let esc = times.iter().filter(|t| t.is_none_or(|t| t > h)).count();
        let p = esc as f64 / trials as f64;
        (p, (p * (1.0 - p) / trials as f64).sqrt())
    };
    let mut h = horizon;
    for _ in 0..=MAX_DOUBLINGS {
        let times = runner.return_times(x, base, trials, 2 * h)?;
        let (p1, _) = summarize(&times, h);
        let (p2, se2) = summarize(&times, 2 * h);
        if p1 - p2 < 2.0 * se2.max(1.0 / trials as f64) {
            return Ok(EscapeEstimate { value: p2, stderr: se2, horizon: 2 * h, trials, converged: true });
        }
        h *= 2;
    }
    let times = runner.return_times(x, base, trials, h)?;
    let (p, se) = summarize(&times, h);
    Ok(EscapeEstimate { value: p, stderr: se, horizon: h, trials, converged: false })
}

/// Estimate of `P_x(no return to K within the horizon)`, doubling the horizon
/// until one doubling moves the estimate by less than two standard errors.
pub fn escape_probability<R: Rng + ?Sized>(
    g: &GraphSpec,
    k: &VertexSet,
    x: &VertexId,
    horizon: usize,
    trials: usize,
    rng: &mut R,
) -> Result<EscapeEstimate> {
    if horizon == 0 || trials == 0 {
        return Err(Error::Argument("horizon and trials must be positive".into()));
    }
    g.check_vertex(x)?;
    let base: u64 = rng.random();
    if k.is_empty() {
        return Ok(EscapeEstimate { value: 1.0, stderr: 0.0, horizon, trials, converged: true });
    }
    let target: Vec<VertexId> = k.sorted().into_iter().cloned().collect();
    let mut runner = EscapeRunner::new(g, &target)?;
    escape_with_base(&mut runner, x, base, horizon, trials)
}

/// Per-vertex escape estimates from every `x` in `from`, measured against `k`.
fn escapes_from(
    g: &GraphSpec,
    k: &VertexSet,
    from: &[VertexId],
    horizon: usize,
    trials: usize,
    base: u64,
) -> Result<Vec<EscapeEstimate>> {
    let target: Vec<VertexId> = k.sorted().into_iter().cloned().collect();
    let mut runner = EscapeRunner::new(g, &target)?;
    from.iter()
        .map(|x| escape_with_base(&mut runner, x, crate::rng::mix(base, vertex_key(x)), horizon, trials))
        .collect()
}

/// `cap(K) = sum over x in K of e_K(x)`, with the combined standard error.
pub fn capacity<R: Rng + ?Sized>(
    g: &GraphSpec,
    k: &VertexSet,
    horizon: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if k.is_empty() {
        return Err(Error::Argument("capacity of the empty set".into()));
    }
    if horizon == 0 || trials == 0 {
        return Err(Error::Argument("horizon and trials must be positive".into()));
    }
    let base: u64 = rng.random();
    let from: Vec<VertexId> = k.sorted().into_iter().cloned().collect();
    let es = escapes_from(g, k, &from, horizon, trials, base)?;
    Ok(Estimate {
        value: es.iter().map(|e| e.value).sum(),
        stderr: es.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt(),
        n: trials as u64,
    })
}

/// `sum over y in B of P_y(no return to closure(A))^2` for `B` inside the
/// exterior boundary of `A`.
pub fn restricted_capacity_sum<R: Rng + ?Sized>(
    g: &GraphSpec,
    a: &VertexSet,
    b: &VertexSet,
    horizon: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Estimate> {
    let boundary = ext_boundary(g, a)?;
    if !b.is_subset(&boundary) {
        return Err(Error::Argument("B must lie in the exterior boundary of A".into()));
    }
    let base: u64 = rng.random();
    if b.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    let cl = closure(g, a)?;
    let from: Vec<VertexId> = b.sorted().into_iter().cloned().collect();
    let es = escapes_from(g, &cl, &from, horizon, trials, base)?;
    Ok(Estimate {
        value: es.iter().map(|e| e.value * e.value).sum(),
        stderr: es.iter().map(|e| (2.0 * e.value * e.stderr).powi(2)).sum::<f64>().sqrt(),
        n: trials as u64,
    })
}

/// `(1 - rho)^2 |closure(A)| - (|ext boundary of A| - |B|)`.
pub fn capacity_sum_lower_bound(rho: f64, closure_size: usize, boundary_size: usize, b_size: usize) -> f64 {
    (1.0 - rho).powi(2) * closure_size as f64 - (boundary_size as f64 - b_size as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_step_walk() {
        let g = GraphSpec::RegularTree(3);
        let mut rng = StreamRng::seed_from_u64(1);
        let p = simulate_walk(&g, &g.origin(), 0, &mut rng).unwrap();
        assert_eq!(p.steps, vec![g.origin()]);
        assert_eq!(trace_size(&p, 0, 0).unwrap(), 1);
        assert!(trace_size(&p, 0, 1).is_err());
    }

    #[test]
    fn tree_return_probabilities_small_n() {
        let lp = tree_log_return_probabilities(3, 6);
        assert!(lp[1].is_infinite() && lp[3].is_infinite());
        assert!((lp[2].exp() - 1.0 / 3.0).abs() < 1e-12);
        // o -> x -> o -> y -> o, or o -> x -> z -> x -> o
        let p4 = 1.0 / 9.0 + 2.0 / 3.0 * 1.0 / 3.0 * 1.0 / 3.0;
        assert!((lp[4].exp() - p4).abs() < 1e-12);
    }

    #[test]
    fn empty_target_always_escapes() {
        let g = GraphSpec::RegularTree(3);
        let mut rng = StreamRng::seed_from_u64(2);
        let e = escape_probability(&g, &VertexSet::new(), &g.origin(), 8, 10, &mut rng).unwrap();
        assert_eq!(e.value, 1.0);
    }
}
