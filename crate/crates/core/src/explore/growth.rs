use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{stream, trial_seed};
use crate::stats::Proportion;

/// Parameters of the growth events `Z_0 >= b` and `Z_n >= a Z_{n-1}`, with
/// `C` the allowed variance-to-mean ratio of the increments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthParams {
    a: f64,
    b: f64,
    c: f64,
}

impl GrowthParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::Argument(format!("a = {a} must exceed 1")));
        }
        if !(b > 0.0) || !(c > 0.0) {
            return Err(Error::Argument(format!("b = {b} and C = {c} must be positive")));
        }
        if c >= b / 2.0 {
            return Err(Error::Argument(format!("C = {c} must be below b/2 = {}", b / 2.0)));
        }
        Ok(GrowthParams { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `P(E_0) * prod_{n < steps} (1 - 2C / (b a^{n+1}))`.
    pub fn survival_bound(&self, p0: f64, steps: usize) -> f64 {
        (0..steps).fold(p0, |acc, n| acc * (1.0 - 2.0 * self.c / (self.b * self.a.powi(n as i32 + 1))))
    }
}

/// How `Y_{n+1}` is drawn given `Z_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum IncrementModel {
    /// Poisson with mean `2 a Z_n`; variance equals the mean. Means above
    /// `1e12` use the normal approximation.
    Poisson,
    /// Exactly `2 a Z_n`.
    Deterministic,
    Zero,
    /// `2 a Z_n / q` with probability `q`, else 0: the right mean, variance
    /// far above `C` times it.
    Adversarial { q: f64 },
}

impl IncrementModel {
    pub fn sample<R: Rng + ?Sized>(&self, a: f64, z: u64, rng: &mut R) -> u64 {
        let mean = 2.0 * a * z as f64;
        match *self {
            IncrementModel::Poisson if mean <= 0.0 => 0,
            IncrementModel::Poisson if mean <= 1e12 => Poisson::new(mean).expect("finite mean").sample(rng) as u64,
            IncrementModel::Poisson => {
                let n: f64 = StandardNormal.sample(rng);
                (mean + mean.sqrt() * n).max(0.0) as u64
            }
            IncrementModel::Deterministic => mean.ceil() as u64,
            IncrementModel::Zero => 0,
            IncrementModel::Adversarial { q } => {
                if rng.random::<f64>() < q {
                    (mean / q).round() as u64
                } else {
                    0
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRecord {
    /// Trials where every event held up to `max_steps`.
    pub survival: Proportion,
    pub bound: f64,
    /// Trials where `Z_n` stayed positive.
    pub positive: Proportion,
}

/// Runs `trials` copies of the process from `Z_0 = ceil(b)`, so `P(E_0) = 1`.
/// Values above `2^62` are held there.
pub fn growth_lemma_harness(
    model: IncrementModel,
    params: GrowthParams,
    trials: usize,
    max_steps: usize,
    seed: u64,
) -> Result<GrowthRecord> {
    if let IncrementModel::Adversarial { q } = model {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Argument(format!("adversarial q = {q} outside (0, 1]")));
        }
    }
    let z0 = params.b.ceil() as u64;
    let (mut ok, mut pos) = (0, 0);
    for t in 0..trials {
        let mut rng = stream(trial_seed(seed, t as u64), &[]);
        let mut z = z0;
        let mut all = true;
        for _ in 0..max_steps {
            let y = model.sample(params.a, z, &mut rng);
            let next = z.saturating_add(y).min(1 << 62);
            if (next as f64) < params.a * z as f64 {
                all = false;
            }
            z = next;
            if z == 0 {
                break;
            }
        }
        ok += all as u64;
        pos += (z > 0) as u64;
    }
    Ok(GrowthRecord {
        survival: Proportion::new(ok, trials as u64),
        bound: params.survival_bound(1.0, max_steps),
        positive: Proportion::new(pos, trials as u64),
    })
}
