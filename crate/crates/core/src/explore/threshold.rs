use serde::Serialize;

use crate::animal::{length_moment, sample_volumes, AnimalLaw};
use crate::error::{Error, Result};
use crate::graph::{known_constants, GraphSpec};
use crate::rng::stream;

const TAG_THRESHOLD: u64 = 0x7468_7265_73;

/// Cap under which volumes are sampled when searching for the threshold.
pub const DEFAULT_SEARCH_CAP: usize = 1 << 20;

/// The level the truncated second volume moment must exceed for the
/// branching exploration to be supercritical:
/// `((1 - e^{-lambda/2})^{-2} + d + 1) * 2 (lambda m1 + 2) / (lambda h^2)`.
pub fn reproduction_threshold(g: &GraphSpec, lambda: f64, m1: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("intensity {lambda} must be positive")));
    }
    let k = known_constants(g);
    let h = k.cheeger.ok_or_else(|| Error::Spec(format!("Cheeger constant of {g} is not tabulated")))?;
    if h <= 0.0 {
        return Err(Error::Spec(format!("{g} is amenable")));
    }
    let p = 1.0 - (-lambda / 2.0).exp();
    Ok((p.powi(-2) + k.degree as f64 + 1.0) * 2.0 * (lambda * m1 + 2.0) / (lambda * h * h))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RequiredCap {
    #[serde(rename = "R")]
    pub cap: usize,
    pub threshold: f64,
    pub m1: f64,
    /// Whether `m1` is the exact mean length rather than an estimate.
    pub m1_exact: bool,
    pub m2_at_cap: f64,
}

/// Smallest cap `R` whose estimated truncated second moment exceeds the
/// threshold, from `trials` volumes sampled under `DEFAULT_SEARCH_CAP`.
pub fn required_r(g: &GraphSpec, law: &AnimalLaw, lambda: f64, trials: usize, seed: u64) -> Result<RequiredCap> {
    required_r_with(g, law, lambda, trials, DEFAULT_SEARCH_CAP, seed)
}

pub fn required_r_with(
    g: &GraphSpec,
    law: &AnimalLaw,
    lambda: f64,
    trials: usize,
    search_cap: usize,
    seed: u64,
) -> Result<RequiredCap> {
    if trials == 0 {
        return Err(Error::Argument("need at least one volume sample".into()));
    }
    reproduction_threshold(g, lambda, 1.0)?;
    let vols = sample_volumes(law, g, search_cap, trials, &mut stream(seed, &[TAG_THRESHOLD]))?;
    let worm = law.as_worm();
    let exact_m1 = worm.as_ref().map(|l| length_moment(l, 1, None)).filter(|m| m.is_finite());
    let m1 = match exact_m1 {
        Some(m) => m,
        None => vols.iter().map(|v| v.unwrap_or(0) as f64).sum::<f64>() / trials as f64,
    };
    let threshold = reproduction_threshold(g, lambda, m1)?;
    let mut sorted: Vec<usize> = vols.iter().flatten().copied().collect();
    sorted.sort_unstable();
    let mut acc = 0.0;
    let n = trials as f64;
    for (j, &v) in sorted.iter().enumerate() {
        acc += (v * v) as f64;
        let last_of_value = sorted.get(j + 1) != Some(&v);
        if last_of_value && acc / n > threshold {
            return Ok(RequiredCap { cap: v, threshold, m1, m1_exact: exact_m1.is_some(), m2_at_cap: acc / n });
        }
    }
    let why = match worm.map(|l| length_moment(&l, 2, None)) {
        Some(m2) if m2.is_finite() => format!("second length moment {m2:.6} is below the threshold {threshold:.6}"),
        _ => format!("second volume moment under cap {search_cap} is {:.6}, below the threshold {threshold:.6}", acc / n),
    };
    Err(Error::Unattainable(why))
}
