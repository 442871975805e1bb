use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use poisson_zoo::animal::AnimalLaw;
use poisson_zoo::graph::GraphSpec;

/// Keys accepted in config files and as flags (with `_` spelled `-`).
pub const KEYS: &[&str] = &[
    "graph", "law", "lambda", "volume_cap", "radius", "trials", "seed", "out", "threads", "grid", "max_steps",
    "direction", "growth_a", "tol", "caps", "test", "b", "c", "model", "horizon", "moment_trials", "pilot",
];

/// Settings of one run: config file entries overridden by flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn canonical(key: &str) -> String {
    let k = key.trim().replace('-', "_");
    if k == "R" { "volume_cap".into() } else { k }
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError(format!("{origin}:{}: expected `key = value`", i + 1)));
            };
            let k = canonical(k);
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError(format!("{origin}:{}: unknown key `{k}`", i + 1)));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(ExperimentConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(canonical(key), value.to_string());
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| ConfigError(format!("field `{key}` = `{v}`: {e}"))))
            .transpose()
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| ConfigError(format!("missing field `{key}`")))
    }

    pub fn positive<T: FromStr + PartialOrd + Default>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: Display,
    {
        let v = self.or(key, default)?;
        if v <= T::default() {
            return Err(ConfigError(format!("field `{key}` must be positive")));
        }
        Ok(v)
    }

    pub fn graph(&self) -> Result<GraphSpec, ConfigError> {
        self.require("graph")
    }

    pub fn law(&self) -> Result<AnimalLaw, ConfigError> {
        self.require("law")
    }

    pub fn lambda(&self) -> Result<f64, ConfigError> {
        let l: f64 = self.require("lambda")?;
        if !(l >= 0.0 && l.is_finite()) {
            return Err(ConfigError(format!("field `lambda` = {l} must be finite and nonnegative")));
        }
        Ok(l)
    }

    /// `a:b:n`, `n` evenly spaced points from `a` to `b`.
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let s: String = self.require("grid")?;
        let bad = || ConfigError(format!("field `grid` = `{s}`: expected a:b:n"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !(a <= b) {
            return Err(bad());
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
    }

    /// Comma-separated caps, defaulting to the single `volume_cap`.
    pub fn caps(&self) -> Result<Vec<usize>, ConfigError> {
        match self.raw("caps") {
            Some(s) => s
                .split(',')
                .map(|c| c.trim().parse::<usize>().map_err(|e| ConfigError(format!("field `caps`: {e}"))))
                .collect(),
            None => Ok(vec![self.require("volume_cap")?]),
        }
    }
}
