use poisson_zoo::animal::truncated_volume_moment;
use poisson_zoo::cluster::{clusters, estimate_lambda_c, lambda_sweep, uniqueness_probe, BisectionConfig};
use poisson_zoo::explore::{
    branching_survival, default_growth_a, favored_direction, growth_lemma_harness, reproduction_mean_estimate,
    required_r, worms_explore, BranchingConfig, GrowthParams, IncrementModel, WormsConfig,
};
use poisson_zoo::graph::{ball, known_constants};
use poisson_zoo::rng::{stream, trial_seed};
use poisson_zoo::walk::capacity;
use poisson_zoo::zoo::{campbell_check, realize_with, size_biasing_stats, CampbellTest, ZooOptions};
use serde_json::json;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{num, Output};
use crate::{Command, Failure};

pub fn dispatch(cmd: Command, cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    match cmd {
        Command::Sample => sample(cfg, seed, out),
        Command::Clusters => cluster_cmd(cfg, seed, out),
        Command::Sweep => sweep(cfg, seed, out),
        Command::LambdaC => lambda_c(cfg, seed, out),
        Command::Explore => explore(cfg, seed, out),
        Command::Branch => branch(cfg, seed, out),
        Command::Capacity => capacity_cmd(cfg, seed, out),
        Command::Moments => moments(cfg, seed, out),
        Command::SizeBias => size_bias(cfg, seed, out),
        Command::Campbell => campbell(cfg, seed, out),
        Command::GrowthHarness => growth(cfg, seed, out),
        Command::Uniqueness => uniqueness(cfg, seed, out),
        Command::Constants => constants(cfg, out),
    }
}

fn window(cfg: &ExperimentConfig, seed: u64) -> Result<poisson_zoo::zoo::WindowSample, Failure> {
    let g = cfg.graph()?;
    let mut zoo = realize_with(&g, &cfg.law()?, cfg.lambda()?, cfg.require("volume_cap")?, seed, ZooOptions::default())?;
    Ok(zoo.window_sample(&g.origin(), cfg.or("radius", 5)?)?)
}

fn sample(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let w = window(cfg, seed)?;
    std::fs::write(out.dir().join("occupied.csv"), w.to_csv())?;
    out.json("summary.json", &w.summary())?;
    Ok(())
}

fn cluster_cmd(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let w = window(cfg, seed)?;
    let rep = clusters(&cfg.graph()?, &w)?;
    out.csv("clusters.csv", &["rank", "size"], rep.sizes.iter().enumerate().map(|(i, s)| vec![i.to_string(), s.to_string()]))?;
    out.json("summary.json", &rep)?;
    Ok(())
}

fn sweep(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let r = lambda_sweep(
        &cfg.graph()?,
        &cfg.law()?,
        cfg.require("volume_cap")?,
        cfg.or("radius", 10)?,
        &cfg.grid()?,
        cfg.positive("trials", 100)?,
        seed,
        ZooOptions::default(),
    )?;
    out.csv(
        "sweep.csv",
        &["lambda", "crossing_prob", "ci_lo", "ci_hi", "trials"],
        r.rows().iter().map(|row| row.iter().map(|&x| num(x)).collect()),
    )?;
    out.json("summary.json", &json!({ "monotone": r.monotone, "trials": r.trials }))?;
    Ok(())
}

fn lambda_c(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let grid = cfg.grid()?;
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let bc = BisectionConfig::new(lo, hi, cfg.positive("tol", 0.1)?, cfg.positive("trials", 500)?);
    let r = estimate_lambda_c(&cfg.graph()?, &cfg.law()?, cfg.require("volume_cap")?, cfg.or("radius", 20)?, &bc, seed)?;
    out.csv(
        "evaluations.csv",
        &["lambda", "statistic", "stderr", "trials"],
        r.evaluations.iter().map(|&(l, s, e, n)| vec![num(l), num(s), num(e), n.to_string()]),
    )?;
    out.json("lambda_c.json", &r)?;
    Ok(())
}

fn growth_a(cfg: &ExperimentConfig, g: &poisson_zoo::graph::GraphSpec) -> Result<f64, Failure> {
    match cfg.get::<f64>("growth_a")? {
        Some(a) => Ok(a),
        None => Ok(default_growth_a(g).unwrap_or(2.0)),
    }
}

fn explore(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let g = cfg.graph()?;
    let wc = WormsConfig::new(growth_a(cfg, &g)?, cfg.positive("max_steps", 8)?);
    let trials = cfg.positive("trials", 1)?;
    let mut zoo = realize_with(&g, &cfg.law()?, cfg.lambda()?, cfg.require("volume_cap")?, seed, ZooOptions::default())?;
    let mut rows = Vec::new();
    let (mut alive, mut conformant, mut dups) = (0, 0, 0);
    for t in 0..trials {
        zoo.reseed(trial_seed(seed, t as u64))?;
        let s = worms_explore(&mut zoo, &wc)?;
        alive += s.alive as usize;
        conformant += s.conformant() as usize;
        dups += s.duplicate_animals;
        for st in &s.steps {
            rows.push(vec![
                t.to_string(),
                st.n.to_string(),
                st.e.to_string(),
                st.b.to_string(),
                st.c.to_string(),
                st.growth_ok.to_string(),
                st.animals_consumed.to_string(),
            ]);
        }
    }
    out.csv("explore.csv", &["trial", "n", "e", "b", "c", "growth_ok", "animals_consumed"], rows)?;
    out.json(
        "summary.json",
        &json!({ "trials": trials, "alive": alive, "conformant": conformant, "duplicate_animals": dups, "a": wc.a, "max_steps": wc.max_steps }),
    )?;
    Ok(())
}

fn branch(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let g = cfg.graph()?;
    let law = cfg.law()?;
    let lambda = cfg.lambda()?;
    let moment_trials = cfg.positive("moment_trials", 100_000)?;
    let (cap, threshold) = match cfg.get::<usize>("volume_cap")? {
        Some(c) => (c, None),
        None => {
            let r = required_r(&g, &law, lambda, moment_trials, seed)?;
            (r.cap, Some(r))
        }
    };
    let opts = ZooOptions::default();
    let direction = match cfg.get::<u8>("direction")? {
        Some(d) => d,
        None => favored_direction(&g, &law, lambda, cap, cfg.positive("pilot", 200)?, seed, opts)?,
    };
    let trials = cfg.positive("trials", 200)?;
    let bc = BranchingConfig::new(direction, cfg.positive("max_steps", 4)?);
    let s = branching_survival(&g, &law, lambda, cap, &bc, trials, seed, opts)?;
    let rep = reproduction_mean_estimate(&g, &law, lambda, cap, trials, moment_trials, seed, opts)?;
    out.csv(
        "branch.csv",
        &["generation", "mean_size"],
        s.mean_generations.iter().enumerate().map(|(n, &m)| vec![n.to_string(), num(m)]),
    )?;
    out.json("summary.json", &json!({ "R": cap, "required": threshold, "survival": s, "reproduction": rep }))?;
    Ok(())
}

fn capacity_cmd(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let g = cfg.graph()?;
    let set = ball(&g, &g.origin(), cfg.or("radius", 0)?)?;
    let horizon = cfg.positive("horizon", 64)?;
    let trials = cfg.positive("trials", 10_000)?;
    let e = capacity(&g, &set, horizon, trials, &mut stream(seed, &[]))?;
    out.json(
        "capacity.json",
        &json!({ "set_size": set.len(), "value": e.value, "stderr": e.stderr, "horizon": horizon, "trials": trials, "method": "monte-carlo" }),
    )?;
    Ok(())
}

fn moments(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let g = cfg.graph()?;
    let law = cfg.law()?;
    let trials = cfg.positive("moment_trials", cfg.positive("trials", 100_000)?)?;
    let mut rows = Vec::new();
    for cap in cfg.caps()? {
        for k in 1..=2 {
            let m = truncated_volume_moment(&law, &g, k, cap, trials, &mut stream(seed, &[cap as u64]))?;
            rows.push(vec![k.to_string(), cap.to_string(), num(m.estimate.value), num(m.estimate.stderr), num(m.acceptance)]);
        }
    }
    out.csv("moments.csv", &["k", "R", "estimate", "stderr", "acceptance"], rows)?;
    Ok(())
}

fn size_bias(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let recs = size_biasing_stats(
        &cfg.graph()?,
        &cfg.law()?,
        cfg.lambda()?,
        &cfg.caps()?,
        cfg.positive("trials", 10_000)?,
        cfg.positive("moment_trials", 100_000)?,
        seed,
        ZooOptions::default(),
    )?;
    out.csv(
        "size_bias.csv",
        &[
            "R", "mean_mu", "mu_stderr", "pred_mu", "pred_mu_stderr", "mean_sigma", "sigma_stderr", "pred_sigma",
            "pred_sigma_stderr", "z_mu", "z_sigma",
        ],
        recs.iter().map(|r| {
            let (zm, zs) = r.z_scores();
            vec![
                r.cap.to_string(),
                num(r.mean_mu.value),
                num(r.mean_mu.stderr),
                num(r.pred_mu.value),
                num(r.pred_mu.stderr),
                num(r.mean_sigma_hit.value),
                num(r.mean_sigma_hit.stderr),
                num(r.pred_sigma.value),
                num(r.pred_sigma.stderr),
                num(zm),
                num(zs),
            ]
        }),
    )?;
    Ok(())
}

fn campbell(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let g = cfg.graph()?;
    let test = match cfg.or("test", "count".to_string())?.as_str() {
        "count" => CampbellTest::Count,
        "volume" => CampbellTest::Volume,
        "volume2" => CampbellTest::VolumeSquared,
        other => return Err(ConfigError(format!("field `test` = `{other}`: expected count, volume or volume2")).into()),
    };
    let region = ball(&g, &g.origin(), cfg.or("radius", 1)?)?;
    let r = campbell_check(
        &g,
        &cfg.law()?,
        cfg.lambda()?,
        cfg.require("volume_cap")?,
        |a| test.eval(a),
        &region,
        cfg.positive("trials", 10_000)?,
        cfg.positive("moment_trials", 100_000)?,
        seed,
    )?;
    out.json("campbell.json", &json!({ "test": test, "region_size": region.len(), "record": r, "z": r.z_score() }))?;
    Ok(())
}

fn parse_model(s: &str) -> Result<IncrementModel, ConfigError> {
    match s.split_once(':') {
        None if s == "poisson" => Ok(IncrementModel::Poisson),
        None if s == "deterministic" => Ok(IncrementModel::Deterministic),
        None if s == "zero" => Ok(IncrementModel::Zero),
        Some(("adversarial", q)) => q
            .parse()
            .map(|q| IncrementModel::Adversarial { q })
            .map_err(|e| ConfigError(format!("field `model`: {e}"))),
        _ => Err(ConfigError(format!("field `model` = `{s}`: expected poisson, deterministic, zero or adversarial:q"))),
    }
}

fn growth(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let params = GrowthParams::new(cfg.or("growth_a", 2.0)?, cfg.or("b", 40.0)?, cfg.or("c", 10.0)?)?;
    let model = parse_model(&cfg.or("model", "poisson".to_string())?)?;
    let r = growth_lemma_harness(model, params, cfg.positive("trials", 10_000)?, cfg.positive("max_steps", 10)?, seed)?;
    out.json("growth.json", &json!({ "params": params, "model": model, "record": r }))?;
    Ok(())
}

fn uniqueness(cfg: &ExperimentConfig, seed: u64, out: &Output) -> Result<(), Failure> {
    let g = cfg.graph()?;
    let mut zoo = realize_with(&g, &cfg.law()?, cfg.lambda()?, cfg.require("volume_cap")?, seed, ZooOptions::default())?;
    let radius = cfg.or("radius", 8)?;
    let mut rows = Vec::new();
    for t in 0..cfg.positive("trials", 10)? {
        zoo.reseed(trial_seed(seed, t as u64))?;
        let w = zoo.window_sample(&g.origin(), radius)?;
        rows.push(vec![t.to_string(), uniqueness_probe(&g, &w)?.to_string()]);
    }
    out.csv("uniqueness.csv", &["trial", "crossing_clusters"], rows)?;
    Ok(())
}

fn constants(cfg: &ExperimentConfig, out: &Output) -> Result<(), Failure> {
    let k = known_constants(&cfg.graph()?);
    println!("{}", serde_json::to_string(&k).map_err(|e| Failure::Other(e.to_string()))?);
    out.json("constants.json", &k)?;
    Ok(())
}
