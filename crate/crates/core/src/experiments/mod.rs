//! Seeded Monte-Carlo experiments and their CSV/SVG output.

mod config;
mod emit;
mod trials;

pub use config::{
    ExperimentConfig, ExperimentKind, MimoScenario, NestedScenario, RandomScenario, SolverSettings, SweepConfig,
};
pub use emit::{
    mean_series, read_csv, read_csv_from, render_svg, write_csv, write_csv_to, write_svg, ExperimentRecord, SeriesPoint,
    CSV_HEADER,
};
pub use trials::{
    continuation_for, fista_config, mimo_scene, mimo_trial, nested_scene, nested_trial, random_trial,
    solve_bjs_default, MethodOutcome,
};

use crate::{Error, Result};

/// Runs every trial of every sweep point and returns the records sorted by
/// sweep index, trial and method.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let scale = cfg.lambda_scale();
    let mut records = Vec::new();
    for (si, &value) in cfg.sweep.values.iter().enumerate() {
        for trial in 0..cfg.trials {
            let seed = cfg.trial_seed(si, trial);
            let outcomes = run_point(cfg, value, scale, seed)?;
            records.extend(outcomes.into_iter().map(|o| ExperimentRecord {
                experiment: cfg.experiment.id().to_string(),
                sweep_name: cfg.sweep.name.clone(),
                sweep_value: value,
                sweep_index: si,
                trial,
                seed,
                method: o.method,
                error: o.error,
                iterations: o.iterations,
                wall_ms: o.wall_ms,
            }));
        }
    }
    records.sort_by(|a, b| {
        (a.sweep_index, a.trial, &a.method).cmp(&(b.sweep_index, b.trial, &b.method))
    });
    Ok(records)
}

fn as_count(name: &str, value: f64) -> Result<usize> {
    if value < 1.0 || value.fract() != 0.0 {
        return Err(Error::Parameter(format!("sweep value {value} for '{name}' must be a positive integer")));
    }
    Ok(value as usize)
}

fn run_point(cfg: &ExperimentConfig, value: f64, scale: f64, seed: u64) -> Result<Vec<MethodOutcome>> {
    let name = cfg.sweep.name.as_str();
    match cfg.experiment {
        ExperimentKind::RandomM | ExperimentKind::RandomK => {
            let mut sc = cfg.random.clone();
            match name {
                "m" => sc.m = as_count(name, value)?,
                _ => sc.k = as_count(name, value)?,
            }
            random_trial(&sc, &cfg.solver, scale, &cfg.methods, seed)
        }
        ExperimentKind::NestedSnr | ExperimentKind::NestedT | ExperimentKind::NestedLarge => {
            let mut sc = cfg.nested.clone();
            match name {
                "snr_db" => sc.snr_db = value,
                _ => sc.snapshots = as_count(name, value)?,
            }
            nested_trial(&sc, &cfg.solver, scale, &cfg.methods, seed)
        }
        ExperimentKind::MimoSnr | ExperimentKind::MimoDr => {
            let mut sc = cfg.mimo.clone();
            match name {
                "snr_db" => sc.snr_db = value,
                _ => {
                    if sc.powers.len() < 2 || !(value > 0.0) {
                        return Err(Error::Parameter("power_b needs two targets and a positive value".into()));
                    }
                    sc.powers[1] = value;
                }
            }
            mimo_trial(&sc, &cfg.solver, scale, &cfg.methods, seed)
        }
    }
}
