//! Single Monte-Carlo trials. Each draws its own scene from `seed` and runs
//! the requested methods on it.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::config::{MimoScenario, NestedScenario, RandomScenario, SolverSettings};
use crate::analysis::reconstruction_error;
use crate::doa::{
    detections_from_solution, doa_error, draw_separated, make_grid, merge_targets, mimo_model, nested_array_model,
    DoaScene, MimoConfig, NestedArrayConfig,
};
use crate::model::{build_phi, MismatchProblem, Scalar, StackedPhi};
use crate::solvers::{
    alt_min_baseline, continuation_schedule, default_final_mu, lambda_rule, lasso_on_grid, power_iteration_norm_sq,
    solve_bjs, solve_js, AltMinOptions, ContinuationSchedule, FistaConfig, SolveResult,
};
use crate::{Error, Result, C64};

/// Result of one method on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: String,
    pub error: f64,
    pub iterations: usize,
    pub wall_ms: f64,
}

fn unknown(method: &str) -> Error {
    Error::Parameter(format!("unknown method '{method}'"))
}

/// FISTA settings for `Φ`, with `L` from power iteration times the safety
/// factor.
pub fn fista_config<T: Scalar>(phi: &StackedPhi<T>, settings: &SolverSettings) -> Result<FistaConfig> {
    let l = power_iteration_norm_sq(phi.matrix(), settings.power_iters) * settings.lipschitz_safety;
    Ok(FistaConfig::new(l.max(f64::MIN_POSITIVE))?
        .with_tol(settings.tol)
        .with_max_iters(settings.max_iters)
        .with_recording(false))
}

/// Geometric continuation from `mu_start_scale / L` down to the final level
/// (default `10⁻⁸/λ`).
pub fn continuation_for(cfg: &FistaConfig, lambda: f64, settings: &SolverSettings) -> Result<ContinuationSchedule> {
    let mu_final = settings.mu_final.unwrap_or_else(|| default_final_mu(lambda));
    let mu_start = (settings.mu_start_scale / cfg.lipschitz).max(mu_final);
    let stages = settings
        .continuation_stages
        .unwrap_or_else(|| (mu_start / mu_final).log10().ceil().max(0.0) as usize + 1);
    continuation_schedule(mu_start, mu_final, stages)
}

/// Bounded joint-sparse solve with the default continuation.
pub fn solve_bjs_default(
    problem: &MismatchProblem<f64>,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<SolveResult<f64>> {
    let cfg = fista_config(&build_phi(problem), settings)?;
    let schedule = continuation_for(&cfg, lambda, settings)?;
    solve_bjs(problem, lambda, &schedule, &cfg)
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64() * 1e3))
}

/// Gaussian `A`, `B`, `β` and noise; `K` Gaussian nonzeros in `s`. Scores
/// `‖ŝ − s‖/‖s‖`.
pub fn random_trial(
    sc: &RandomScenario,
    settings: &SolverSettings,
    lambda_scale: f64,
    methods: &[String],
    seed: u64,
) -> Result<Vec<MethodOutcome>> {
    let (m, n, k) = (sc.m, sc.n, sc.k);
    if m == 0 || k == 0 || k > n {
        return Err(Error::Parameter(format!("need M >= 1 and 1 <= K <= N, got M = {m}, K = {k}, N = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut ChaCha8Rng, r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
    let a = gauss(&mut rng, m, n);
    let b = gauss(&mut rng, m, n);
    let mut s = DVector::zeros(n);
    for i in rand::seq::index::sample(&mut rng, n, k) {
        s[i] = rng.sample(StandardNormal);
    }
    let beta_dist = Normal::new(0.0, sc.beta_std).map_err(|e| Error::Parameter(e.to_string()))?;
    let beta = DVector::from_fn(n, |_, _| beta_dist.sample(&mut rng));
    let noise = DVector::from_fn(m, |_, _| sc.sigma_n * rng.sample::<f64, _>(StandardNormal));
    let y = (&a + &b * DMatrix::from_diagonal(&beta)) * &s + noise;
    let problem = MismatchProblem::new(a, b, y)?.with_noise(sc.sigma_n)?;
    let lambda = lambda_rule(lambda_scale, sc.sigma_n, n);

    methods
        .iter()
        .map(|method| {
            let ((s_hat, iterations), wall_ms) = match method.as_str() {
                "js" => timed(|| {
                    let cfg = fista_config(&build_phi(&problem), settings)?;
                    let res = solve_js(&problem, lambda, &cfg)?;
                    Ok((res.x_hat.s(), res.iterations))
                })?,
                "alt-min" => timed(|| {
                    let opts = AltMinOptions {
                        power_iters: settings.power_iters,
                        inner_tol: settings.tol,
                        ..AltMinOptions::new(settings.alt_min_outer).with_inner_iters(settings.alt_min_inner_iters)
                    };
                    let res = alt_min_baseline(&problem, lambda, &opts)?;
                    Ok((res.s_hat, res.iterations))
                })?,
                other => return Err(unknown(other)),
            };
            Ok(MethodOutcome {
                method: method.clone(),
                error: reconstruction_error(&s_hat, &s)?,
                iterations,
                wall_ms,
            })
        })
        .collect()
}

/// Builds the scene of a nested-array trial: equal-power targets in
/// `sin θ`, kept apart and away from the grid ends.
pub fn nested_scene(sc: &NestedScenario, rng: &mut ChaCha8Rng) -> Result<DoaScene<f64>> {
    let grid = make_grid(sc.grid_lo, sc.grid_hi, sc.grid_step)?;
    let gap = sc.min_separation.unwrap_or(grid.step());
    let doas = draw_separated(rng, sc.targets, grid.lo() + sc.edge_margin, grid.hi() - sc.edge_margin, gap)?;
    let powers = vec![1.0; doas.len()];
    DoaScene::new(grid, doas, powers)
}

/// Nested-array covariance trial, scored by DOA error in `sin θ`.
pub fn nested_trial(
    sc: &NestedScenario,
    settings: &SolverSettings,
    lambda_scale: f64,
    methods: &[String],
    seed: u64,
) -> Result<Vec<MethodOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scene = nested_scene(sc, &mut rng)?;
    let noise_power = 10f64.powf(-sc.snr_db / 10.0);
    let cfg = NestedArrayConfig::two_level(sc.n1, sc.n2, sc.snapshots, noise_power, rng.random());
    let problem = nested_array_model(&cfg, &scene)?;
    let lambda = lambda_rule(lambda_scale, problem.sigma_n(), scene.grid.len());

    methods
        .iter()
        .map(|method| {
            let (res, wall_ms) = match method.as_str() {
                "bjs" => timed(|| solve_bjs_default(&problem, lambda, settings))?,
                "js" => timed(|| solve_js(&problem, lambda, &fista_config(&build_phi(&problem), settings)?))?,
                other => return Err(unknown(other)),
            };
            let detections = detections_from_solution(&res.x_hat, &scene.grid, settings.detection_threshold);
            let merged = merge_targets(&detections, &scene.grid);
            Ok(MethodOutcome {
                method: method.clone(),
                error: doa_error(&merged, &scene),
                iterations: res.iterations,
                wall_ms,
            })
        })
        .collect()
}

/// Builds the scene of a MIMO trial: one target drawn uniformly from each
/// interval, with random phase and the configured power.
pub fn mimo_scene(sc: &MimoScenario, rng: &mut ChaCha8Rng) -> Result<DoaScene<C64>> {
    let grid = make_grid(sc.grid_lo, sc.grid_hi, sc.grid_step)?;
    if sc.intervals.len() != sc.powers.len() {
        return Err(Error::Parameter("one power per target interval".into()));
    }
    for _ in 0..1000 {
        let doas: Vec<f64> = sc.intervals.iter().map(|[lo, hi]| rng.random_range(*lo..=*hi)).collect();
        let amps: Vec<C64> = sc
            .powers
            .iter()
            .map(|&p| C64::from_polar(p.sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        if let Ok(scene) = DoaScene::new(grid.clone(), doas, amps) {
            return Ok(scene);
        }
    }
    Err(Error::Parameter("could not draw separated MIMO targets".into()))
}

/// Compressive MIMO radar trial, scored by DOA error in degrees.
pub fn mimo_trial(
    sc: &MimoScenario,
    settings: &SolverSettings,
    lambda_scale: f64,
    methods: &[String],
    seed: u64,
) -> Result<Vec<MethodOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scene = mimo_scene(sc, &mut rng)?;
    let cfg = MimoConfig {
        n_tx: sc.n_tx,
        n_rx: sc.n_rx,
        placement_radius: sc.radius,
        carrier: sc.carrier,
        speed: sc.speed,
        snapshots: sc.snapshots,
        compressed_dim: sc.compressed_dim,
        snr_db: sc.snr_db,
        seed: rng.random(),
    };
    let problem = mimo_model(&cfg, &scene)?;
    let lambda = lambda_rule(lambda_scale, problem.sigma_n(), scene.grid.len());

    methods
        .iter()
        .map(|method| {
            let (res, wall_ms) = match method.as_str() {
                "js" => timed(|| solve_js(&problem, lambda, &fista_config(&build_phi(&problem), settings)?))?,
                "lasso" => timed(|| lasso_on_grid(&problem, lambda, &fista_config(&build_phi(&problem), settings)?))?,
                other => return Err(unknown(other)),
            };
            let detections = detections_from_solution(&res.x_hat, &scene.grid, settings.detection_threshold);
            let merged = merge_targets(&detections, &scene.grid);
            Ok(MethodOutcome {
                method: method.clone(),
                error: doa_error(&merged, &scene),
                iterations: res.iterations,
                wall_ms,
            })
        })
        .collect()
}
