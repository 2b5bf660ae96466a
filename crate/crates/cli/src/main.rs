use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use jointsparse::analysis::{bound_constants, jrip_constant, theorem2_bound, SIGMA_LIMIT};
use jointsparse::experiments::{self, ExperimentConfig, ExperimentKind};
use jointsparse::solvers::{bjs_objective, js_objective, lasso_on_grid, solve_js};
use jointsparse::{io, MismatchProblem, StackedPhi, C64};

/// Joint-sparse recovery under structured dictionary mismatch.
#[derive(Parser)]
#[command(name = "jsr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem read from matrix files.
    Solve(SolveArgs),
    /// Run a seeded Monte-Carlo experiment and write CSV and SVG results.
    Experiment(ExperimentArgs),
    /// Guarantee tools.
    Analyze {
        #[command(subcommand)]
        tool: AnalyzeTool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Js,
    Bjs,
    Lasso,
}

#[derive(Args)]
struct SolveArgs {
    /// Nominal dictionary A (matrix CSV).
    #[arg(long)]
    a: PathBuf,
    /// Perturbation directions B (matrix CSV).
    #[arg(long)]
    b: PathBuf,
    /// Measurements y (vector CSV).
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "js")]
    method: Method,
    /// Mismatch bound r; required by bjs.
    #[arg(long)]
    bound: Option<f64>,
    /// Solver settings as a TOML `[solver]` table.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for `x_hat.csv`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_parser = parse_kind)]
    kind: ExperimentKind,
    /// TOML experiment configuration; defaults to the built-in preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `output` or `results`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the larger trial counts of the preset.
    #[arg(long)]
    full: bool,
    /// Overrides the number of trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum AnalyzeTool {
    /// Joint RIP constant of Φ = [A, B].
    Jrip {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Joint sparsity level.
        #[arg(long)]
        k: usize,
    },
    /// Error bound constants and the resulting bound.
    Bound {
        /// σ_2K of the sensing matrix.
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: f64,
        /// ‖x − (x)_K‖₂,₁ of the signal.
        #[arg(long, default_value_t = 0.0)]
        tail: f64,
    },
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    ExperimentKind::parse(s).map_err(|e| e.to_string())
}

fn load_problem(a: &Path, b: &Path, y: &Path) -> Result<MismatchProblem<C64>> {
    let a = io::read_matrix(a)?;
    let b = io::read_matrix(b)?;
    let y = io::read_vector(y)?;
    Ok(MismatchProblem::new(a, b, y)?)
}

fn solver_settings(path: Option<&Path>) -> Result<experiments::SolverSettings> {
    #[derive(serde::Deserialize)]
    struct Wrapper {
        #[serde(default)]
        solver: experiments::SolverSettings,
    }
    let Some(path) = path else {
        return Ok(Default::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let w: Wrapper = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(w.solver)
}

fn solve(args: SolveArgs) -> Result<()> {
    let problem = load_problem(&args.a, &args.b, &args.y)?;
    let settings = solver_settings(args.config.as_deref())?;
    let phi = jointsparse::build_phi(&problem);
    let cfg = experiments::fista_config(&phi, &settings)?;
    let (x, iterations, objective) = match args.method {
        Method::Js => {
            let res = solve_js(&problem, args.lambda, &cfg)?;
            let f = js_objective(&problem, args.lambda, &res.x_hat);
            (res.x_hat.into_entries(), res.iterations, f)
        }
        Method::Lasso => {
            let res = lasso_on_grid(&problem, args.lambda, &cfg)?;
            let f = js_objective(&problem, args.lambda, &res.x_hat);
            (res.x_hat.into_entries(), res.iterations, f)
        }
        Method::Bjs => {
            let Some(r) = args.bound else {
                bail!("bjs needs --bound");
            };
            let real = problem.to_real().context("bjs needs real-valued A, B and y")?.with_bound(r)?;
            let res = experiments::solve_bjs_default(&real, args.lambda, &settings)?;
            let f = bjs_objective(&real, args.lambda, &res.x_hat);
            let x = res.x_hat.entries().map(|v| C64::new(v, 0.0));
            (x, res.iterations, f)
        }
    };
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("x_hat.csv");
    io::write_vector(&DVector::from(x), &path)?;
    println!("iterations {iterations}");
    println!("objective {objective}");
    println!("wrote {}", path.display());
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg = ExperimentConfig::from_toml_str(&text)?;
            if cfg.experiment != args.kind {
                bail!("config is for {}, not {}", cfg.experiment.id(), args.kind.id());
            }
            cfg
        }
        None => ExperimentConfig::preset(args.kind, args.full),
    };
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    let out = args
        .out
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let records = experiments::run(&cfg)?;
    let id = cfg.experiment.id();
    let csv = out.join(format!("{id}.csv"));
    let svg = out.join(format!("{id}.svg"));
    experiments::write_csv(&records, &csv)?;
    let series = experiments::mean_series(&records);
    experiments::write_svg(&series, id, &cfg.sweep.name, &svg)?;
    for p in &series {
        println!("{} {}={} mean_error={} n={}", p.method, cfg.sweep.name, p.sweep_value, p.mean_error, p.count);
    }
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}

fn analyze(tool: AnalyzeTool) -> Result<()> {
    match tool {
        AnalyzeTool::Jrip { a, b, k } => {
            let a = io::read_matrix(&a)?;
            let b = io::read_matrix(&b)?;
            let phi = StackedPhi::from_blocks(&a, &b)?;
            let est = jrip_constant(&phi, k)?;
            println!("k {}", est.k);
            println!("sigma {}", est.sigma);
            println!("supports_checked {}", est.supports_checked);
            println!("exhaustive {}", est.exhaustive);
            println!("below_limit {}", est.sigma < SIGMA_LIMIT);
        }
        AnalyzeTool::Bound { sigma, k, lambda, tail } => {
            let (c0, c1) = bound_constants(sigma)?;
            println!("c0 {c0}");
            println!("c1 {c1}");
            println!("bound {}", theorem2_bound(k, lambda, sigma, tail)?);
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => solve(args),
        Command::Experiment(args) => experiment(args),
        Command::Analyze { tool } => analyze(tool),
    }
}
