use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    RandomM,
    RandomK,
    NestedSnr,
    NestedT,
    NestedLarge,
    MimoSnr,
    MimoDr,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::RandomM,
        ExperimentKind::RandomK,
        ExperimentKind::NestedSnr,
        ExperimentKind::NestedT,
        ExperimentKind::NestedLarge,
        ExperimentKind::MimoSnr,
        ExperimentKind::MimoDr,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::RandomM => "random-m",
            ExperimentKind::RandomK => "random-k",
            ExperimentKind::NestedSnr => "nested-snr",
            ExperimentKind::NestedT => "nested-t",
            ExperimentKind::NestedLarge => "nested-large",
            ExperimentKind::MimoSnr => "mimo-snr",
            ExperimentKind::MimoDr => "mimo-dr",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| Error::Parameter(format!("unknown experiment '{id}'")))
    }

    /// Methods this experiment knows how to run.
    pub fn supported_methods(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::RandomM | ExperimentKind::RandomK => &["js", "alt-min"],
            ExperimentKind::NestedSnr | ExperimentKind::NestedT | ExperimentKind::NestedLarge => &["bjs", "js"],
            ExperimentKind::MimoSnr | ExperimentKind::MimoDr => &["js", "lasso"],
        }
    }

    /// Sweep variables this experiment accepts.
    pub fn sweep_names(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::RandomM | ExperimentKind::RandomK => &["m", "k"],
            ExperimentKind::NestedSnr | ExperimentKind::NestedT | ExperimentKind::NestedLarge => &["snr_db", "snapshots"],
            ExperimentKind::MimoSnr | ExperimentKind::MimoDr => &["snr_db", "power_b"],
        }
    }

    /// Default `λ = scale·σₙ·√(2 ln N)` scale.
    pub fn default_lambda_scale(self) -> f64 {
        match self {
            ExperimentKind::RandomM | ExperimentKind::RandomK => 10.0,
            ExperimentKind::NestedSnr | ExperimentKind::NestedT | ExperimentKind::NestedLarge => 20.0,
            ExperimentKind::MimoSnr | ExperimentKind::MimoDr => 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Overrides the experiment's default λ scale.
    pub lambda_scale: Option<f64>,
    /// Multiplies the power-iteration estimate of `‖Φ‖₂²`.
    pub lipschitz_safety: f64,
    pub power_iters: usize,
    pub tol: f64,
    /// FISTA iteration cap, per continuation stage.
    pub max_iters: usize,
    /// Defaults to one stage per decade between the first and final `μ`.
    pub continuation_stages: Option<usize>,
    /// First smoothing level is `mu_start_scale / L`.
    pub mu_start_scale: f64,
    /// Final smoothing level; defaults to `10⁻⁸/λ`.
    pub mu_final: Option<f64>,
    pub alt_min_outer: usize,
    pub alt_min_inner_iters: usize,
    pub detection_threshold: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            lambda_scale: None,
            lipschitz_safety: 1.01,
            power_iters: 500,
            tol: 1e-8,
            max_iters: 20_000,
            continuation_stages: None,
            mu_start_scale: 1.0,
            mu_final: None,
            alt_min_outer: 30,
            alt_min_inner_iters: 2_000,
            detection_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomScenario {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub sigma_n: f64,
    pub beta_std: f64,
}

impl Default for RandomScenario {
    fn default() -> Self {
        RandomScenario {
            n: 100,
            m: 80,
            k: 3,
            sigma_n: 0.1,
            beta_std: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NestedScenario {
    /// Dense subarray at `1, …, n1`.
    pub n1: u32,
    /// Sparse subarray at `(n1 + 1)·j`, `j = 1, …, n2`.
    pub n2: u32,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    pub targets: usize,
    pub snr_db: f64,
    pub snapshots: usize,
    /// Smallest gap between targets, in `sin θ`; defaults to just over `2r`.
    pub min_separation: Option<f64>,
    /// Targets stay this far inside the grid ends.
    pub edge_margin: f64,
}

impl Default for NestedScenario {
    fn default() -> Self {
        NestedScenario {
            n1: 5,
            n2: 6,
            grid_lo: -1.0,
            grid_hi: 1.0,
            grid_step: 0.01,
            targets: 15,
            snr_db: 0.0,
            snapshots: 1000,
            min_separation: None,
            edge_margin: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MimoScenario {
    pub n_tx: usize,
    pub n_rx: usize,
    pub radius: f64,
    pub carrier: f64,
    pub speed: f64,
    pub snapshots: usize,
    pub compressed_dim: usize,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    pub snr_db: f64,
    /// One `[lo, hi]` interval (degrees) per target.
    pub intervals: Vec<[f64; 2]>,
    /// Power of each target; `power_b` sweeps the second.
    pub powers: Vec<f64>,
}

impl Default for MimoScenario {
    fn default() -> Self {
        MimoScenario {
            n_tx: 30,
            n_rx: 10,
            radius: 5.0,
            carrier: 1e9,
            speed: 3e8,
            snapshots: 50,
            compressed_dim: 10,
            grid_lo: -40.0,
            grid_hi: 40.0,
            grid_step: 1.0,
            snr_db: 10.0,
            intervals: vec![[16.5, 17.5], [18.5, 19.5]],
            powers: vec![1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub methods: Vec<String>,
    /// Output directory.
    #[serde(default)]
    pub output: Option<String>,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub random: RandomScenario,
    #[serde(default)]
    pub nested: NestedScenario,
    #[serde(default)]
    pub mimo: MimoScenario,
}

impl ExperimentConfig {
    /// Ready-made configuration for each experiment. `full` uses the larger
    /// trial counts; otherwise the desk-scale counts.
    pub fn preset(kind: ExperimentKind, full: bool) -> Self {
        let trials = |desk: usize, large: usize| if full { large } else { desk };
        let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let sweep = |name: &str, values: &[f64]| SweepConfig {
            name: name.to_string(),
            values: values.to_vec(),
        };
        let mut cfg = ExperimentConfig {
            experiment: kind,
            trials: trials(25, 50),
            base_seed: 1,
            methods: owned(kind.supported_methods()),
            output: None,
            sweep: sweep("m", &[80.0]),
            solver: SolverSettings::default(),
            random: RandomScenario::default(),
            nested: NestedScenario::default(),
            mimo: MimoScenario::default(),
        };
        match kind {
            ExperimentKind::RandomM => {
                cfg.sweep = sweep("m", &[30.0, 40.0, 50.0, 60.0, 70.0, 80.0]);
            }
            ExperimentKind::RandomK => {
                cfg.random.m = 50;
                cfg.sweep = sweep("k", &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0]);
            }
            ExperimentKind::NestedSnr => {
                cfg.methods = owned(&["bjs"]);
                cfg.sweep = sweep("snr_db", &[-10.0, -5.0, 0.0, 5.0, 10.0]);
            }
            ExperimentKind::NestedT => {
                cfg.methods = owned(&["bjs"]);
                cfg.sweep = sweep("snapshots", &[100.0, 200.0, 500.0, 1000.0, 2000.0]);
            }
            ExperimentKind::NestedLarge => {
                cfg.methods = owned(&["bjs"]);
                cfg.trials = trials(3, 10);
                cfg.nested.n1 = 10;
                cfg.nested.n2 = 12;
                cfg.nested.targets = 26;
                cfg.nested.snapshots = 500;
                cfg.sweep = sweep("snr_db", &[10.0]);
            }
            ExperimentKind::MimoSnr => {
                cfg.sweep = sweep("snr_db", &[-10.0, 0.0, 10.0]);
            }
            ExperimentKind::MimoDr => {
                cfg.mimo.snr_db = 10.0;
                cfg.sweep = sweep("power_b", &[0.05, 0.1, 0.2, 0.5, 1.0]);
            }
        }
        cfg
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parameter(format!("config: {e}")))
    }

    pub fn lambda_scale(&self) -> f64 {
        self.solver.lambda_scale.unwrap_or(self.experiment.default_lambda_scale())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.sweep.values.is_empty() {
            return bad("sweep values must be nonempty".into());
        }
        if self.sweep.values.iter().any(|v| !v.is_finite()) {
            return bad("sweep values must be finite".into());
        }
        if !self.experiment.sweep_names().contains(&self.sweep.name.as_str()) {
            return bad(format!(
                "experiment {} cannot sweep '{}' (expected one of {:?})",
                self.experiment.id(),
                self.sweep.name,
                self.experiment.sweep_names()
            ));
        }
        if self.methods.is_empty() {
            return bad("methods must be nonempty".into());
        }
        for m in &self.methods {
            if !self.experiment.supported_methods().contains(&m.as_str()) {
                return bad(format!(
                    "experiment {} does not support method '{m}' (expected one of {:?})",
                    self.experiment.id(),
                    self.experiment.supported_methods()
                ));
            }
        }
        let s = &self.solver;
        if !(s.lipschitz_safety >= 1.0) || s.power_iters == 0 || s.max_iters == 0 || !(s.tol >= 0.0) {
            return bad("solver: need lipschitz_safety >= 1, power_iters >= 1, max_iters >= 1, tol >= 0".into());
        }
        if s.lambda_scale.is_some_and(|l| !(l > 0.0)) {
            return bad("solver: lambda_scale must be > 0".into());
        }
        if s.continuation_stages == Some(0) || !(s.mu_start_scale > 0.0) || s.mu_final.is_some_and(|m| !(m > 0.0)) {
            return bad("solver: continuation needs >= 1 stage and positive smoothing levels".into());
        }
        if s.alt_min_outer == 0 || s.alt_min_inner_iters == 0 {
            return bad("solver: alternating minimization needs positive iteration counts".into());
        }
        if !(0.0..1.0).contains(&s.detection_threshold) {
            return bad("solver: detection_threshold must be in [0, 1)".into());
        }
        if self.mimo.intervals.len() != self.mimo.powers.len() {
            return bad("mimo: intervals and powers must have the same length".into());
        }
        Ok(())
    }

    /// Seed of a trial: `base_seed + trial + 10⁶·sweep_index`.
    pub fn trial_seed(&self, sweep_index: usize, trial: usize) -> u64 {
        self.base_seed
            .wrapping_add(trial as u64)
            .wrapping_add(1_000_000u64.wrapping_mul(sweep_index as u64))
    }
}
