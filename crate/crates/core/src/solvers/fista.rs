//! Fast Iterative Shrinkage-Thresholding Algorithm

use nalgebra::DVector;

use crate::model::{JointVector, Scalar};
use crate::{Error, Result};

/// Default stopping tolerance on the relative objective change.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap (per continuation stage).
pub const DEFAULT_MAX_ITERS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FistaConfig {
    /// Upper bound on the Lipschitz constant of the smooth gradient.
    pub lipschitz: f64,
    pub max_iters: usize,
    /// Stop once `|F(x_k) − F(x_{k−1})| / |F(x_{k−1})| < tol`. Zero disables.
    pub tol: f64,
    pub record_objective: bool,
}

impl FistaConfig {
    pub fn new(lipschitz: f64) -> Result<Self> {
        let cfg = FistaConfig {
            lipschitz,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            record_objective: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_recording(mut self, record: bool) -> Self {
        self.record_objective = record;
        self
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return Err(Error::Parameter(format!("Lipschitz bound must be finite and > 0, got {}", self.lipschitz)));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be >= 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Parameter(format!("tol must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Raw output of the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct FistaRun<T: Scalar> {
    pub x: DVector<T>,
    /// `F(x_0), F(x_1), …` when recording; empty otherwise.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Result of a joint-sparse solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T: Scalar> {
    pub x_hat: JointVector<T>,
    /// Objective at the starting point followed by one entry per iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> SolveResult<T> {
    pub(crate) fn from_run(run: FistaRun<T>) -> Result<Self> {
        Ok(SolveResult {
            x_hat: JointVector::new(run.x)?,
            objective_trace: run.objective_trace,
            iterations: run.iterations,
            converged: run.converged,
        })
    }
}

/// Momentum sequence `t_{k+1} = (1 + √(1 + 4t_k²)) / 2`.
pub fn next_momentum(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

/// Minimizes `F = f + g` given `∇f`, the prox of `g` (called with step
/// `1/L`) and the objective `F` itself, starting from `x0`.
pub fn fista<T: Scalar>(
    grad_f: impl Fn(&DVector<T>) -> DVector<T>,
    prox_g: impl Fn(DVector<T>, f64) -> DVector<T>,
    objective: impl Fn(&DVector<T>) -> f64,
    x0: DVector<T>,
    cfg: &FistaConfig,
) -> Result<FistaRun<T>> {
    cfg.validate()?;
    let step = 1.0 / cfg.lipschitz;
    let track = cfg.record_objective || cfg.tol > 0.0;

    let mut trace = Vec::new();
    let mut f_prev = if track { objective(&x0) } else { 0.0 };
    if cfg.record_objective {
        trace.push(f_prev);
    }

    let mut x_prev = x0.clone();
    let mut z = x0;
    let mut t = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.max_iters {
        iterations = k;
        let mut v = grad_f(&z);
        v.scale_mut(-step);
        v += &z;
        let x = prox_g(v, step);
        if !x.iter().all(|e| e.is_finite()) {
            return Err(Error::Divergence { iteration: k });
        }

        let t_next = next_momentum(t);
        let momentum = (t - 1.0) / t_next;
        z = &x - &x_prev;
        z.scale_mut(momentum);
        z += &x;

        if track {
            let f = objective(&x);
            if !f.is_finite() {
                return Err(Error::Divergence { iteration: k });
            }
            if cfg.record_objective {
                trace.push(f);
            }
            if cfg.tol > 0.0 {
                let rel = (f - f_prev).abs() / f_prev.abs().max(f64::MIN_POSITIVE);
                if rel < cfg.tol {
                    converged = true;
                }
            }
            f_prev = f;
        }

        x_prev = x;
        t = t_next;
        if converged {
            break;
        }
    }

    Ok(FistaRun {
        x: x_prev,
        objective_trace: trace,
        iterations,
        converged,
    })
}
