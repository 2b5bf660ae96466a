//! Comparison baselines: on-grid LASSO that ignores the mismatch directions,
//! and alternating minimization over `(s, β)`.

use nalgebra::{DMatrix, DVector};

use super::fista::{fista, FistaConfig, SolveResult, DEFAULT_TOL};
use super::spectral::estimate_spectral_norm;
use crate::model::{JointVector, MismatchProblem, Scalar, StackedPhi};
use crate::prox::shrink_entries;
use crate::{Error, Result};

fn lasso_objective<T: Scalar>(d: &DMatrix<T>, y: &DVector<T>, lambda: f64, s: &DVector<T>) -> f64 {
    0.5 * (d * s - y).norm_squared() + lambda * s.iter().map(|v| v.modulus()).sum::<f64>()
}

fn lasso<T: Scalar>(
    d: &DMatrix<T>,
    y: &DVector<T>,
    lambda: f64,
    cfg: &FistaConfig,
    s0: DVector<T>,
) -> Result<super::fista::FistaRun<T>> {
    fista(
        |z| d.ad_mul(&(d * z - y)),
        |mut v, step| {
            shrink_entries(&mut v, lambda * step);
            v
        },
        |s| lasso_objective(d, y, lambda, s),
        s0,
        cfg,
    )
}

/// Solves `min ½‖As − y‖² + λ‖s‖₁`, ignoring `B`. The result is laid out as
/// a joint vector `[s; 0]`. `cfg.lipschitz` must bound `‖A‖₂²`; a bound on
/// `‖Φ‖₂²` also works.
pub fn lasso_on_grid<T: Scalar>(problem: &MismatchProblem<T>, lambda: f64, cfg: &FistaConfig) -> Result<SolveResult<T>> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    let run = lasso(problem.a(), problem.y(), lambda, cfg, DVector::zeros(problem.n()))?;
    let zeros = DVector::zeros(problem.n());
    Ok(SolveResult {
        x_hat: JointVector::from_parts(&run.x, &zeros)?,
        objective_trace: run.objective_trace,
        iterations: run.iterations,
        converged: run.converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltMinOptions {
    pub outer_iters: usize,
    /// FISTA iteration cap for each LASSO step.
    pub inner_max_iters: usize,
    pub inner_tol: f64,
    /// Stop when the outer objective changes by less than this (relative).
    pub outer_tol: f64,
    pub power_iters: usize,
}

impl AltMinOptions {
    pub fn new(outer_iters: usize) -> Self {
        AltMinOptions {
            outer_iters,
            inner_max_iters: 2_000,
            inner_tol: DEFAULT_TOL,
            outer_tol: 1e-9,
            power_iters: 200,
        }
    }

    pub fn with_inner_iters(mut self, iters: usize) -> Self {
        self.inner_max_iters = iters;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltMinResult {
    pub s_hat: DVector<f64>,
    pub beta_hat: DVector<f64>,
    /// Objective at `s = 0, β = 0` followed by one entry per outer iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

/// `½‖(A + B·diag β)s − y‖² + λ‖s‖₁`.
pub fn mismatch_objective(problem: &MismatchProblem<f64>, lambda: f64, s: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let d = dictionary(problem, beta);
    lasso_objective(&d, problem.y(), lambda, s)
}

fn dictionary(problem: &MismatchProblem<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    let mut d = problem.b().clone();
    for (j, mut col) in d.column_iter_mut().enumerate() {
        col *= beta[j];
    }
    d += problem.a();
    d
}

/// Least-squares update of `β` on the support of `s`, all other entries
/// left as they are.
fn beta_step(problem: &MismatchProblem<f64>, s: &DVector<f64>, beta: &DVector<f64>) -> DVector<f64> {
    let support: Vec<usize> = (0..s.len()).filter(|&i| s[i] != 0.0).collect();
    let mut next = beta.clone();
    if support.is_empty() {
        return next;
    }
    let target = problem.y() - problem.a() * s;
    let cols = DMatrix::from_fn(problem.m(), support.len(), |r, c| {
        let i = support[c];
        problem.b()[(r, i)] * s[i]
    });
    let Ok(sol) = cols.svd(true, true).solve(&target, 1e-12) else {
        return next;
    };
    for (c, &i) in support.iter().enumerate() {
        let v = sol[c];
        next[i] = match problem.r() {
            Some(r) => v.clamp(-r, r),
            None => v,
        };
    }
    next
}

/// Alternates a LASSO step in `s` (dictionary `A + B·diag β` fixed) with a
/// least-squares step in `β` on the current support. Either step is only
/// accepted when it does not raise the objective, so the returned trace is
/// nonincreasing. Real problems only.
pub fn alt_min_baseline(problem: &MismatchProblem<f64>, lambda: f64, opts: &AltMinOptions) -> Result<AltMinResult> {
    if opts.outer_iters == 0 {
        return Err(Error::Parameter("outer_iters must be >= 1".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    let n = problem.n();
    let y = problem.y();
    let mut s = DVector::zeros(n);
    let mut beta = DVector::zeros(n);
    let mut f = mismatch_objective(problem, lambda, &s, &beta);
    let mut trace = vec![f];
    let mut iterations = 0;

    for _ in 0..opts.outer_iters {
        iterations += 1;
        let d = dictionary(problem, &beta);
        let l = estimate_spectral_norm(&StackedPhi::from_matrix(d.clone())?, opts.power_iters).max(f64::MIN_POSITIVE);
        let cfg = FistaConfig::new(l)?
            .with_max_iters(opts.inner_max_iters)
            .with_tol(opts.inner_tol)
            .with_recording(false);
        let run = lasso(&d, y, lambda, &cfg, s.clone())?;
        let f_s = lasso_objective(&d, y, lambda, &run.x);
        let f_prev = f;
        if f_s <= f {
            s = run.x;
            f = f_s;
        }

        let candidate = beta_step(problem, &s, &beta);
        let f_beta = mismatch_objective(problem, lambda, &s, &candidate);
        if f_beta <= f {
            beta = candidate;
            f = f_beta;
        }
        trace.push(f);
        if (f_prev - f).abs() <= opts.outer_tol * f_prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    Ok(AltMinResult {
        s_hat: s,
        beta_hat: beta,
        objective_trace: trace,
        iterations,
    })
}
