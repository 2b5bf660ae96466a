//! Joint-sparse programs: the group LASSO (JS) and its bounded, smoothed
//! variant (BJS) solved by continuation.

use nalgebra::DVector;

use super::fista::{fista, FistaConfig, SolveResult};
use crate::model::{build_phi, group_magnitudes, JointVector, MismatchProblem, Scalar};
use crate::prox::{moreau_envelope_raw, moreau_grad_in_place, project_cone_in_place, shrink_groups, ConeParams};
use crate::{Error, Result};

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be finite and > 0, got {lambda}")));
    }
    Ok(())
}

/// `½‖Φx − y‖² + λ‖x‖₂,₁`.
pub fn js_objective<T: Scalar>(problem: &MismatchProblem<T>, lambda: f64, x: &JointVector<T>) -> f64 {
    let phi = build_phi(problem);
    let r = phi.apply(x) - problem.y();
    0.5 * r.norm_squared() + lambda * group_magnitudes(x.entries()).sum()
}

/// Same value as [`js_objective`]; named for the bounded problem, where it is
/// only meaningful for feasible `x`.
pub fn bjs_objective(problem: &MismatchProblem<f64>, lambda: f64, x: &JointVector<f64>) -> f64 {
    js_objective(problem, lambda, x)
}

/// Solves `min ½‖Φx − y‖² + λ‖x‖₂,₁` from `x = 0`. `cfg.lipschitz` must
/// bound `‖Φ‖₂²`. Complex data uses `Φᴴ` in the gradient.
pub fn solve_js<T: Scalar>(problem: &MismatchProblem<T>, lambda: f64, cfg: &FistaConfig) -> Result<SolveResult<T>> {
    solve_js_from(problem, lambda, cfg, JointVector::zeros(problem.n()))
}

/// [`solve_js`] with an explicit starting point.
pub fn solve_js_from<T: Scalar>(
    problem: &MismatchProblem<T>,
    lambda: f64,
    cfg: &FistaConfig,
    x0: JointVector<T>,
) -> Result<SolveResult<T>> {
    check_lambda(lambda)?;
    if x0.n_groups() != problem.n() {
        return Err(Error::Dimension(format!(
            "start has {} groups, problem has {}",
            x0.n_groups(),
            problem.n()
        )));
    }
    let phi = build_phi(problem);
    let phi = phi.matrix();
    let y = problem.y();

    let run = fista(
        |z| phi.ad_mul(&(phi * z - y)),
        |mut v, step| {
            shrink_groups(&mut v, lambda * step);
            v
        },
        |x| 0.5 * (phi * x - y).norm_squared() + lambda * group_magnitudes(x).sum(),
        x0.into_entries(),
        cfg,
    )?;
    SolveResult::from_run(run)
}

/// Decreasing smoothing parameters `μ₁ ≥ … ≥ μ_f > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationSchedule {
    mus: Vec<f64>,
}

impl ContinuationSchedule {
    pub fn new(mus: Vec<f64>) -> Result<Self> {
        if mus.is_empty() {
            return Err(Error::Parameter("continuation schedule is empty".into()));
        }
        if mus.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::Parameter("smoothing parameters must be finite and > 0".into()));
        }
        if mus.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Parameter("smoothing parameters must be nonincreasing".into()));
        }
        Ok(ContinuationSchedule { mus })
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn final_mu(&self) -> f64 {
        *self.mus.last().expect("schedule is nonempty")
    }
}

/// Geometric sequence of `stages` values from `mu_start` down to `mu_final`.
pub fn continuation_schedule(mu_start: f64, mu_final: f64, stages: usize) -> Result<ContinuationSchedule> {
    if stages == 0 {
        return Err(Error::Parameter("need at least one continuation stage".into()));
    }
    if !(mu_final > 0.0) || !(mu_start >= mu_final) {
        return Err(Error::Parameter(format!(
            "need mu_start >= mu_final > 0, got {mu_start} and {mu_final}"
        )));
    }
    if stages == 1 {
        return ContinuationSchedule::new(vec![mu_final]);
    }
    let ratio = (mu_final / mu_start).ln();
    let mut mus: Vec<f64> = (0..stages)
        .map(|k| mu_start * (ratio * k as f64 / (stages - 1) as f64).exp())
        .collect();
    mus[0] = mu_start;
    mus[stages - 1] = mu_final;
    ContinuationSchedule::new(mus)
}

/// Final smoothing level `10⁻⁸ / λ`.
pub fn default_final_mu(lambda: f64) -> f64 {
    1e-8 / lambda
}

/// Solves the bounded joint-sparse program
/// `min ½‖Φx − y‖² + λ‖x‖₂,₁  s.t.  s ≥ 0, −r·s ≤ p ≤ r·s`
/// by running FISTA on the Moreau-smoothed objective for each `μ` of the
/// schedule, warm-starting every stage from the previous one.
///
/// `cfg.lipschitz` must bound `‖Φ‖₂²`; each stage uses `cfg.lipschitz + 1/μ`
/// and gets the full `cfg.max_iters` budget. The problem must be real-valued
/// and carry a mismatch bound.
pub fn solve_bjs<T: Scalar>(
    problem: &MismatchProblem<T>,
    lambda: f64,
    schedule: &ContinuationSchedule,
    cfg: &FistaConfig,
) -> Result<SolveResult<T>> {
    check_lambda(lambda)?;
    let real = problem.to_real()?;
    let r = real
        .r()
        .ok_or_else(|| Error::Parameter("bounded solve needs the mismatch bound r".into()))?;
    let cone = ConeParams::new(r)?;
    cfg.validate()?;

    let phi = build_phi(&real);
    let phi = phi.matrix();
    let y = real.y();

    let mut x = DVector::zeros(2 * real.n());
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for (stage, &mu) in schedule.mus().iter().enumerate() {
        let stage_cfg = cfg.with_lipschitz(cfg.lipschitz + 1.0 / mu);
        let run = fista(
            |z| {
                let mut g = z.clone();
                moreau_grad_in_place(&mut g, mu, lambda);
                g += phi.tr_mul(&(phi * z - y));
                g
            },
            |mut v, _| {
                project_cone_in_place(&mut v, &cone);
                v
            },
            |x| 0.5 * (phi * x - y).norm_squared() + moreau_envelope_raw(x, mu, lambda),
            x,
            &stage_cfg,
        )?;
        // Later stages restart from the previous solution; drop the repeated entry.
        let skip = usize::from(stage > 0 && !run.objective_trace.is_empty());
        trace.extend_from_slice(&run.objective_trace[skip..]);
        iterations += run.iterations;
        converged = run.converged;
        x = run.x;
    }

    Ok(SolveResult {
        x_hat: JointVector::new(x.map(T::from_real))?,
        objective_trace: trace,
        iterations,
        converged,
    })
}
