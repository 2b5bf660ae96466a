//! Solvers: the FISTA engine, the joint-sparse programs built on it, the
//! comparison baselines and the exhaustive sparsity oracle.

mod baselines;
mod fista;
mod joint;
mod oracle;
mod spectral;

pub use baselines::{alt_min_baseline, lasso_on_grid, mismatch_objective, AltMinOptions, AltMinResult};
pub use fista::{fista, next_momentum, FistaConfig, FistaRun, SolveResult, DEFAULT_MAX_ITERS, DEFAULT_TOL};
pub use joint::{
    bjs_objective, continuation_schedule, default_final_mu, js_objective, solve_bjs, solve_js, solve_js_from, ContinuationSchedule,
};
pub use oracle::l01_oracle;
pub use spectral::{estimate_spectral_norm, power_iteration_norm_sq, SPECTRAL_SAFETY};

/// `scale · σₙ · √(2 ln N)`, the regularization rule used by every experiment.
pub fn lambda_rule(scale: f64, sigma_n: f64, n: usize) -> f64 {
    scale * sigma_n * (2.0 * (n as f64).ln()).sqrt()
}
