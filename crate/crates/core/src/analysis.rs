//! Recovery-guarantee tooling: joint restricted isometry constants, the
//! error bound for the group LASSO, mismatch recovery and error metrics.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{joint_norms, JointVector, MismatchProblem, Scalar, StackedPhi};
use crate::{Error, Result};

/// Largest `σ` for which the error bound holds.
pub const SIGMA_LIMIT: f64 = 0.1907;
/// Exhaustive enumeration is used up to this many supports.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
/// Supports drawn when enumeration would exceed [`EXHAUSTIVE_LIMIT`].
pub const SAMPLED_SUPPORTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct JripEstimate {
    pub k: usize,
    pub sigma: f64,
    pub supports_checked: u128,
    /// `false` when supports were sampled, making `sigma` a lower bound.
    pub exhaustive: bool,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Worst isometry defect `max(1 − λ_min, λ_max − 1)` of the Gram matrix of
/// the columns `{aᵢ, bᵢ : i ∈ support}`.
pub fn support_defect<T: Scalar>(phi: &StackedPhi<T>, support: &[usize]) -> f64 {
    let n = phi.n_groups();
    let m = phi.matrix();
    let cols: Vec<usize> = support.iter().copied().chain(support.iter().map(|&i| n + i)).collect();
    let sub = DMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])]);
    let gram = sub.ad_mul(&sub);
    let eig = gram.symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (1.0 - lo).max(hi - 1.0).max(0.0)
}

/// J-RIP constant `σ_K` of `Φ`: the worst isometry defect over all joint
/// supports of size `K`. Falls back to [`SAMPLED_SUPPORTS`] seeded random
/// supports when there are more than [`EXHAUSTIVE_LIMIT`].
pub fn jrip_constant<T: Scalar>(phi: &StackedPhi<T>, k: usize) -> Result<JripEstimate> {
    let n = phi.n_groups();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= K <= N = {n}, got {k}")));
    }
    let total = binomial(n, k);
    if total <= EXHAUSTIVE_LIMIT {
        let sigma = (0..n).combinations(k).map(|s| support_defect(phi, &s)).fold(0.0, f64::max);
        return Ok(JripEstimate {
            k,
            sigma,
            supports_checked: total,
            exhaustive: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e1f);
    let sigma = (0..SAMPLED_SUPPORTS)
        .map(|_| {
            let mut s = sample(&mut rng, n, k).into_vec();
            s.sort_unstable();
            support_defect(phi, &s)
        })
        .fold(0.0, f64::max);
    Ok(JripEstimate {
        k,
        sigma,
        supports_checked: SAMPLED_SUPPORTS as u128,
        exhaustive: false,
    })
}

/// `(C0, C1)` of the group LASSO error bound for a given `σ_2K`.
pub fn bound_constants(sigma_2k: f64) -> Result<(f64, f64)> {
    if !(sigma_2k >= 0.0) || sigma_2k >= SIGMA_LIMIT {
        return Err(Error::GuaranteeVoid { sigma: sigma_2k });
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let denom = 1.0 - (1.0 + 3.0 * sqrt2) * sigma_2k;
    let c0 = 6.0 * sqrt2 / denom;
    let c1 = 4.0 * ((sqrt2 - 1.0) * sigma_2k + 1.0) / denom;
    Ok((c0, c1))
}

/// `C0·√K·λ + C1·tail/√K`, where `tail = ‖x − (x)_K‖₂,₁`.
pub fn theorem2_bound(k: usize, lambda: f64, sigma_2k: f64, tail_l21: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Parameter("K must be >= 1".into()));
    }
    let (c0, c1) = bound_constants(sigma_2k)?;
    let sk = (k as f64).sqrt();
    Ok(c0 * sk * lambda + c1 * tail_l21 / sk)
}

/// `‖x − (x)_K‖₂,₁`: the mixed norm left after keeping the `K` largest groups.
pub fn joint_tail<T: Scalar>(x: &JointVector<T>, k: usize) -> f64 {
    let mut mags: Vec<f64> = x.group_magnitudes().iter().copied().collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags.iter().skip(k).sum()
}

/// Whether `‖Φᴴw‖∞,₁ ≤ λ/2`.
pub fn lambda_condition<T: Scalar>(phi: &StackedPhi<T>, w: &DVector<T>, lambda: f64) -> Result<bool> {
    if w.len() != phi.matrix().nrows() {
        return Err(Error::Dimension(format!("w has length {}, Φ has {} rows", w.len(), phi.matrix().nrows())));
    }
    let corr = JointVector::new(phi.adjoint_apply(w))?;
    Ok(joint_norms(&corr).linf1 <= lambda / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMode {
    /// `β̂ᵢ = p̂ᵢ / ŝᵢ`.
    Ratio,
    /// Keep `ŝ` and fit `β` on its support by least squares.
    Refit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    /// Zero outside the detected support.
    pub beta: DVector<f64>,
    pub support: Vec<usize>,
    /// Set when nothing was detected and `beta` is all zeros.
    pub empty_support: bool,
}

/// Recovers the mismatch `β` from a joint solution, on the detected support
/// only. Ratio mode takes the real part of `p̂ᵢ/ŝᵢ`; refit mode needs a real
/// problem. Both clip to `[−r, r]` when the problem carries a bound.
pub fn recover_beta<T: Scalar>(x_hat: &JointVector<T>, problem: &MismatchProblem<T>, mode: BetaMode) -> Result<BetaEstimate> {
    let n = problem.n();
    if x_hat.n_groups() != n {
        return Err(Error::Dimension(format!("x has {} groups, problem has {n}", x_hat.n_groups())));
    }
    let support: Vec<usize> = x_hat.support().into_iter().filter(|&i| x_hat.group(i).0.modulus() > 0.0).collect();
    let mut beta = DVector::zeros(n);
    if support.is_empty() {
        return Ok(BetaEstimate {
            beta,
            support,
            empty_support: true,
        });
    }
    let clip = |v: f64| match problem.r() {
        Some(r) => v.clamp(-r, r),
        None => v,
    };
    match mode {
        BetaMode::Ratio => {
            for &i in &support {
                let (s, p) = x_hat.group(i);
                beta[i] = clip((p / s).real());
            }
        }
        BetaMode::Refit => {
            let real = problem.to_real()?;
            let s: DVector<f64> = x_hat.s().map(|v| v.real());
            let target = real.y() - real.a() * &s;
            let cols = DMatrix::from_fn(real.m(), support.len(), |r, c| {
                let i = support[c];
                real.b()[(r, i)] * s[i]
            });
            let sol = cols
                .svd(true, true)
                .solve(&target, 1e-12)
                .map_err(|e| Error::Model(e.to_string()))?;
            for (c, &i) in support.iter().enumerate() {
                beta[i] = clip(sol[c]);
            }
        }
    }
    Ok(BetaEstimate {
        beta,
        support,
        empty_support: false,
    })
}

/// `‖ŝ − s‖₂ / ‖s‖₂`.
pub fn reconstruction_error<T: Scalar>(s_hat: &DVector<T>, s_true: &DVector<T>) -> Result<f64> {
    if s_hat.len() != s_true.len() {
        return Err(Error::Dimension(format!("lengths {} and {}", s_hat.len(), s_true.len())));
    }
    let denom = s_true.norm();
    if denom == 0.0 {
        return Err(Error::UndefinedMetric("reconstruction error of a zero signal".into()));
    }
    Ok((s_hat - s_true).norm() / denom)
}
