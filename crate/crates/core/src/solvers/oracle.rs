//! Exhaustive minimum-joint-support search.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::model::{JointVector, Scalar, StackedPhi};
use crate::{Error, Result};

const MAX_GROUPS: usize = 16;
const MAX_SPARSITY: usize = 3;

/// Finds the sparsest joint vector with `Φx = y`: tries every support of
/// size `0, 1, …, k_max` in order, fits the `2|S|` selected columns by least
/// squares, and returns the first fit whose residual is below
/// `1e-8·max(1, ‖y‖)`.
pub fn l01_oracle<T: Scalar>(phi: &StackedPhi<T>, y: &DVector<T>, k_max: usize) -> Result<JointVector<T>> {
    let n = phi.n_groups();
    let m = phi.matrix();
    if y.len() != m.nrows() {
        return Err(Error::Dimension(format!("y has length {}, Φ has {} rows", y.len(), m.nrows())));
    }
    if n > MAX_GROUPS || k_max > MAX_SPARSITY {
        return Err(Error::Parameter(format!(
            "exhaustive search limited to N <= {MAX_GROUPS} and K <= {MAX_SPARSITY}, got N = {n}, K = {k_max}"
        )));
    }
    let tol = 1e-8 * y.norm().max(1.0);
    if y.norm() <= tol {
        return Ok(JointVector::zeros(n));
    }

    for k in 1..=k_max.min(n) {
        let mut best: Option<(f64, Vec<usize>, DVector<T>)> = None;
        for support in (0..n).combinations(k) {
            let cols: Vec<usize> = support.iter().copied().chain(support.iter().map(|&i| n + i)).collect();
            let sub = DMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])]);
            let Ok(coef) = sub.clone().svd(true, true).solve(y, 1e-12) else {
                continue;
            };
            let res = (&sub * &coef - y).norm();
            if res < tol && best.as_ref().is_none_or(|b| res < b.0) {
                best = Some((res, cols, coef));
            }
        }
        if let Some((_, cols, coef)) = best {
            let mut x = DVector::zeros(2 * n);
            for (c, &j) in cols.iter().enumerate() {
                x[j] = coef[c];
            }
            return JointVector::new(x);
        }
    }
    Err(Error::Infeasible { k_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn instance(seed: u64) -> (StackedPhi<f64>, JointVector<f64>, usize, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (6, 4);
        let phi = DMatrix::from_fn(m, 2 * n, |_, _| rng.sample::<f64, _>(StandardNormal) / (m as f64).sqrt());
        let i = rng.random_range(0..n);
        let s_i: f64 = 1.0 + rng.random::<f64>();
        let beta_i: f64 = rng.sample(StandardNormal);
        let mut x = DVector::zeros(2 * n);
        x[i] = s_i;
        x[n + i] = beta_i * s_i;
        (StackedPhi::from_matrix(phi).unwrap(), JointVector::new(x).unwrap(), i, beta_i)
    }

    #[test]
    fn zero_measurement_gives_zero() {
        let (phi, _, _, _) = instance(1);
        let x = l01_oracle(&phi, &DVector::zeros(6), 2).unwrap();
        assert_eq!(x.entries().norm(), 0.0);
    }

    #[test]
    fn exact_recovery_of_one_sparse_vector() {
        for seed in 0..20 {
            let (phi, x, i, beta) = instance(seed);
            let y = phi.apply(&x);
            let got = l01_oracle(&phi, &y, 2).unwrap();
            assert!((got.entries() - x.entries()).norm() < 1e-8, "seed {seed}");
            let (s, p) = got.group(i);
            assert!((p / s - beta).abs() < 1e-8);
        }
    }

    #[test]
    fn infeasible_when_budget_too_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = StackedPhi::from_matrix(DMatrix::from_fn(8, 8, |_, _| rng.sample::<f64, _>(StandardNormal))).unwrap();
        let y = DVector::from_fn(8, |_, _| rng.sample::<f64, _>(StandardNormal));
        assert_eq!(l01_oracle(&phi, &y, 1), Err(Error::Infeasible { k_max: 1 }));
    }

    #[test]
    fn guards() {
        let phi = StackedPhi::from_matrix(DMatrix::<f64>::zeros(3, 34)).unwrap();
        assert!(matches!(l01_oracle(&phi, &DVector::zeros(3), 1), Err(Error::Parameter(_))));
        let phi = StackedPhi::from_matrix(DMatrix::<f64>::zeros(3, 8)).unwrap();
        assert!(matches!(l01_oracle(&phi, &DVector::zeros(3), 4), Err(Error::Parameter(_))));
        assert!(matches!(l01_oracle(&phi, &DVector::zeros(2), 1), Err(Error::Dimension(_))));
    }
}
