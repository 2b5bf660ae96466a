use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Scalar, StackedPhi};

/// Multiplier applied to the power-iteration estimate so it can serve as an
/// upper bound.
pub const SPECTRAL_SAFETY: f64 = 1.01;

/// Power iteration on `MᴴM`; returns the estimate of `‖M‖₂²` without any
/// safety factor. Stops early once the Rayleigh quotient settles.
pub fn power_iteration_norm_sq<T: Scalar>(m: &DMatrix<T>, iters: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: DVector<T> = DVector::from_fn(n, |_, _| T::from_real(rng.random_range(0.5..1.5)));
    v.unscale_mut(v.norm());

    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let w = m.ad_mul(&(m * &v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        // Rayleigh quotient vᴴ MᴴM v with ‖v‖ = 1.
        let next = v.dotc(&w).real();
        v = w.unscale(norm);
        if (next - estimate).abs() <= 1e-13 * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate
}

/// Upper-bound estimate of `‖Φ‖₂²` (power iteration times [`SPECTRAL_SAFETY`]).
pub fn estimate_spectral_norm<T: Scalar>(phi: &StackedPhi<T>, iters: usize) -> f64 {
    power_iteration_norm_sq(phi.matrix(), iters) * SPECTRAL_SAFETY
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn identity_gives_safety_factor() {
        let phi = StackedPhi::from_matrix(DMatrix::<f64>::identity(4, 4)).unwrap();
        assert!((estimate_spectral_norm(&phi, 100) - 1.01).abs() < 1e-12);
    }

    #[test]
    fn diagonal_three() {
        let phi = StackedPhi::from_matrix(DMatrix::<f64>::identity(2, 2) * 3.0).unwrap();
        assert!((estimate_spectral_norm(&phi, 100) - 9.0 * 1.01).abs() < 1e-10);
    }

    #[test]
    fn matches_svd_on_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = DMatrix::from_fn(20, 40, |_, _| rng.random_range(-1.0..1.0));
        let sigma: f64 = m.singular_values().max();
        let est = power_iteration_norm_sq(&m, 2000);
        assert!((est - sigma * sigma).abs() / (sigma * sigma) < 5e-3);
    }

    #[test]
    fn complex_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = DMatrix::from_fn(10, 6, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let sigma = m.clone().singular_values().max();
        let est = power_iteration_norm_sq(&m, 2000);
        assert!((est - sigma * sigma).abs() / (sigma * sigma) < 1e-6);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(power_iteration_norm_sq(&DMatrix::<f64>::zeros(3, 3), 10), 0.0);
    }
}
