use nalgebra::{DMatrix, DVector};

use super::Grid;
use crate::model::Scalar;
use crate::{Error, Result};

/// Central-difference step used to validate derivatives.
pub const FD_STEP: f64 = 1e-6;
/// Largest accepted relative gap between analytic and numeric derivatives.
pub const FD_TOLERANCE: f64 = 1e-4;

/// Relative gap between `deriv(θ)` and the central difference of `steering`
/// at `θ`.
pub fn fd_relative_error<T: Scalar>(
    steering: impl Fn(f64) -> DVector<T>,
    deriv: impl Fn(f64) -> DVector<T>,
    theta: f64,
) -> f64 {
    let h = FD_STEP;
    let fd = (steering(theta + h) - steering(theta - h)).unscale(2.0 * h);
    let b = deriv(theta);
    let scale = b.norm().max(fd.norm()).max(1e-12 * steering(theta).norm());
    if scale == 0.0 {
        return 0.0;
    }
    (b - fd).norm() / scale
}

/// First-order Taylor model on a grid: column `n` of `A` is
/// `steering(θₙ)` and column `n` of `B` is `deriv(θₙ)`, so that
/// `steering(θₙ + βₙ) ≈ aₙ + βₙ·bₙ`. Every derivative column is checked
/// against finite differences.
pub fn taylor_model<T: Scalar>(
    steering: impl Fn(f64) -> DVector<T>,
    deriv: impl Fn(f64) -> DVector<T>,
    grid: &Grid,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = grid.len();
    let first = steering(grid.points()[0]);
    let m = first.len();
    let mut a = DMatrix::zeros(m, n);
    let mut b = DMatrix::zeros(m, n);
    for (i, &theta) in grid.points().iter().enumerate() {
        let col = steering(theta);
        let d = deriv(theta);
        if col.len() != m || d.len() != m {
            return Err(Error::Dimension(format!("column {i} has inconsistent length")));
        }
        let err = fd_relative_error(&steering, &deriv, theta);
        if !(err <= FD_TOLERANCE) {
            return Err(Error::Model(format!(
                "derivative at grid point {i} (θ = {theta}) disagrees with finite differences: relative error {err:.3e}"
            )));
        }
        a.set_column(i, &col);
        b.set_column(i, &d);
    }
    Ok((a, b))
}
