use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{taylor_model, DoaScene};
use crate::model::{realify, MismatchProblem};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct NestedArrayConfig {
    /// Sensor positions in units of half a wavelength.
    pub sensor_positions: Vec<u32>,
    pub snapshots: usize,
    /// Noise power `σₙ²` per sensor.
    pub noise_power: f64,
    pub seed: u64,
}

impl NestedArrayConfig {
    /// Two-level nested array: sensors at `1, …, n1` and `(n1 + 1)·j` for
    /// `j = 1, …, n2`.
    pub fn two_level(n1: u32, n2: u32, snapshots: usize, noise_power: f64, seed: u64) -> Self {
        let positions = (1..=n1).chain((1..=n2).map(|j| (n1 + 1) * j)).collect();
        NestedArrayConfig {
            sensor_positions: positions,
            snapshots,
            noise_power,
            seed,
        }
    }
}

/// Linear array whose response is written in `u = sin θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedArray {
    positions: Vec<f64>,
}

impl NestedArray {
    pub fn new(positions: &[u32]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Parameter("array needs at least one sensor".into()));
        }
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        if sorted[0] == 0 || sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("sensor positions must be distinct and positive".into()));
        }
        Ok(NestedArray {
            positions: positions.iter().map(|&p| p as f64).collect(),
        })
    }

    pub fn n_sensors(&self) -> usize {
        self.positions.len()
    }

    /// `φ(u)ₗ = exp(jπ dₗ u)`.
    pub fn steering(&self, u: f64) -> DVector<C64> {
        DVector::from_iterator(
            self.positions.len(),
            self.positions.iter().map(|&d| C64::from_polar(1.0, std::f64::consts::PI * d * u)),
        )
    }

    /// `vec(φ(u)φ(u)ᴴ) = φ* ⊗ φ`; entry `m·L + l` is `φₗ φₘ*`.
    pub fn column(&self, u: f64) -> DVector<C64> {
        let l = self.positions.len();
        DVector::from_fn(l * l, |k, _| {
            let (row, col) = (k % l, k / l);
            C64::from_polar(1.0, std::f64::consts::PI * (self.positions[row] - self.positions[col]) * u)
        })
    }

    /// Derivative of [`column`](Self::column) with respect to `u`.
    pub fn derivative(&self, u: f64) -> DVector<C64> {
        let l = self.positions.len();
        let mut col = self.column(u);
        for (k, v) in col.iter_mut().enumerate() {
            let (row, c) = (k % l, k / l);
            *v *= C64::new(0.0, std::f64::consts::PI * (self.positions[row] - self.positions[c]));
        }
        col
    }

    /// `R = Σ σₚ² φ(τₚ)φ(τₚ)ᴴ + σₙ² I`.
    pub fn exact_covariance(&self, doas: &[f64], powers: &[f64], noise_power: f64) -> DMatrix<C64> {
        let l = self.n_sensors();
        let mut r = DMatrix::from_diagonal_element(l, l, C64::new(noise_power, 0.0));
        for (&u, &p) in doas.iter().zip(powers) {
            let phi = self.steering(u);
            r += &phi * phi.adjoint() * C64::new(p, 0.0);
        }
        r
    }

    /// Sample covariance of `snapshots` draws of `x = Σ √σₚ² αₚ φ(τₚ) + e`
    /// with unit-power circular Gaussian `αₚ` and noise of power `σₙ²`.
    pub fn sample_covariance<R: Rng + ?Sized>(
        &self,
        doas: &[f64],
        powers: &[f64],
        noise_power: f64,
        snapshots: usize,
        rng: &mut R,
    ) -> DMatrix<C64> {
        let l = self.n_sensors();
        let steer: Vec<DVector<C64>> = doas.iter().map(|&u| self.steering(u)).collect();
        let mut cn = |power: f64| {
            let s = (power / 2.0).sqrt();
            C64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
        };
        let mut x = DMatrix::zeros(l, snapshots);
        for t in 0..snapshots {
            let mut col = x.column_mut(t);
            for (phi, &p) in steer.iter().zip(powers) {
                let alpha = cn(p);
                col.axpy(alpha, phi, C64::new(1.0, 0.0));
            }
            for v in col.iter_mut() {
                *v += cn(noise_power);
            }
        }
        let mut r = &x * x.adjoint();
        r.unscale_mut(snapshots as f64);
        r
    }
}

/// Off-grid covariance model of a nested array. Simulates the sample
/// covariance for the scene, subtracts the known noise floor `σₙ² vec(I)`,
/// and returns the real-stacked system whose `A` and `B` hold the
/// covariance columns and their derivatives at the grid points. Scene DOAs
/// are in `sin θ` and amplitudes are source powers.
pub fn nested_array_model(cfg: &NestedArrayConfig, scene: &DoaScene<f64>) -> Result<MismatchProblem<f64>> {
    if cfg.snapshots < 1 {
        return Err(Error::Parameter("need at least one snapshot".into()));
    }
    if !(cfg.noise_power >= 0.0) {
        return Err(Error::Parameter(format!("noise power must be >= 0, got {}", cfg.noise_power)));
    }
    if scene.amplitudes.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Parameter("source powers must be positive".into()));
    }
    let array = NestedArray::new(&cfg.sensor_positions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut r = array.sample_covariance(&scene.true_doas, &scene.amplitudes, cfg.noise_power, cfg.snapshots, &mut rng);
    for i in 0..array.n_sensors() {
        r[(i, i)] -= C64::new(cfg.noise_power, 0.0);
    }
    let y = DVector::from_column_slice(r.as_slice());
    let (a, b) = taylor_model(|u| array.column(u), |u| array.derivative(u), &scene.grid)?;
    realify(&a, &b, &y)?.with_noise(cfg.noise_power.sqrt())?.with_bound(scene.grid.r())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doa::{fd_relative_error, make_grid, FD_TOLERANCE};
    use crate::model::{build_phi, JointVector};

    fn small() -> NestedArray {
        NestedArray::new(&NestedArrayConfig::two_level(5, 6, 1, 0.0, 0).sensor_positions).unwrap()
    }

    #[test]
    fn positions_of_standard_arrays() {
        let c = NestedArrayConfig::two_level(5, 6, 1000, 1.0, 0);
        assert_eq!(c.sensor_positions, vec![1, 2, 3, 4, 5, 6, 12, 18, 24, 30, 36]);
        let c = NestedArrayConfig::two_level(10, 12, 500, 0.1, 0);
        assert_eq!(c.sensor_positions.len(), 22);
        assert_eq!(*c.sensor_positions.last().unwrap(), 132);
        assert!(NestedArray::new(&[1, 1]).is_err());
        assert!(NestedArray::new(&[0, 1]).is_err());
    }

    #[test]
    fn column_is_vectorized_outer_product() {
        let arr = small();
        let u = 0.37;
        let phi = arr.steering(u);
        let outer = &phi * phi.adjoint();
        let col = arr.column(u);
        assert_eq!(col.len(), 121);
        for (k, v) in outer.as_slice().iter().enumerate() {
            assert!((v - col[k]).norm() < 1e-13);
        }
        let kron = phi.map(|v| v.conj()).kronecker(&phi);
        assert!((kron - col).norm() < 1e-12);
    }

    #[test]
    fn derivative_passes_fd_check() {
        let arr = small();
        for i in 0..20 {
            let u = -0.95 + 0.1 * i as f64;
            assert!(fd_relative_error(|u| arr.column(u), |u| arr.derivative(u), u) < FD_TOLERANCE);
        }
    }

    #[test]
    fn exact_covariance_fits_on_grid_scene() {
        let arr = small();
        let grid = make_grid(-1.0, 1.0, 0.01).unwrap();
        let idx = [30usize, 95, 160];
        let powers = [1.0, 2.0, 0.5];
        let doas: Vec<f64> = idx.iter().map(|&i| grid.points()[i]).collect();
        let noise = 0.3;
        let r = arr.exact_covariance(&doas, &powers, noise);
        let (a, _) = taylor_model(|u| arr.column(u), |u| arr.derivative(u), &grid).unwrap();
        let mut s = DVector::zeros(grid.len());
        for (&i, &p) in idx.iter().zip(&powers) {
            s[i] = C64::new(p, 0.0);
        }
        let mut resid = DVector::from_column_slice(r.as_slice()) - &a * s;
        for i in 0..arr.n_sensors() {
            resid[i * arr.n_sensors() + i] -= C64::new(noise, 0.0);
        }
        assert!(resid.norm() < 1e-10);
    }

    #[test]
    fn sample_covariance_is_hermitian_psd_and_consistent() {
        let arr = small();
        let doas = [-0.4, 0.1, 0.55];
        let powers = [1.0, 1.0, 1.0];
        let exact = arr.exact_covariance(&doas, &powers, 0.5);
        let mut errs = Vec::new();
        for &t in &[1000usize, 4000] {
            let mut acc = 0.0;
            for seed in 0..8 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let r = arr.sample_covariance(&doas, &powers, 0.5, t, &mut rng);
                assert!((&r - r.adjoint()).norm() < 1e-12);
                let eig = (&r + r.adjoint()).scale(0.5).symmetric_eigenvalues();
                assert!(eig.min() > -1e-10);
                acc += (&r - &exact).norm();
            }
            errs.push(acc / 8.0);
        }
        assert!(errs[1] <= errs[0] / 2.0 * 1.5, "{errs:?}");
    }

    #[test]
    fn model_dimensions_and_noise_floor() {
        let grid = make_grid(-1.0, 1.0, 0.01).unwrap();
        let scene = DoaScene::new(grid, vec![-0.3, 0.42], vec![1.0, 1.0]).unwrap();
        let cfg = NestedArrayConfig::two_level(5, 6, 200, 0.1, 7);
        let p = nested_array_model(&cfg, &scene).unwrap();
        assert_eq!(p.m(), 242);
        assert_eq!(p.n(), 201);
        assert_eq!(p.r(), Some(0.005));
        assert!((p.sigma_n() - 0.1f64.sqrt()).abs() < 1e-15);
        let again = nested_array_model(&cfg, &scene).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn infinite_snapshot_limit_fits_taylor_model() {
        // With many snapshots and an off-grid source, the first-order model
        // with the true (s, β) explains most of the measurement.
        let grid = make_grid(-1.0, 1.0, 0.01).unwrap();
        let u = grid.points()[120] + 0.002;
        let scene = DoaScene::new(grid.clone(), vec![u], vec![1.0]).unwrap();
        let cfg = NestedArrayConfig::two_level(5, 6, 20_000, 0.01, 3);
        let p = nested_array_model(&cfg, &scene).unwrap();
        let mut x = DVector::zeros(2 * grid.len());
        x[120] = 1.0;
        x[grid.len() + 120] = 0.002;
        let resid = build_phi(&p).apply(&JointVector::new(x).unwrap()) - p.y();
        assert!(resid.norm() < 0.1 * p.y().norm());
    }

    #[test]
    fn rejects_bad_inputs() {
        let grid = make_grid(-1.0, 1.0, 0.01).unwrap();
        let scene = DoaScene::new(grid.clone(), vec![0.1], vec![1.0]).unwrap();
        let cfg = NestedArrayConfig::two_level(5, 6, 0, 0.1, 0);
        assert!(nested_array_model(&cfg, &scene).is_err());
        let neg = DoaScene::new(grid, vec![0.1], vec![-1.0]).unwrap();
        assert!(nested_array_model(&NestedArrayConfig::two_level(5, 6, 10, 0.1, 0), &neg).is_err());
    }
}
