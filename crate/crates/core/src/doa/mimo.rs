use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{taylor_model, DoaScene};
use crate::model::MismatchProblem;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct MimoConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Radius of the disk holding all antennas, in meters.
    pub placement_radius: f64,
    /// Carrier frequency in Hz.
    pub carrier: f64,
    /// Propagation speed in m/s.
    pub speed: f64,
    /// Samples `L` taken by each receiver.
    pub snapshots: usize,
    /// Dimension `M` each receiver compresses to.
    pub compressed_dim: usize,
    /// Waveform power over receiver noise power, in dB.
    pub snr_db: f64,
    pub seed: u64,
}

impl MimoConfig {
    /// 30 transmitters and 10 receivers in a 5 m disk at 1 GHz, 50 samples
    /// compressed to 10.
    pub fn standard(snr_db: f64, seed: u64) -> Self {
        MimoConfig {
            n_tx: 30,
            n_rx: 10,
            placement_radius: 5.0,
            carrier: 1e9,
            speed: 3e8,
            snapshots: 50,
            compressed_dim: 10,
            snr_db,
            seed,
        }
    }

    pub fn noise_power(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(Error::Parameter("need at least one transmitter and one receiver".into()));
        }
        if !(self.placement_radius > 0.0) || !(self.carrier > 0.0) || !(self.speed > 0.0) {
            return Err(Error::Parameter("radius, carrier and speed must be positive".into()));
        }
        if self.compressed_dim == 0 || self.compressed_dim > self.snapshots {
            return Err(Error::Parameter(format!(
                "compressed dimension {} must be in 1..={}",
                self.compressed_dim, self.snapshots
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::Parameter("SNR must be finite".into()));
        }
        Ok(())
    }
}

/// One draw of antenna positions, QPSK waveforms and compression matrices.
/// Angles are in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoRadar {
    wavenumber: f64,
    /// `(dᵢ, φᵢ)` polar positions, angle in radians.
    tx: Vec<(f64, f64)>,
    rx: Vec<(f64, f64)>,
    /// `L × M_T` waveform matrix.
    waveform: DMatrix<C64>,
    /// `M × L` compression per receiver, orthonormal rows.
    compression: Vec<DMatrix<f64>>,
    /// `Φⱼ X` per receiver.
    projected: Vec<DMatrix<C64>>,
}

fn disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> (f64, f64) {
    let d = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    (d, phi)
}

fn qpsk<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = if rng.random::<bool>() { h } else { -h };
    let im = if rng.random::<bool>() { h } else { -h };
    C64::new(re, im)
}

fn orthonormal_rows<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(cols, rows, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q().transpose()
}

impl MimoRadar {
    /// Deterministic draw from `cfg.seed`.
    pub fn new(cfg: &MimoConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let tx = (0..cfg.n_tx).map(|_| disk_point(&mut rng, cfg.placement_radius)).collect();
        let rx = (0..cfg.n_rx).map(|_| disk_point(&mut rng, cfg.placement_radius)).collect();
        let waveform = DMatrix::from_fn(cfg.snapshots, cfg.n_tx, |_, _| qpsk(&mut rng));
        let compression: Vec<DMatrix<f64>> = (0..cfg.n_rx)
            .map(|_| orthonormal_rows(&mut rng, cfg.compressed_dim, cfg.snapshots))
            .collect();
        let projected = compression.iter().map(|c| c.map(|v| C64::new(v, 0.0)) * &waveform).collect();
        Ok(MimoRadar {
            wavenumber: 2.0 * PI * cfg.carrier / cfg.speed,
            tx,
            rx,
            waveform,
            compression,
            projected,
        })
    }

    pub fn compression(&self) -> &[DMatrix<f64>] {
        &self.compression
    }

    pub fn waveform(&self) -> &DMatrix<C64> {
        &self.waveform
    }

    fn phase(&self, (d, phi): (f64, f64), theta: f64) -> (C64, f64) {
        let t = theta.to_radians();
        let gamma = d * (phi - t).cos();
        let dgamma = d * (phi - t).sin() * PI / 180.0;
        (C64::from_polar(1.0, self.wavenumber * gamma), self.wavenumber * dgamma)
    }

    /// Transmit steering `uᵢ = exp(jk·dᵢ cos(φᵢ − θ))` and its θ-derivative.
    fn transmit(&self, theta: f64) -> (DVector<C64>, DVector<C64>) {
        let mut u = DVector::zeros(self.tx.len());
        let mut du = DVector::zeros(self.tx.len());
        for (i, &pos) in self.tx.iter().enumerate() {
            let (e, k_dgamma) = self.phase(pos, theta);
            u[i] = e;
            du[i] = e * C64::new(0.0, k_dgamma);
        }
        (u, du)
    }

    /// Compressed response of a unit target at angle `θ`: receiver blocks
    /// `exp(jk·γⱼ) Φⱼ X u(θ)` stacked.
    pub fn column(&self, theta: f64) -> DVector<C64> {
        let (u, _) = self.transmit(theta);
        let m = self.projected[0].nrows();
        let mut out = DVector::zeros(m * self.rx.len());
        for (j, &pos) in self.rx.iter().enumerate() {
            let (e, _) = self.phase(pos, theta);
            out.rows_mut(j * m, m).copy_from(&((&self.projected[j] * &u) * e));
        }
        out
    }

    /// θ-derivative of [`column`](Self::column), per degree.
    pub fn derivative(&self, theta: f64) -> DVector<C64> {
        let (u, du) = self.transmit(theta);
        let m = self.projected[0].nrows();
        let mut out = DVector::zeros(m * self.rx.len());
        for (j, &pos) in self.rx.iter().enumerate() {
            let (e, k_dgamma) = self.phase(pos, theta);
            let pu = &self.projected[j] * &u;
            let pdu = &self.projected[j] * &du;
            let block = (pu * C64::new(0.0, k_dgamma) + pdu) * e;
            out.rows_mut(j * m, m).copy_from(&block);
        }
        out
    }

    /// Receiver noise after compression: each receiver's `L` samples of
    /// circular Gaussian noise mapped through `Φⱼ`.
    pub fn compressed_noise<R: Rng + ?Sized>(&self, rng: &mut R, noise_power: f64) -> DVector<C64> {
        let m = self.compression[0].nrows();
        let l = self.compression[0].ncols();
        let mut out = DVector::zeros(m * self.rx.len());
        for (j, c) in self.compression.iter().enumerate() {
            let e = receiver_noise(rng, l, noise_power);
            let c = c.map(|v| C64::new(v, 0.0));
            out.rows_mut(j * m, m).copy_from(&(c * e));
        }
        out
    }
}

/// `len` samples of circular complex Gaussian noise with the given power.
pub fn receiver_noise<R: Rng + ?Sized>(rng: &mut R, len: usize, noise_power: f64) -> DVector<C64> {
    let s = (noise_power / 2.0).sqrt();
    DVector::from_fn(len, |_, _| {
        C64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
    })
}

/// Off-grid compressive MIMO radar model. Scene angles are in degrees and
/// amplitudes are complex reflectivities with the common range phase folded
/// in. The measurement uses the exact response at each true angle; `A` and
/// `B` hold the response and its derivative at the grid points.
pub fn mimo_model(cfg: &MimoConfig, scene: &DoaScene<C64>) -> Result<MismatchProblem<C64>> {
    if scene.is_empty() {
        return Err(Error::Parameter("scene has no targets".into()));
    }
    let radar = MimoRadar::new(cfg)?;
    let (a, b) = taylor_model(|t| radar.column(t), |t| radar.derivative(t), &scene.grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let noise_power = cfg.noise_power();
    let mut y = radar.compressed_noise(&mut rng, noise_power);
    for (&theta, &s) in scene.true_doas.iter().zip(&scene.amplitudes) {
        y.axpy(s, &radar.column(theta), C64::new(1.0, 0.0));
    }
    MismatchProblem::new(a, b, y)?
        .with_noise(noise_power.sqrt())?
        .with_bound(scene.grid.r())
}
