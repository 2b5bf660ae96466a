use rand::Rng;

use super::Grid;
use crate::model::Scalar;
use crate::{Error, Result};

/// Ground truth for one DOA trial.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaScene<T: Scalar> {
    pub grid: Grid,
    pub true_doas: Vec<f64>,
    pub amplitudes: Vec<T>,
}

impl<T: Scalar> DoaScene<T> {
    /// Checks that every DOA lies on the grid range and that targets are
    /// more than `2r` apart.
    pub fn new(grid: Grid, true_doas: Vec<f64>, amplitudes: Vec<T>) -> Result<Self> {
        if true_doas.len() != amplitudes.len() {
            return Err(Error::Dimension(format!(
                "{} DOAs but {} amplitudes",
                true_doas.len(),
                amplitudes.len()
            )));
        }
        if let Some(t) = true_doas.iter().find(|t| !grid.contains(**t)) {
            return Err(Error::Parameter(format!("DOA {t} outside the grid")));
        }
        let mut sorted = true_doas.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[1] - w[0] <= grid.step()) {
            return Err(Error::Parameter("targets must be more than 2r apart".into()));
        }
        Ok(DoaScene {
            grid,
            true_doas,
            amplitudes,
        })
    }

    pub fn len(&self) -> usize {
        self.true_doas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_doas.is_empty()
    }
}

/// Draws `k` values uniformly from `[lo, hi]` whose pairwise gaps all exceed
/// `min_gap`, by rejection. Returns them sorted.
pub fn draw_separated<R: Rng + ?Sized>(rng: &mut R, k: usize, lo: f64, hi: f64, min_gap: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::Parameter(format!("empty range [{lo}, {hi}]")));
    }
    if k > 1 && (k - 1) as f64 * min_gap >= hi - lo {
        return Err(Error::Parameter(format!("cannot fit {k} targets {min_gap} apart in [{lo}, {hi}]")));
    }
    const ATTEMPTS: usize = 100_000;
    'outer: for _ in 0..ATTEMPTS {
        let mut picks: Vec<f64> = Vec::with_capacity(k);
        for _ in 0..k {
            let mut placed = false;
            for _ in 0..1000 {
                let v = rng.random_range(lo..=hi);
                if picks.iter().all(|p| (p - v).abs() > min_gap) {
                    picks.push(v);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'outer;
            }
        }
        picks.sort_by(f64::total_cmp);
        return Ok(picks);
    }
    Err(Error::Parameter(format!("could not place {k} targets {min_gap} apart")))
}
