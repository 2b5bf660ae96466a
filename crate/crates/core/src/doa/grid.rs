use nalgebra::DVector;

use crate::{Error, Result};

/// Uniform grid `θ₁ < θ₂ < … < θ_N` with spacing `2r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: DVector<f64>,
    r: f64,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Parameter("a grid needs at least two points".into()));
        }
        let step = points[1] - points[0];
        if !(step > 0.0) {
            return Err(Error::Parameter("grid points must increase".into()));
        }
        let tol = 1e-12 * step.max(points[0].abs()).max(1.0);
        if points.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > tol) {
            return Err(Error::Parameter("grid spacing is not uniform".into()));
        }
        Ok(Grid {
            points: DVector::from_vec(points),
            r: step / 2.0,
        })
    }

    pub fn points(&self) -> &DVector<f64> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half spacing.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn step(&self) -> f64 {
        2.0 * self.r
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.len() - 1]
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lo() && value <= self.hi()
    }

    /// Index `i` of the interval `[θᵢ, θ_{i+1}]` holding `value`, clamped to
    /// the grid.
    pub fn interval_of(&self, value: f64) -> usize {
        let i = ((value - self.lo()) / self.step()).floor();
        (i.max(0.0) as usize).min(self.len() - 2)
    }

    pub fn midpoint(&self, interval: usize) -> f64 {
        0.5 * (self.points[interval] + self.points[interval + 1])
    }

    pub fn nearest(&self, value: f64) -> usize {
        let i = ((value - self.lo()) / self.step()).round();
        (i.max(0.0) as usize).min(self.len() - 1)
    }
}

/// Grid from `lo` to `hi` inclusive with the given step, which must divide
/// the range.
pub fn make_grid(lo: f64, hi: f64, step: f64) -> Result<Grid> {
    if !(hi > lo) || !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Parameter(format!("invalid grid range [{lo}, {hi}] with step {step}")));
    }
    let count = (hi - lo) / step;
    let intervals = count.round();
    if (count - intervals).abs() > 1e-9 * intervals.max(1.0) || intervals < 1.0 {
        return Err(Error::Parameter(format!("step {step} does not divide [{lo}, {hi}]")));
    }
    let n = intervals as usize;
    let points = (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * step }).collect();
    let mut grid = Grid::new(points)?;
    grid.r = step / 2.0;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_grid() {
        let g = make_grid(-1.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 201);
        assert!((g.r() - 0.005).abs() < 1e-15);
        assert_eq!(g.lo(), -1.0);
        assert_eq!(g.hi(), 1.0);
        assert!((g.points()[100]).abs() < 1e-12);
    }

    #[test]
    fn degree_grid() {
        let g = make_grid(-40.0, 40.0, 1.0).unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g.r(), 0.5);
    }

    #[test]
    fn two_points() {
        let g = make_grid(0.0, 1.0, 1.0).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.r(), 0.5);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(make_grid(0.0, 1.0, 0.3).is_err());
        assert!(make_grid(1.0, 0.0, 0.1).is_err());
        assert!(make_grid(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 1.0, 2.5]).is_err());
    }

    #[test]
    fn interval_lookup() {
        let g = make_grid(0.0, 4.0, 1.0).unwrap();
        assert_eq!(g.interval_of(0.0), 0);
        assert_eq!(g.interval_of(2.5), 2);
        assert_eq!(g.interval_of(4.0), 3);
        assert_eq!(g.interval_of(-0.2), 0);
        assert_eq!(g.midpoint(2), 2.5);
        assert_eq!(g.nearest(2.6), 3);
        assert_eq!(g.nearest(9.0), 4);
    }
}
