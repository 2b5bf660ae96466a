use super::Grid;
use crate::model::{JointVector, Scalar};

/// Groups below this fraction of the strongest group are not reported.
pub const DETECTION_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T: Scalar> {
    /// Estimated parameter `φ = θᵢ + β̂ᵢ`.
    pub doa: f64,
    pub magnitude: T,
    pub grid_index: usize,
}

/// Reads detections off a joint solution: every group whose magnitude is at
/// least `threshold` times the largest one yields `φ = θᵢ + β̂ᵢ` with
/// `β̂ᵢ = Re(pᵢ/sᵢ)` clipped to `[−r, r]`.
pub fn detections_from_solution<T: Scalar>(x_hat: &JointVector<T>, grid: &Grid, threshold: f64) -> Vec<Detection<T>> {
    let mags = x_hat.group_magnitudes();
    let max = mags.max();
    if !(max > 0.0) {
        return Vec::new();
    }
    let r = grid.r();
    (0..x_hat.n_groups())
        .filter(|&i| mags[i] >= threshold * max)
        .filter_map(|i| {
            let (s, p) = x_hat.group(i);
            if s.modulus() == 0.0 {
                return None;
            }
            let beta = (p / s).real().clamp(-r, r);
            Some(Detection {
                doa: grid.points()[i] + beta,
                magnitude: s,
                grid_index: i,
            })
        })
        .collect()
}

/// Fuses all detections that fall in the same interval `[θᵢ, θᵢ₊₁]` into one,
/// with `s = Σ sₖ` and `φ = θ_c + Σ|sₖ|(φₖ − θ_c) / Σ|sₖ|` about the interval
/// midpoint `θ_c`. Lone detections pass through unchanged. Output is sorted
/// by `φ`.
pub fn merge_targets<T: Scalar>(detections: &[Detection<T>], grid: &Grid) -> Vec<Detection<T>> {
    let mut sorted = detections.to_vec();
    sorted.sort_by(|a, b| a.doa.total_cmp(&b.doa));
    let mut out = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let interval = grid.interval_of(sorted[i].doa);
        let mut j = i + 1;
        while j < sorted.len() && grid.interval_of(sorted[j].doa) == interval {
            j += 1;
        }
        if j - i == 1 {
            out.push(sorted[i].clone());
        } else {
            let centre = grid.midpoint(interval);
            let group = &sorted[i..j];
            let weight: f64 = group.iter().map(|d| d.magnitude.modulus()).sum();
            let shift: f64 = group.iter().map(|d| d.magnitude.modulus() * (d.doa - centre)).sum();
            let doa = if weight > 0.0 { centre + shift / weight } else { centre };
            let magnitude = group.iter().fold(T::zero(), |acc, d| acc + d.magnitude);
            out.push(Detection {
                doa,
                magnitude,
                grid_index: grid.nearest(doa),
            });
        }
        i = j;
    }
    out
}
