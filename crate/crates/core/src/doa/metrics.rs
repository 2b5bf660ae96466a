use super::{Detection, DoaScene};
use crate::model::Scalar;

/// Mean DOA error over the true targets. Estimates are matched one-to-one
/// to targets greedily, closest pair first; each unmatched target costs `r`.
/// Surplus estimates are ignored.
pub fn doa_error<T: Scalar, U: Scalar>(estimates: &[Detection<T>], scene: &DoaScene<U>) -> f64 {
    let k = scene.len();
    if k == 0 {
        return 0.0;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(k * estimates.len());
    for (t, &truth) in scene.true_doas.iter().enumerate() {
        for (e, est) in estimates.iter().enumerate() {
            pairs.push(((est.doa - truth).abs(), t, e));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut truth_used = vec![false; k];
    let mut est_used = vec![false; estimates.len()];
    let mut total = 0.0;
    let mut matched = 0;
    for (dist, t, e) in pairs {
        if truth_used[t] || est_used[e] {
            continue;
        }
        truth_used[t] = true;
        est_used[e] = true;
        total += dist;
        matched += 1;
    }
    (total + (k - matched) as f64 * scene.grid.r()) / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doa::make_grid;

    fn scene() -> DoaScene<f64> {
        DoaScene::new(make_grid(-1.0, 1.0, 0.01).unwrap(), vec![-0.5, 0.2], vec![1.0, 1.0]).unwrap()
    }

    fn est(doa: f64) -> Detection<f64> {
        Detection { doa, magnitude: 1.0, grid_index: 0 }
    }

    #[test]
    fn perfect_estimates() {
        assert_eq!(doa_error(&[est(0.2), est(-0.5)], &scene()), 0.0);
    }

    #[test]
    fn single_offset() {
        let s = DoaScene::new(make_grid(-1.0, 1.0, 0.01).unwrap(), vec![0.3], vec![1.0]).unwrap();
        assert!((doa_error(&[est(0.302)], &s) - 0.002).abs() < 1e-15);
    }

    #[test]
    fn all_missed_costs_r() {
        assert!((doa_error::<f64, f64>(&[], &scene()) - 0.005).abs() < 1e-15);
    }

    #[test]
    fn one_to_one_matching() {
        // Both estimates sit near the second target; only one may claim it.
        let e = doa_error(&[est(0.21), est(0.18)], &scene());
        assert!((e - (0.01 + 0.68) / 2.0).abs() < 1e-12);
    }
}
