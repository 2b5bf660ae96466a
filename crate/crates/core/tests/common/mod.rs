//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's numerical routines.

#![allow(dead_code)]

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian<R: Rng>(rng: &mut R, m: usize, n: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

/// `½‖v − x‖² + τ Σᵢ ‖(vᵢ, v_{N+i})‖`.
pub fn prox_objective(v: &[f64], x: &[f64], tau: f64) -> f64 {
    let n = v.len() / 2;
    let fit: f64 = v.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 2.0;
    let pen: f64 = (0..n).map(|i| v[i].hypot(v[n + i])).sum();
    fit + tau * pen
}

/// Golden-section minimum of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    (lo + hi) / 2.0
}

/// Minimizes a jointly convex function of two variables on a box by nested
/// golden-section search.
pub fn minimize_2d(f: impl Fn(f64, f64) -> f64, bound: f64) -> (f64, f64) {
    let inner = |a: f64| golden_min(|b| f(a, b), -bound, bound, 90);
    let a = golden_min(|a| f(a, inner(a)), -bound, bound, 90);
    (a, inner(a))
}

/// Nearest point of the cone `{s ≥ 0, |p| ≤ r·s}` found by scanning both
/// boundary rays at arc-length spacing `h` out to `reach`. Feasible points
/// are their own nearest point.
pub fn cone_nearest_by_scan(s: f64, p: f64, r: f64, h: f64, reach: f64) -> (f64, f64) {
    if s >= 0.0 && p.abs() <= r * s {
        return (s, p);
    }
    let norm = (1.0 + r * r).sqrt();
    let steps = (reach / h).ceil() as usize;
    let mut best = (0.0, 0.0);
    let mut best_d = s * s + p * p;
    for sign in [1.0, -1.0] {
        for k in 0..=steps {
            let t = k as f64 * h / norm;
            let (cs, cp) = (t, sign * r * t);
            let d = (cs - s).powi(2) + (cp - p).powi(2);
            if d < best_d {
                best_d = d;
                best = (cs, cp);
            }
        }
    }
    best
}

/// `max over supports |S| = k of max(σ_max² − 1, 1 − σ_min²)` for the
/// columns `S ∪ (N + S)`, by enumerating every support.
pub fn jrip_by_enumeration(phi: &DMatrix<f64>, k: usize) -> f64 {
    let n = phi.ncols() / 2;
    let mut worst: f64 = 0.0;
    for support in (0..n).combinations(k) {
        let cols: Vec<usize> = support.iter().copied().chain(support.iter().map(|&i| n + i)).collect();
        let sub = DMatrix::from_fn(phi.nrows(), cols.len(), |r, c| phi[(r, cols[c])]);
        let sv = sub.singular_values();
        let hi = sv.max().powi(2);
        let lo = sv.min().powi(2);
        worst = worst.max(hi - 1.0).max(1.0 - lo);
    }
    worst
}

/// `C0 = 6√2 / (1 − (1 + 3√2)·σ)`.
pub fn c0(sigma: f64) -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    6.0 * r2 / (1.0 - (1.0 + 3.0 * r2) * sigma)
}

/// `max_i ‖(vᵢ, v_{N+i})‖`.
pub fn linf1(v: &DVector<f64>) -> f64 {
    let n = v.len() / 2;
    (0..n).map(|i| v[i].hypot(v[n + i])).fold(0.0, f64::max)
}

/// Central difference of a vector-valued map.
pub fn central_difference<T>(f: impl Fn(f64) -> DVector<T>, x: f64, h: f64) -> DVector<T>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    (f(x + h) - f(x - h)).unscale(2.0 * h)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
