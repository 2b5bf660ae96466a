//! Proximal and projection operators on joint vectors.

use nalgebra::DVector;

use crate::model::{is_real_slice, JointVector, Scalar};
use crate::{Error, Result};

/// Group soft-thresholding: each pair `(xᵢ, x_{N+i})` is shrunk toward zero
/// by `tau` in Euclidean length, and set to `(0, 0)` when shorter than `tau`.
///
/// This is the prox of `tau·‖·‖₂,₁`.
pub fn group_soft_threshold<T: Scalar>(x: &JointVector<T>, tau: f64) -> Result<JointVector<T>> {
    check_threshold(tau)?;
    let mut out = x.entries().clone();
    shrink_groups(&mut out, tau);
    JointVector::new(out)
}

fn check_threshold(tau: f64) -> Result<()> {
    if !(tau >= 0.0) {
        return Err(Error::Parameter(format!("threshold must be >= 0, got {tau}")));
    }
    Ok(())
}

/// In-place group shrinkage on a raw `[s; p]` buffer.
pub(crate) fn shrink_groups<T: Scalar>(v: &mut DVector<T>, tau: f64) {
    let n = v.len() / 2;
    for i in 0..n {
        let mag = (v[i].modulus_squared() + v[n + i].modulus_squared()).sqrt();
        let scale = if mag > tau { (mag - tau) / mag } else { 0.0 };
        v[i] = v[i].scale(scale);
        v[n + i] = v[n + i].scale(scale);
    }
}

/// Elementwise soft-thresholding, the prox of `tau·‖·‖₁` (modulus shrink for
/// complex entries).
pub(crate) fn shrink_entries<T: Scalar>(v: &mut DVector<T>, tau: f64) {
    for e in v.iter_mut() {
        let mag = e.modulus();
        let scale = if mag > tau { (mag - tau) / mag } else { 0.0 };
        *e = e.scale(scale);
    }
}

fn check_smoothing(mu: f64, lambda: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::Parameter(format!("smoothing parameter must be > 0, got {mu}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    Ok(())
}

/// Gradient of the Moreau envelope of `h = λ‖·‖₂,₁`:
/// `(x − prox_{μh}(x)) / μ`. It is `1/μ`-Lipschitz.
pub fn moreau_grad<T: Scalar>(x: &JointVector<T>, mu: f64, lambda: f64) -> Result<JointVector<T>> {
    check_smoothing(mu, lambda)?;
    let mut out = x.entries().clone();
    moreau_grad_in_place(&mut out, mu, lambda);
    JointVector::new(out)
}

/// Replaces `v` with the envelope gradient at `v`.
pub(crate) fn moreau_grad_in_place<T: Scalar>(v: &mut DVector<T>, mu: f64, lambda: f64) {
    let tau = mu * lambda;
    let n = v.len() / 2;
    for i in 0..n {
        let mag = (v[i].modulus_squared() + v[n + i].modulus_squared()).sqrt();
        // x - prox(x) keeps tau/mag of the group when mag > tau, all of it otherwise.
        let keep = if mag > tau { tau / mag } else { 1.0 };
        v[i] = v[i].scale(keep / mu);
        v[n + i] = v[n + i].scale(keep / mu);
    }
}

/// Value of the Moreau envelope `h_μ(x) = min_u λ‖u‖₂,₁ + ‖u − x‖²/(2μ)`.
pub fn moreau_envelope<T: Scalar>(x: &JointVector<T>, mu: f64, lambda: f64) -> Result<f64> {
    check_smoothing(mu, lambda)?;
    Ok(moreau_envelope_raw(x.entries(), mu, lambda))
}

pub(crate) fn moreau_envelope_raw<T: Scalar>(v: &DVector<T>, mu: f64, lambda: f64) -> f64 {
    // Per group: Huber-type function of the group magnitude.
    let tau = mu * lambda;
    let n = v.len() / 2;
    (0..n)
        .map(|i| {
            let mag = (v[i].modulus_squared() + v[n + i].modulus_squared()).sqrt();
            if mag > tau {
                lambda * mag - 0.5 * mu * lambda * lambda
            } else {
                mag * mag / (2.0 * mu)
            }
        })
        .sum()
}

/// Half-width `r` of the cone `{s ≥ 0, −r·s ≤ p ≤ r·s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    r: f64,
}

impl ConeParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Parameter(format!("cone half-width must be > 0, got {r}")));
        }
        Ok(ConeParams { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn contains(&self, s: f64, p: f64) -> bool {
        s >= 0.0 && p.abs() <= self.r * s
    }
}

/// Euclidean projection of `(s, p)` onto the cone. Cases are checked in order;
/// neighbouring cases agree on their shared boundary.
pub fn project_cone(s: f64, p: f64, cone: &ConeParams) -> (f64, f64) {
    let r = cone.r;
    if -r * s <= p && p <= r * s {
        (s, p)
    } else if s / r <= p && p <= -s / r {
        (0.0, 0.0)
    } else if r * s <= p && -s / r <= p {
        let c = (s + (r * p).abs()) / (1.0 + r * r);
        (c, c * r)
    } else {
        let c = (s + (r * p).abs()) / (1.0 + r * r);
        (c, -c * r)
    }
}

/// Applies [`project_cone`] to every group. Complex data is rejected.
pub fn project_cone_vec<T: Scalar>(x: &JointVector<T>, cone: &ConeParams) -> Result<JointVector<T>> {
    if !is_real_slice(x.entries().as_slice()) {
        return Err(Error::UnsupportedField);
    }
    let real = x.entries().map(|v| v.real());
    let mut out = real;
    project_cone_in_place(&mut out, cone);
    JointVector::new(out.map(T::from_real))
}

pub(crate) fn project_cone_in_place(v: &mut DVector<f64>, cone: &ConeParams) {
    let n = v.len() / 2;
    for i in 0..n {
        let (s, p) = project_cone(v[i], v[n + i], cone);
        v[i] = s;
        v[n + i] = p;
    }
}
