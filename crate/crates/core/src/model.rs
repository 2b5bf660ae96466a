//! Signal model, joint-vector layout and mixed norms.
//!
//! A [`JointVector`] of length `2N` stores `x = [s; p]`; group `i` is the
//! pair `(x[i], x[N + i])`. Everything here is generic over [`Scalar`], which
//! covers both `f64` and complex doubles.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::{Error, Result, C64};

/// Field the solvers operate over: `f64` or `Complex<f64>`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}

impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Groups whose magnitude is at most this fraction of the largest group are
/// treated as zero.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;

/// Measurement model `y = (A + B·diag(β))·s + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchProblem<T: Scalar> {
    a: DMatrix<T>,
    b: DMatrix<T>,
    y: DVector<T>,
    sigma_n: f64,
    r: Option<f64>,
}

impl<T: Scalar> MismatchProblem<T> {
    /// Noiseless, unbounded problem. Use [`with_noise`](Self::with_noise) and
    /// [`with_bound`](Self::with_bound) to attach the remaining fields.
    pub fn new(a: DMatrix<T>, b: DMatrix<T>, y: DVector<T>) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::Dimension(format!(
                "A is {}x{} but B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        if y.len() != a.nrows() {
            return Err(Error::Dimension(format!(
                "y has length {} but A has {} rows",
                y.len(),
                a.nrows()
            )));
        }
        Ok(MismatchProblem {
            a,
            b,
            y,
            sigma_n: 0.0,
            r: None,
        })
    }

    pub fn with_noise(mut self, sigma_n: f64) -> Result<Self> {
        if !(sigma_n >= 0.0) {
            return Err(Error::Parameter(format!("noise level must be >= 0, got {sigma_n}")));
        }
        self.sigma_n = sigma_n;
        Ok(self)
    }

    pub fn with_bound(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Parameter(format!("mismatch bound must be > 0, got {r}")));
        }
        self.r = Some(r);
        Ok(self)
    }

    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<T> {
        &self.b
    }

    pub fn y(&self) -> &DVector<T> {
        &self.y
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma_n
    }

    pub fn r(&self) -> Option<f64> {
        self.r
    }

    /// Number of measurements `M`.
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    /// Number of grid points / groups `N`.
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        is_real_slice(self.a.as_slice()) && is_real_slice(self.b.as_slice()) && is_real_slice(self.y.as_slice())
    }

    /// Drops the (zero) imaginary parts. Fails on genuinely complex data.
    pub fn to_real(&self) -> Result<MismatchProblem<f64>> {
        if !self.is_real() {
            return Err(Error::UnsupportedField);
        }
        Ok(MismatchProblem {
            a: self.a.map(|v| v.real()),
            b: self.b.map(|v| v.real()),
            y: self.y.map(|v| v.real()),
            sigma_n: self.sigma_n,
            r: self.r,
        })
    }
}

pub(crate) fn is_real_slice<T: Scalar>(values: &[T]) -> bool {
    values.iter().all(|v| v.imaginary() == 0.0)
}

/// Coefficient vector `x = [s; p]` holding `N` two-element groups.
#[derive(Debug, Clone, PartialEq)]
pub struct JointVector<T: Scalar> {
    entries: DVector<T>,
}

impl<T: Scalar> JointVector<T> {
    pub fn new(entries: DVector<T>) -> Result<Self> {
        if !entries.len().is_multiple_of(2) {
            return Err(Error::Layout(entries.len()));
        }
        Ok(JointVector { entries })
    }

    pub fn zeros(n_groups: usize) -> Self {
        JointVector {
            entries: DVector::zeros(2 * n_groups),
        }
    }

    pub fn from_parts(s: &DVector<T>, p: &DVector<T>) -> Result<Self> {
        if s.len() != p.len() {
            return Err(Error::Dimension(format!("s has length {} but p has {}", s.len(), p.len())));
        }
        let n = s.len();
        let mut entries = DVector::zeros(2 * n);
        entries.rows_mut(0, n).copy_from(s);
        entries.rows_mut(n, n).copy_from(p);
        Ok(JointVector { entries })
    }

    /// Builds `[s; β ⊙ s]` for real mismatch parameters.
    pub fn from_signal(s: &DVector<T>, beta: &DVector<f64>) -> Result<Self> {
        if s.len() != beta.len() {
            return Err(Error::Dimension(format!("s has length {} but beta has {}", s.len(), beta.len())));
        }
        let p = DVector::from_iterator(s.len(), s.iter().zip(beta.iter()).map(|(&si, &bi)| si * T::from_real(bi)));
        Self::from_parts(s, &p)
    }

    pub fn n_groups(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn entries(&self) -> &DVector<T> {
        &self.entries
    }

    pub fn into_entries(self) -> DVector<T> {
        self.entries
    }

    pub fn s(&self) -> DVector<T> {
        self.entries.rows(0, self.n_groups()).into_owned()
    }

    pub fn p(&self) -> DVector<T> {
        let n = self.n_groups();
        self.entries.rows(n, n).into_owned()
    }

    pub fn group(&self, i: usize) -> (T, T) {
        let n = self.n_groups();
        (self.entries[i], self.entries[n + i])
    }

    pub fn group_magnitudes(&self) -> DVector<f64> {
        group_magnitudes(&self.entries)
    }

    /// Groups whose magnitude exceeds [`SUPPORT_TOLERANCE`] times the largest.
    pub fn support(&self) -> Vec<usize> {
        support_of(&self.group_magnitudes())
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(T) -> U) -> JointVector<U> {
        JointVector {
            entries: self.entries.map(f),
        }
    }
}

pub(crate) fn group_magnitudes<T: Scalar>(entries: &DVector<T>) -> DVector<f64> {
    let n = entries.len() / 2;
    DVector::from_fn(n, |i, _| (entries[i].modulus_squared() + entries[n + i].modulus_squared()).sqrt())
}

pub(crate) fn support_of(mags: &DVector<f64>) -> Vec<usize> {
    let max = mags.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Vec::new();
    }
    let cut = SUPPORT_TOLERANCE * max;
    mags.iter().enumerate().filter(|(_, &m)| m > cut).map(|(i, _)| i).collect()
}

/// Mixed norms of a joint vector.
#[derive(Debug, Clone, PartialEq)]
pub struct JointNorms {
    /// `‖x‖₂,₁`: sum of group magnitudes.
    pub l21: f64,
    /// `‖x‖∞,₁`: largest group magnitude.
    pub linf1: f64,
    /// `‖x‖₀,₁`: number of nonzero groups.
    pub l01: usize,
    pub group_mags: DVector<f64>,
}

pub fn joint_norms<T: Scalar>(x: &JointVector<T>) -> JointNorms {
    let group_mags = x.group_magnitudes();
    JointNorms {
        l21: group_mags.sum(),
        linf1: group_mags.iter().copied().fold(0.0, f64::max),
        l01: support_of(&group_mags).len(),
        group_mags,
    }
}

/// `Φ = [A, B]`, an `M × 2N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedPhi<T: Scalar> {
    phi: DMatrix<T>,
}

impl<T: Scalar> StackedPhi<T> {
    pub fn from_blocks(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::Dimension(format!(
                "A is {}x{} but B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let (m, n) = a.shape();
        let mut phi = DMatrix::zeros(m, 2 * n);
        phi.columns_mut(0, n).copy_from(a);
        phi.columns_mut(n, n).copy_from(b);
        Ok(StackedPhi { phi })
    }

    /// Wraps an existing `M × 2N` matrix.
    pub fn from_matrix(phi: DMatrix<T>) -> Result<Self> {
        if !phi.ncols().is_multiple_of(2) {
            return Err(Error::Layout(phi.ncols()));
        }
        Ok(StackedPhi { phi })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.phi
    }

    pub fn n_groups(&self) -> usize {
        self.phi.ncols() / 2
    }

    pub fn apply(&self, x: &JointVector<T>) -> DVector<T> {
        &self.phi * x.entries()
    }

    /// `Φᴴ v`, the adjoint applied to a measurement-space vector.
    pub fn adjoint_apply(&self, v: &DVector<T>) -> DVector<T> {
        self.phi.ad_mul(v)
    }
}

pub fn build_phi<T: Scalar>(problem: &MismatchProblem<T>) -> StackedPhi<T> {
    StackedPhi::from_blocks(problem.a(), problem.b()).expect("problem dimensions are validated on construction")
}

/// Stacks real parts atop imaginary parts: `[Re(M); Im(M)]`.
pub fn realify_matrix(m: &DMatrix<C64>) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    DMatrix::from_fn(2 * rows, cols, |i, j| if i < rows { m[(i, j)].re } else { m[(i - rows, j)].im })
}

pub fn realify_vector(v: &DVector<C64>) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Converts a complex system with real unknowns into an equivalent real
/// system of twice the height. For real `x`, `‖A_c x − y_c‖ = ‖A_r x − y_r‖`.
pub fn realify(a: &DMatrix<C64>, b: &DMatrix<C64>, y: &DVector<C64>) -> Result<MismatchProblem<f64>> {
    if a.shape() != b.shape() || y.len() != a.nrows() {
        return Err(Error::Dimension(format!(
            "A {:?}, B {:?}, y {} are inconsistent",
            a.shape(),
            b.shape(),
            y.len()
        )));
    }
    MismatchProblem::new(realify_matrix(a), realify_matrix(b), realify_vector(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn phi_of_identity_and_zero_blocks() {
        let phi = StackedPhi::from_blocks(&DMatrix::<f64>::identity(2, 2), &DMatrix::zeros(2, 2)).unwrap();
        let expected = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(phi.matrix(), &expected);
    }

    #[test]
    fn phi_with_duplicate_blocks_keeps_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 5, 3);
        let phi = StackedPhi::from_blocks(&a, &a).unwrap();
        assert_eq!(phi.matrix().rank(1e-10), a.rank(1e-10));
    }

    #[test]
    fn phi_columns_are_a_then_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 3, 2);
        let b = random_matrix(&mut rng, 3, 2);
        let problem = MismatchProblem::new(a.clone(), b.clone(), DVector::zeros(3)).unwrap();
        let phi = build_phi(&problem);
        assert_eq!(phi.matrix().shape(), (3, 4));
        assert_eq!(phi.matrix().column(0), a.column(0));
        assert_eq!(phi.matrix().column(1), a.column(1));
        assert_eq!(phi.matrix().column(2), b.column(0));
        assert_eq!(phi.matrix().column(3), b.column(1));
    }

    #[test]
    fn mismatched_blocks_are_rejected() {
        let a = DMatrix::<f64>::zeros(3, 2);
        let b = DMatrix::<f64>::zeros(3, 3);
        assert!(matches!(StackedPhi::from_blocks(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(MismatchProblem::new(a.clone(), b, DVector::zeros(3)), Err(Error::Dimension(_))));
        assert!(matches!(MismatchProblem::new(a.clone(), a, DVector::zeros(4)), Err(Error::Dimension(_))));
    }

    #[test]
    fn bound_and_noise_are_validated() {
        let p = MismatchProblem::new(DMatrix::<f64>::zeros(2, 2), DMatrix::zeros(2, 2), DVector::zeros(2)).unwrap();
        assert!(p.clone().with_bound(0.0).is_err());
        assert!(p.clone().with_bound(-1.0).is_err());
        assert!(p.clone().with_noise(-0.1).is_err());
        assert_eq!(p.with_bound(0.5).unwrap().r(), Some(0.5));
    }

    #[test]
    fn norms_of_zero() {
        let norms = joint_norms(&JointVector::<f64>::zeros(3));
        assert_eq!(norms.l21, 0.0);
        assert_eq!(norms.linf1, 0.0);
        assert_eq!(norms.l01, 0);
        assert_eq!(norms.group_mags, DVector::zeros(3));
    }

    #[test]
    fn norms_of_three_four_five() {
        let x = JointVector::new(DVector::from_vec(vec![3.0, 4.0])).unwrap();
        let norms = joint_norms(&x);
        assert_eq!(norms.l21, 5.0);
        assert_eq!(norms.linf1, 5.0);
        assert_eq!(norms.l01, 1);
    }

    #[test]
    fn norms_of_two_unit_groups() {
        let x = JointVector::new(DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0])).unwrap();
        let norms = joint_norms(&x);
        assert_eq!(norms.group_mags, DVector::from_vec(vec![1.0, 1.0]));
        assert_eq!(norms.l21, 2.0);
        assert_eq!(norms.linf1, 1.0);
        assert_eq!(norms.l01, 2);
    }

    #[test]
    fn complex_groups_use_modulus() {
        let x = JointVector::new(DVector::from_vec(vec![C64::new(0.0, 3.0), C64::new(4.0, 0.0)])).unwrap();
        assert_eq!(joint_norms(&x).l21, 5.0);
    }

    #[test]
    fn odd_length_is_a_layout_error() {
        assert_eq!(JointVector::new(DVector::<f64>::zeros(3)), Err(Error::Layout(3)));
    }

    #[test]
    fn l01_ignores_roundoff_groups() {
        let x = JointVector::new(DVector::from_vec(vec![1.0, 1e-12, 0.0, 0.0])).unwrap();
        assert_eq!(joint_norms(&x).l01, 1);
    }

    #[test]
    fn realify_real_input_has_zero_lower_block() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]).map(|v| C64::new(v, 0.0));
        let y = DVector::from_vec(vec![C64::new(5.0, 0.0), C64::new(6.0, 0.0)]);
        let p = realify(&a, &a, &y).unwrap();
        assert_eq!(p.a().rows(0, 2), DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert!(p.a().rows(2, 2).iter().all(|&v| v == 0.0));
        assert!(p.y().rows(2, 2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn realify_pure_imaginary_scalar() {
        let a = DMatrix::from_element(1, 1, C64::new(0.0, 1.0));
        let y = DVector::from_element(1, C64::new(0.0, 2.0));
        let p = realify(&a, &DMatrix::zeros(1, 1), &y).unwrap();
        assert_eq!(p.a(), &DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
        assert_eq!(p.a() * DVector::from_element(1, 2.0), DVector::from_vec(vec![0.0, 2.0]));
        assert_eq!(p.y(), &DVector::from_vec(vec![0.0, 2.0]));
    }

    #[test]
    fn realify_preserves_residual_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DMatrix::from_fn(3, 2, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let y = DVector::from_fn(3, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let s = DVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
        let complex_res = (&a * s.map(|v| C64::new(v, 0.0)) - &y).norm();
        let p = realify(&a, &a, &y).unwrap();
        let real_res = (p.a() * &s - p.y()).norm();
        assert!((complex_res - real_res).abs() < 1e-12);
    }

    #[test]
    fn to_real_rejects_complex_entries() {
        let a = DMatrix::from_element(1, 1, C64::new(1.0, 0.5));
        let p = MismatchProblem::new(a.clone(), a, DVector::zeros(1)).unwrap();
        assert_eq!(p.to_real(), Err(Error::UnsupportedField));
    }

    fn joint(values: Vec<f64>) -> JointVector<f64> {
        JointVector::new(DVector::from_vec(values)).unwrap()
    }

    proptest! {
        #[test]
        fn norm_chain(values in prop::collection::vec(-10.0f64..10.0, 1..20)) {
            let mut v = values.clone();
            v.extend(values.iter().rev());
            let x = joint(v);
            let n = joint_norms(&x);
            let l2 = x.entries().norm();
            prop_assert!(n.l21 + 1e-12 >= l2);
            prop_assert!(l2 + 1e-12 >= n.linf1);
            prop_assert!(n.l21 <= (x.entries().len() as f64).sqrt() * l2 + 1e-9);
        }

        #[test]
        fn sparse_l21_cauchy_schwarz(n in 3usize..12, k in 1usize..3, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = DVector::zeros(2 * n);
            for i in 0..k.min(n) {
                v[i] = rng.random_range(-5.0..5.0);
                v[n + i] = rng.random_range(-5.0..5.0);
            }
            let x = JointVector::new(v).unwrap();
            let l21 = joint_norms(&x).l21;
            prop_assert!(l21 <= (k as f64).sqrt() * 2f64.sqrt() * x.entries().norm() + 1e-9);
        }

        #[test]
        fn group_magnitudes_are_rotation_invariant(
            values in prop::collection::vec(-10.0f64..10.0, 2..16),
            phi in -3.2f64..3.2,
        ) {
            let n = values.len() / 2;
            let x = joint(values[..2 * n].to_vec());
            let (c, s) = (phi.cos(), phi.sin());
            let mut rotated = x.entries().clone();
            for i in 0..n {
                let (a, b) = x.group(i);
                rotated[i] = c * a - s * b;
                rotated[n + i] = s * a + c * b;
            }
            let before = x.group_magnitudes();
            let after = joint(rotated.as_slice().to_vec()).group_magnitudes();
            for i in 0..n {
                prop_assert!((before[i] - after[i]).abs() <= 1e-12 * (1.0 + before[i]));
            }
        }
    }
}
