//! Scalar abstraction shared by every numerical kernel.
//!
//! All grids, states and operators are generic over [`Real`], which is
//! implemented for `f32` and `f64`. The spectral kernels lean on `rustfft`,
//! so the bound includes [`rustfft::FftNum`].

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point scalar usable by the simulator.
pub trait Real: Float + FloatConst + FftNum + Debug + Display + Default + Send + Sync + 'static {
    /// Machine epsilon scaled into a "numerically zero" amplitude threshold.
    const TINY: f64;
    /// Tolerance used when validating state normalization.
    const NORM_TOL: f64;

    fn of(x: f64) -> Self;

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn of_isize(n: isize) -> Self {
        Self::of(n as f64)
    }

    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    const TINY: f64 = 1e-14;
    const NORM_TOL: f64 = 1e-10;

    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    const TINY: f64 = 1e-6;
    const NORM_TOL: f64 = 1e-4;

    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

/// Complex amplitude over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn cis<T: Real>(angle: T) -> Complex<T> {
    Complex::new(angle.cos(), angle.sin())
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Sum of squared moduli, accumulated in a fixed order.
pub(crate) fn norm_sqr_sum<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// `Σ conj(a_j) b_j` in index order.
pub(crate) fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Returns `Some(k)` when `value / step` is within `rel_tol` of the integer `k`.
pub(crate) fn as_grid_steps<T: Real>(value: T, step: T, rel_tol: f64) -> Option<i64> {
    let ratio = (value / step).to_f64_lossy();
    let k = ratio.round();
    if (ratio - k).abs() <= rel_tol * k.abs().max(1.0) {
        Some(k as i64)
    } else {
        None
    }
}
