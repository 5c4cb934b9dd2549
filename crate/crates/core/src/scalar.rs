//! Scalar plumbing shared by every numerical module.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{One, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul};

/// Real field used by the operator layer (`f32`, `f64`).
pub trait Real: RealField + Copy {}
impl<T: RealField + Copy> Real for T {}

/// Coefficient ring for b-tables: any ordered semiring-like type,
/// including exact rationals.
pub trait Coeff: Clone + PartialOrd + Zero + One + Add<Output = Self> + Mul<Output = Self> + Debug {}
impl<T> Coeff for T where T: Clone + PartialOrd + Zero + One + Add<Output = T> + Mul<Output = T> + Debug {}

pub type C<R> = Complex<R>;
pub type CMat<R> = DMatrix<Complex<R>>;
pub type CVec<R> = DVector<Complex<R>>;

/// Converts an `f64` literal into the working real type.
#[inline]
pub fn lit<R: Real>(x: f64) -> R {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<R: Real>(x: R) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

#[inline]
pub fn cr<R: Real>(x: R) -> Complex<R> {
    Complex::new(x, R::zero())
}

#[inline]
pub fn c64<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(lit(re), lit(im))
}
