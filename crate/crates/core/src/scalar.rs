//! Scalar field abstraction over `f64` and `Complex64`.

use core::fmt::Debug;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub use num_complex::Complex64 as C64;

/// Thin wrappers around `libm` so the crate stays `no_std`.
pub mod math {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }
    #[inline]
    pub fn log1p(x: f64) -> f64 {
        libm::log1p(x)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn powi(x: f64, n: i32) -> f64 {
        libm::pow(x, n as f64)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }
    #[inline]
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
}

/// Double-precision real or complex scalar.
///
/// All containers and algorithms in this crate are generic over `Scalar`, so
/// choosing between real and complex arithmetic is an instantiation-time
/// decision.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    /// Drops the imaginary part when `Self` is real.
    fn from_complex(z: C64) -> Self;
    fn to_complex(self) -> C64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn abs_sqr(self) -> f64;
    fn is_finite(self) -> bool;

    #[inline]
    fn scale(self, s: f64) -> Self {
        self * Self::from_real(s)
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_complex(z: C64) -> Self {
        z.re
    }
    #[inline]
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        math::abs(self)
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for C64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn from_complex(z: C64) -> Self {
        z
    }
    #[inline]
    fn to_complex(self) -> C64 {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        C64::new(self.re, -self.im)
    }
    #[inline]
    fn abs(self) -> f64 {
        math::hypot(self.re, self.im)
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        C64::new(self.re * s, self.im * s)
    }
}

/// `x^* y` (conjugate-linear in the first argument).
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = T::zero();
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * *b;
    }
    acc
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    // Scaled accumulation avoids overflow for large entries.
    let scale = x.iter().fold(0.0_f64, |m, v| {
        let a = v.abs();
        if a > m {
            a
        } else {
            m
        }
    });
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = x.iter().map(|v| (v.scale(1.0 / scale)).abs_sqr()).sum();
    scale * math::sqrt(ssq)
}

/// `y += a x`
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

pub fn scale_in_place<T: Scalar>(s: T, x: &mut [T]) {
    for v in x.iter_mut() {
        *v *= s;
    }
}
