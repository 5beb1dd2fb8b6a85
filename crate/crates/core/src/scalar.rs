//! Coefficient types for forms and operator matrices.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::ExactComplex;

/// Coefficient ring of the calculus.
///
/// Every operator in the crate is a linear map whose stencil weights are
/// integers, so the operators themselves never need more than ring
/// arithmetic. The extra methods cover the spots where a computation leaves
/// the ring: tolerance checks (`abs_sq`), division by a mass parameter
/// (`recip_checked`) and the JSON interchange (`to_re_im`/`from_re_im`).
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    fn from_i64(n: i64) -> Self;

    /// Squared magnitude as `f64`; approximate for exact types.
    fn abs_sq(&self) -> f64;

    /// Exact multiplicative inverse where one exists in the type.
    ///
    /// `i64` only inverts `1` and `-1`; floating and rational types invert
    /// everything nonzero.
    fn recip_checked(&self) -> Option<Self>;

    /// Real/imaginary parts for the interchange format (lossy for rationals).
    fn to_re_im(&self) -> (f64, f64);

    /// Rebuild from interchange parts; `None` when the value does not embed
    /// exactly (a fractional or complex entry in integer mode, say).
    fn from_re_im(re: f64, im: f64) -> Option<Self>;

    /// Tag written into form files: `integer`, `real`, `complex` or `exact`.
    fn scalar_tag() -> &'static str;
}

impl Scalar for i64 {
    fn from_i64(n: i64) -> Self {
        n
    }

    fn abs_sq(&self) -> f64 {
        let v = *self as f64;
        v * v
    }

    fn recip_checked(&self) -> Option<Self> {
        match self {
            1 => Some(1),
            -1 => Some(-1),
            _ => None,
        }
    }

    fn to_re_im(&self) -> (f64, f64) {
        (*self as f64, 0.0)
    }

    fn from_re_im(re: f64, im: f64) -> Option<Self> {
        if im != 0.0 || re.fract() != 0.0 || !re.is_finite() {
            return None;
        }
        Some(re as i64)
    }

    fn scalar_tag() -> &'static str {
        "integer"
    }
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn abs_sq(&self) -> f64 {
        self * self
    }

    fn recip_checked(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }

    fn to_re_im(&self) -> (f64, f64) {
        (*self, 0.0)
    }

    fn from_re_im(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }

    fn scalar_tag() -> &'static str {
        "real"
    }
}

impl Scalar for Complex64 {
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }

    fn recip_checked(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }

    fn to_re_im(&self) -> (f64, f64) {
        (self.re, self.im)
    }

    fn from_re_im(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }

    fn scalar_tag() -> &'static str {
        "complex"
    }
}

impl Scalar for ExactComplex {
    fn from_i64(n: i64) -> Self {
        ExactComplex::new(
            BigRational::from_i64(n).expect("i64 embeds in BigRational"),
            BigRational::zero(),
        )
    }

    fn abs_sq(&self) -> f64 {
        let sq = &self.re * &self.re + &self.im * &self.im;
        sq.to_f64().unwrap_or(f64::INFINITY)
    }

    fn recip_checked(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }

    fn to_re_im(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_re_im(re: f64, im: f64) -> Option<Self> {
        Some(ExactComplex::new(
            BigRational::from_float(re)?,
            BigRational::from_float(im)?,
        ))
    }

    fn scalar_tag() -> &'static str {
        "exact"
    }
}

/// Lift a `Complex64` into exact rational components (every finite `f64` is a
/// dyadic rational, so this embedding is lossless).
pub fn exactify(z: Complex64) -> Option<ExactComplex> {
    ExactComplex::from_re_im(z.re, z.im)
}
