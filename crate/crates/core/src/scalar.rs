//! Scalar abstraction.
//!
//! Every numerical routine in this crate is generic over [`Real`], a thin
//! extension of [`num_traits::Float`]. It is implemented for `f32`, `f64`
//! and [`Wide`], a 256-bit binary float (237-bit significand, about 71
//! decimal digits).
//!
//! The extended type exists because the Hankel systems built from weighted
//! power sums are exponentially ill-conditioned in the number of nodes: a
//! mixture with six components has sixteen nodes, and recovering them from
//! power sums carried in `f64` loses every significant digit. Forming the
//! power sums and running the solver in [`Wide`] keeps the exact route
//! accurate well past that size.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use f256::f256;
use num_traits::{Float, FromPrimitive, Num, NumAssign, NumCast, One, ToPrimitive, Zero};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Default + fmt::Debug + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal. Exact for `f64` and [`Wide`].
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Nearest `f64`. Used for diagnostics and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Ratio between this type's machine epsilon and `f64`'s. Tolerances
    /// specified for double precision are rescaled by powers of it.
    fn epsilon_ratio() -> f64 {
        Self::epsilon().as_f64() / f64::EPSILON
    }
}

impl Real for f32 {}
impl Real for f64 {}
impl Real for Wide {}

/// Neumaier-compensated sum.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(terms: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// 256-bit binary floating-point scalar.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Wide(pub f256);

impl Wide {
    pub const ZERO: Wide = Wide(f256::ZERO);
    pub const ONE: Wide = Wide(f256::ONE);

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide(f256::from(x))
    }
}

impl From<Wide> for f64 {
    fn from(x: Wide) -> f64 {
        wide_to_f64(x.0)
    }
}

fn ldexp(mut m: f64, mut e: i32) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e)
}

fn wide_to_f64(x: f256) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return if x.is_sign_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if x.eq_zero() {
        return if x.is_sign_negative() { -0.0 } else { 0.0 };
    }
    let (sign, exp, (hi, lo)) = x.as_sign_exp_signif();
    // value = (hi * 2^128 + lo) * 2^exp
    let magnitude = if hi != 0 {
        let shift = 128 - hi.leading_zeros() as i32;
        // keep the top 128 significant bits so the u128 -> f64 rounding
        // sees everything that matters
        let top = if shift == 128 {
            hi
        } else {
            (hi << (128 - shift)) | (lo >> shift)
        };
        ldexp(top as f64, exp + shift)
    } else {
        ldexp(lo as f64, exp)
    };
    if sign == 1 {
        -magnitude
    } else {
        magnitude
    }
}

impl fmt::Debug for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::LowerExp for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&self.0, f)
    }
}

macro_rules! wide_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for Wide {
            type Output = Wide;
            #[inline]
            fn $m(self, rhs: Wide) -> Wide {
                Wide($tr::$m(self.0, rhs.0))
            }
        }
        impl $atr for Wide {
            #[inline]
            fn $am(&mut self, rhs: Wide) {
                self.0 = $tr::$m(self.0, rhs.0);
            }
        }
    };
}

wide_binop!(Add, add, AddAssign, add_assign);
wide_binop!(Sub, sub, SubAssign, sub_assign);
wide_binop!(Mul, mul, MulAssign, mul_assign);
wide_binop!(Div, div, DivAssign, div_assign);
wide_binop!(Rem, rem, RemAssign, rem_assign);

impl Neg for Wide {
    type Output = Wide;
    #[inline]
    fn neg(self) -> Wide {
        Wide(-self.0)
    }
}

impl Sum for Wide {
    fn sum<I: Iterator<Item = Wide>>(iter: I) -> Wide {
        iter.fold(Wide::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Wide> for Wide {
    fn sum<I: Iterator<Item = &'a Wide>>(iter: I) -> Wide {
        iter.fold(Wide::ZERO, |a, b| a + *b)
    }
}

impl Product for Wide {
    fn product<I: Iterator<Item = Wide>>(iter: I) -> Wide {
        iter.fold(Wide::ONE, |a, b| a * b)
    }
}

impl Zero for Wide {
    fn zero() -> Self {
        Wide::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.eq_zero()
    }
}

impl One for Wide {
    fn one() -> Self {
        Wide::ONE
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWideError;

impl fmt::Display for ParseWideError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid 256-bit float literal")
    }
}

impl std::error::Error for ParseWideError {}

impl FromStr for Wide {
    type Err = ParseWideError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse::<f256>().map(Wide).map_err(|_| ParseWideError)
    }
}

impl Num for Wide {
    type FromStrRadixErr = ParseWideError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseWideError);
        }
        s.parse()
    }
}

impl ToPrimitive for Wide {
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(&self.0.trunc()).ok()
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0.trunc()).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(wide_to_f64(self.0))
    }
    fn to_f32(&self) -> Option<f32> {
        Some(wide_to_f64(self.0) as f32)
    }
}

impl FromPrimitive for Wide {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Wide(f256::from(n)))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Wide(f256::from(n)))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Wide(f256::from(n)))
    }
    fn from_f32(n: f32) -> Option<Self> {
        Some(Wide(f256::from(n)))
    }
}

impl NumCast for Wide {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        n.to_f64().map(|x| Wide(f256::from(x)))
    }
}

impl Float for Wide {
    fn nan() -> Self {
        Wide(f256::NAN)
    }
    fn infinity() -> Self {
        Wide(f256::INFINITY)
    }
    fn neg_infinity() -> Self {
        Wide(f256::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Wide(f256::NEG_ZERO)
    }
    fn min_value() -> Self {
        Wide(f256::MIN)
    }
    fn min_positive_value() -> Self {
        Wide(f256::MIN_POSITIVE)
    }
    fn epsilon() -> Self {
        Wide(f256::EPSILON)
    }
    fn max_value() -> Self {
        Wide(f256::MAX)
    }
    fn is_nan(self) -> bool {
        self.0.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.0.is_finite()
    }
    fn is_normal(self) -> bool {
        self.0.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.0.classify()
    }
    fn floor(self) -> Self {
        Wide(self.0.floor())
    }
    fn ceil(self) -> Self {
        Wide(self.0.ceil())
    }
    fn round(self) -> Self {
        Wide(self.0.round())
    }
    fn trunc(self) -> Self {
        Wide(self.0.trunc())
    }
    fn fract(self) -> Self {
        Wide(self.0.fract())
    }
    fn abs(self) -> Self {
        Wide(self.0.abs())
    }
    fn signum(self) -> Self {
        Wide(self.0.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.0.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.0.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        Wide(self.0.mul_add(a.0, b.0))
    }
    fn recip(self) -> Self {
        Wide(self.0.recip())
    }
    fn powi(self, n: i32) -> Self {
        Wide(self.0.powi(n))
    }
    fn powf(self, n: Self) -> Self {
        Wide(self.0.powf(&n.0))
    }
    fn sqrt(self) -> Self {
        Wide(self.0.sqrt())
    }
    fn exp(self) -> Self {
        Wide(self.0.exp())
    }
    fn exp2(self) -> Self {
        Wide(self.0.exp2())
    }
    fn ln(self) -> Self {
        Wide(self.0.ln())
    }
    fn log(self, base: Self) -> Self {
        Wide(self.0.log(&base.0))
    }
    fn log2(self) -> Self {
        Wide(self.0.log2())
    }
    fn log10(self) -> Self {
        Wide(self.0.log10())
    }
    fn max(self, other: Self) -> Self {
        Wide(self.0.max(other.0))
    }
    fn min(self, other: Self) -> Self {
        Wide(self.0.min(other.0))
    }
    fn abs_sub(self, other: Self) -> Self {
        if self <= other {
            Wide::ZERO
        } else {
            self - other
        }
    }
    fn cbrt(self) -> Self {
        Wide(self.0.cbrt())
    }
    fn hypot(self, other: Self) -> Self {
        Wide(self.0.hypot(other.0))
    }
    fn sin(self) -> Self {
        Wide(self.0.sin())
    }
    fn cos(self) -> Self {
        Wide(self.0.cos())
    }
    fn tan(self) -> Self {
        Wide(self.0.tan())
    }
    fn asin(self) -> Self {
        Wide(self.0.asin())
    }
    fn acos(self) -> Self {
        Wide(self.0.acos())
    }
    fn atan(self) -> Self {
        Wide(self.0.atan())
    }
    fn atan2(self, other: Self) -> Self {
        Wide(self.0.atan2(&other.0))
    }
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.0.sin_cos();
        (Wide(s), Wide(c))
    }
    fn exp_m1(self) -> Self {
        Wide(self.0.exp_m1())
    }
    fn ln_1p(self) -> Self {
        Wide(self.0.ln_1p())
    }
    fn sinh(self) -> Self {
        let e = self.exp();
        (e - e.recip()) / Wide::lit(2.0)
    }
    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()) / Wide::lit(2.0)
    }
    fn tanh(self) -> Self {
        let e2 = (self + self).exp();
        (e2 - Wide::ONE) / (e2 + Wide::ONE)
    }
    fn asinh(self) -> Self {
        let mag = (self.abs() + (self * self + Wide::ONE).sqrt()).ln();
        if self.is_sign_negative() {
            -mag
        } else {
            mag
        }
    }
    fn acosh(self) -> Self {
        (self + (self * self - Wide::ONE).sqrt()).ln()
    }
    fn atanh(self) -> Self {
        ((Wide::ONE + self) / (Wide::ONE - self)).ln() / Wide::lit(2.0)
    }
    /// Decodes the nearest `f64`; the extra precision is dropped.
    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(wide_to_f64(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trips_through_wide_exactly() {
        for x in [0.1, -3.75, 1e-300, 6.02e23, 1.0 / 3.0, f64::MAX, -0.0] {
            let w = Wide::lit(x);
            assert_eq!(w.as_f64(), x);
        }
    }

    #[test]
    fn wide_keeps_digits_beyond_f64() {
        let third = Wide::ONE / Wide::lit(3.0);
        let err = (third * Wide::lit(3.0) - Wide::ONE).abs();
        assert!(err < Wide::lit(1e-70));
        // the residual of 1/3 in f64 is visible in Wide
        let gap = Wide::lit(1.0 / 3.0) - third;
        assert!(gap.abs() > Wide::lit(1e-18));
        assert!((third.as_f64() - 1.0 / 3.0).abs() == 0.0);
    }

    #[test]
    fn wide_to_f64_rounds_long_significands() {
        let x = Wide::lit(2.0).sqrt();
        assert_eq!(x.as_f64(), std::f64::consts::SQRT_2);
        let y = Wide::lit(1e-30).sqrt() * Wide::lit(7.0);
        assert!((y.as_f64() - 7e-15).abs() < 1e-29);
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn epsilon_ratio_orders_types() {
        assert_eq!(f64::epsilon_ratio(), 1.0);
        assert!(f32::epsilon_ratio() > 1e8);
        assert!(Wide::epsilon_ratio() < 1e-50);
    }

    #[test]
    fn parse_and_transcendentals() {
        let w: Wide = "2.5".parse().unwrap();
        assert_eq!(w.as_f64(), 2.5);
        assert!((Wide::lit(2.0).ln().exp().as_f64() - 2.0).abs() < 1e-15);
        assert!((Wide::lit(-0.5).asinh().as_f64() - (-0.5f64).asinh()).abs() < 1e-15);
    }
}
