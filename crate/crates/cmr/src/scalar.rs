//! Scalar fields: IEEE double-precision complex numbers and exact Gaussian
//! rationals (complex numbers with arbitrary-precision rational parts).
//!
//! Every matrix and tensor in the crate is generic over [`Scalar`], so the
//! same construction code runs in floating point and, for the rational model,
//! in exact arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{CmrError, Result};

/// Identifies the scalar field a value lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMode {
    /// IEEE double-precision complex floating point.
    Complex64,
    /// Exact Gaussian rationals.
    ExactGaussian,
}

impl ScalarMode {
    /// Tag used in the matrix JSON schema.
    pub fn tag(self) -> &'static str {
        match self {
            ScalarMode::Complex64 => "c64",
            ScalarMode::ExactGaussian => "exact",
        }
    }
}

/// Complex double-precision scalar, the default field.
pub type C64 = Complex64;

/// The scalar contract shared by the float and exact fields.
///
/// `+`, `-`, `*` are total; division is exposed through [`Scalar::recip`] so
/// division by zero surfaces as an error rather than a NaN or a panic.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ScalarMode;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_int(v: i64) -> Self;
    /// Exact ratio `num/den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Embed a finite float. Exact mode embeds the dyadic value exactly.
    fn from_f64(x: f64) -> Self;
    /// Embed a complex float (used to route float-mode results back into a
    /// generic context; exact mode embeds both parts dyadically).
    fn from_c64(z: Complex64) -> Self;
    /// Embed an arbitrary-precision rational (exactly in exact mode, by
    /// nearest double otherwise).
    fn from_big_rational(re: &BigRational) -> Self;

    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    /// Multiplicative inverse; error on zero.
    fn recip(&self) -> Result<Self>;
    /// Squared modulus, converted to `f64`.
    fn abs_sq(&self) -> f64;
    fn to_c64(&self) -> Complex64;

    /// Exact rational parts `(re, im)` when the field carries them.
    fn exact_parts(&self) -> Option<(BigRational, BigRational)> {
        None
    }

    fn abs(&self) -> f64 {
        self.abs_sq().sqrt()
    }
    /// Real part as `f64` (coordinates and couplings are real-valued scalars).
    fn re_f64(&self) -> f64 {
        self.to_c64().re
    }
    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.recip()?)
    }
}

impl Scalar for Complex64 {
    const MODE: ScalarMode = ScalarMode::Complex64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn from_big_rational(re: &BigRational) -> Self {
        Complex64::new(re.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn recip(&self) -> Result<Self> {
        if Scalar::is_zero(self) {
            return Err(CmrError::Domain("division by zero".into()));
        }
        Ok(Complex64::new(1.0, 0.0) / self)
    }
    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Exact Gaussian rational: `re + im * sqrt(-1)` with arbitrary-precision
/// rational parts. Arithmetic never rounds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussRat {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::from_rational(big_ratio(num, den))
    }
}

pub fn big_ratio(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Scalar for GaussRat {
    const MODE: ScalarMode = ScalarMode::ExactGaussian;

    fn zero() -> Self {
        GaussRat::from_rational(BigRational::zero())
    }
    fn one() -> Self {
        GaussRat::ratio(1, 1)
    }
    fn i() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: big_ratio(1, 1),
        }
    }
    fn from_int(v: i64) -> Self {
        GaussRat::ratio(v, 1)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat::ratio(num, den)
    }
    fn from_f64(x: f64) -> Self {
        GaussRat::from_rational(
            BigRational::from_f64(x).expect("cannot embed a non-finite float"),
        )
    }
    fn from_c64(z: Complex64) -> Self {
        GaussRat {
            re: BigRational::from_f64(z.re).expect("cannot embed a non-finite float"),
            im: BigRational::from_f64(z.im).expect("cannot embed a non-finite float"),
        }
    }
    fn from_big_rational(re: &BigRational) -> Self {
        GaussRat::from_rational(re.clone())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn recip(&self) -> Result<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return Err(CmrError::Domain("division by zero".into()));
        }
        Ok(GaussRat {
            re: &self.re / &norm,
            im: -(&self.im / &norm),
        })
    }
    fn abs_sq(&self) -> f64 {
        (&self.re * &self.re + &self.im * &self.im)
            .to_f64()
            .unwrap_or(f64::INFINITY)
    }
    fn exact_parts(&self) -> Option<(BigRational, BigRational)> {
        Some((self.re.clone(), self.im.clone()))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{} + ({})i", self.re, self.im)
        }
    }
}

/// Render a rational as the `"p/q"` form used by the JSON schema.
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"`, a bare integer, or a plain decimal like `"-0.25"`.
pub fn rational_from_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| CmrError::Argument(format!("bad rational numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| CmrError::Argument(format!("bad rational denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(CmrError::Argument(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" {
            "0".to_string()
        } else {
            int_part.trim_start_matches('+').to_string()
        };
        let i: BigInt = int_digits
            .parse()
            .map_err(|_| CmrError::Argument(format!("bad decimal {s:?}")))?;
        let frac_digits = frac_part.trim();
        if !frac_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(CmrError::Argument(format!("bad decimal {s:?}")));
        }
        let fnum: BigInt = if frac_digits.is_empty() {
            BigInt::zero()
        } else {
            frac_digits
                .parse()
                .map_err(|_| CmrError::Argument(format!("bad decimal {s:?}")))?
        };
        let scale = BigInt::from(10u32).pow(frac_digits.len() as u32);
        let frac = BigRational::new(fnum, scale);
        let whole = BigRational::from_integer(i.abs());
        let value = whole + frac;
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| CmrError::Argument(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(n))
}
