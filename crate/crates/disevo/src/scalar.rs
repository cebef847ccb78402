//! Arithmetic abstraction: exact rationals (the reference mode) and `f64`
//! with a session-wide tolerance for rank decisions.

use std::fmt;
use std::ops::Neg;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar, the reference arithmetic.
pub type Rat = BigRational;

static FLOAT_TOL_BITS: AtomicU64 = AtomicU64::new(0);

const DEFAULT_FLOAT_TOL: f64 = 1e-10;

/// Sets the tolerance used by float-mode rank decisions. Call once per session.
pub fn set_float_tolerance(tol: f64) {
    FLOAT_TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
}

/// Current float-mode tolerance (default 1e-10).
pub fn float_tolerance() -> f64 {
    let bits = FLOAT_TOL_BITS.load(Ordering::Relaxed);
    if bits == 0 {
        DEFAULT_FLOAT_TOL
    } else {
        f64::from_bits(bits)
    }
}

/// Field element usable by the linear algebra kernel and everything above it.
///
/// Implemented for [`Rat`] (exact; zero tests are exact) and `f64`
/// (zero tests use the session tolerance, scaled where a scale is available).
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Signed
    + Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
    + 'static
{
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Zero test at the session tolerance (absolute, scale 1).
    fn is_negligible(&self) -> bool {
        self.is_negligible_scaled(1.0)
    }

    /// Zero test relative to `scale` (the largest magnitude in the
    /// surrounding computation); exact mode ignores the scale.
    fn is_negligible_scaled(&self, scale: f64) -> bool;

    /// Magnitude estimate used only for pivot selection and scale tracking.
    fn magnitude(&self) -> f64;

    /// Parses either "p/q" (exact form) or a plain integer/decimal literal.
    fn parse_str(s: &str) -> Option<Self>;

    /// Serialization form: "p/q" in exact mode, a JSON number otherwise.
    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_negligible_scaled(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn magnitude(&self) -> f64 {
        rat_to_f64(self).abs()
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rat::new(num, den))
        } else if let Ok(n) = s.parse::<BigInt>() {
            Some(Rat::from_integer(n))
        } else {
            // Decimal literal: shift the point into a power-of-ten denominator.
            let (mantissa, frac_digits) = split_decimal(s)?;
            let den = BigInt::from(10u32).pow(frac_digits);
            Some(Rat::new(mantissa, den))
        }
    }

    fn to_json(&self) -> serde_json::Value {
        if self.denom().is_one() {
            serde_json::Value::String(self.numer().to_string())
        } else {
            serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn is_negligible_scaled(&self, scale: f64) -> bool {
        let scale = if scale > 1.0 { scale } else { 1.0 };
        self.abs() <= float_tolerance() * scale
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            Some(num / den)
        } else {
            s.parse().ok()
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

fn split_decimal(s: &str) -> Option<(BigInt, u32)> {
    let (int_part, frac_part) = s.split_once('.')?;
    if !frac_part.chars().all(|c| c.is_ascii_digit()) || frac_part.is_empty() {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mantissa: BigInt = joined.parse().ok()?;
    Some((mantissa, frac_part.len() as u32))
}

/// Approximates a rational as f64 (pivot selection only; never affects results).
pub fn rat_to_f64(r: &Rat) -> f64 {
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::MAX);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::MAX);
    num / den
}
