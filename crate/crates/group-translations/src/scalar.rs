//! Exact rational scalars and conversions.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` keeps fractions reduced with a
/// positive denominator, so equality is canonical.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    BigRational::zero()
}

pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite f64 into a rational.
pub fn from_f64_exact(x: f64) -> Result<Scalar> {
    BigRational::from_float(x).ok_or_else(|| Error::Malformed(format!("non-finite float {x}")))
}

/// Nearest rational with denominator `10^digits`.
pub fn round_decimal(x: f64, digits: u32) -> Result<Scalar> {
    let exact = from_f64_exact(x)?;
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = &exact * BigRational::from_integer(scale.clone());
    Ok(BigRational::new(round_to_int(&scaled), scale))
}

fn round_to_int(x: &Scalar) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if x.is_negative() {
        -round_to_int(&-x)
    } else {
        (x + half).floor().to_integer()
    }
}

/// Formats as `"p"` for integers and `"p/q"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"`, `"p/q"`, or a plain decimal such as `"-1.25"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Decode(format!("invalid rational literal {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = frac.len() as u32;
        let frac_int: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(digits);
        let mag = BigRational::from_integer(whole.abs()) + BigRational::new(frac_int, scale);
        Ok(if neg { -mag } else { mag })
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}
