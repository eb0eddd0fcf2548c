//! Scalar backends: exact rationals and `f64`.
//!
//! Every algebraic routine in [`crate::hcore`] and [`crate::sigforms`] is generic over
//! [`Scalar`]. The rank/nullspace/inertia kernels are dispatched through the trait so
//! that exact arithmetic uses elimination with exact zero tests while `f64` goes
//! through SVD and symmetric eigendecomposition.

use std::fmt::{self, Debug};
use std::ops::{AddAssign, MulAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Signature};

pub use crate::rational::Rational;

/// Which arithmetic backend a computation runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Float,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Exact => f.write_str("exact"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ScalarMode::Exact),
            "float" => Ok(ScalarMode::Float),
            other => Err(Error::Parse(format!("unknown scalar mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + for<'a> AddAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    const MODE: ScalarMode;

    /// Zero test. Exact scalars ignore `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Stable textual form used for hashing and JSON export.
    fn canonical_string(&self) -> String;

    /// Square root when it exists in this backend (always for non-negative floats,
    /// only for perfect squares over the rationals).
    fn try_sqrt(&self) -> Option<Self>;

    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Result<Self>;

    fn mat_nullspace(m: &Mat<Self>, tol: f64) -> Vec<Vec<Self>> {
        linalg::rref_nullspace(m, tol)
    }

    fn mat_rank(m: &Mat<Self>, tol: f64) -> usize {
        linalg::rref_rank(m, tol)
    }

    fn mat_inertia(m: &Mat<Self>, tol: f64) -> Signature {
        linalg::congruence_inertia(m, tol)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn canonical_string(&self) -> String {
        // -0.0 and 0.0 describe the same algebra
        format!("{:?}", self + 0.0)
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn to_json(&self) -> serde_json::Value {
        // drop the sign of zero
        serde_json::Value::from(if *self == 0.0 { 0.0 } else { *self })
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("{n} is not representable as f64"))),
            serde_json::Value::String(s) => parse_real(s),
            other => Err(Error::Parse(format!("expected a number, found {other}"))),
        }
    }

    fn mat_nullspace(m: &Mat<Self>, tol: f64) -> Vec<Vec<Self>> {
        let ns = linalg::float_nullspace(&m.to_dmatrix(), tol);
        (0..ns.ncols())
            .map(|j| ns.column(j).iter().copied().collect())
            .collect()
    }

    fn mat_rank(m: &Mat<Self>, tol: f64) -> usize {
        linalg::float_rank(&m.to_dmatrix(), tol)
    }

    fn mat_inertia(m: &Mat<Self>, tol: f64) -> Signature {
        linalg::float_inertia(&m.to_dmatrix(), tol)
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn canonical_string(&self) -> String {
        self.to_string()
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (num, den) = (self.numer(), self.denom());
        let (n, d) = (num.sqrt(), den.sqrt());
        (&n * &n == num && &d * &d == den).then(|| Rational::new(n, d))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.canonical_string())
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse(format!("expected a rational, found {other}"))),
        }
    }
}

/// Parses `p/q`, an integer, or a finite decimal (optionally with exponent) into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("`{s}` has a zero denominator")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Parses a finite real number; accepts the same `p/q` syntax as [`parse_rational`].
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let value = if t.contains('/') {
        parse_rational(t)?.as_f64()
    } else {
        t.parse::<f64>()
            .map_err(|_| Error::Parse(format!("`{t}` is not a real number")))?
    };
    if !value.is_finite() {
        return Err(Error::Parse(format!("`{t}` is not finite")));
    }
    Ok(value)
}

/// Converts between backends; rational → float is rounding, float → rational is the exact
/// binary value.
pub fn to_rational(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| Error::Parse(format!("{x} is not finite")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), q(-2, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("1.5e2").unwrap(), q(150, 1));
        assert_eq!(parse_rational("25e-2").unwrap(), q(1, 4));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "nan", "inf", "--1", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
        assert!(parse_real("inf").is_err());
        assert!(parse_real("NaN").is_err());
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(q(6, 4).canonical_string(), "3/2");
        assert_eq!(q(-3, 1).canonical_string(), "-3");
        assert_eq!((-0.0f64).canonical_string(), 0.0f64.canonical_string());
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(q(9, 4).try_sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).try_sqrt(), None);
        assert_eq!(q(-1, 1).try_sqrt(), None);
        assert_eq!(q(0, 1).try_sqrt(), Some(q(0, 1)));
    }

    #[test]
    fn json_round_trip() {
        let x = q(-7, 3);
        assert_eq!(Rational::from_json(&x.to_json()).unwrap(), x);
        assert_eq!(f64::from_json(&0.1f64.to_json()).unwrap(), 0.1);
    }
}
