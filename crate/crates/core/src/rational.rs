//! Exact rationals stored as reduced `i64` fractions, promoted to arbitrary precision
//! when a result does not fit.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, ParseRatioError};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Exact rational number. The representation is canonical: a value whose reduced
/// numerator and denominator fit in `i64` (excluding `i64::MIN`) is always stored small.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    /// `den > 0`, `gcd(num, den) = 1`.
    Small { num: i64, den: i64 },
    Big(BigRational),
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn small(x: i128) -> Option<i64> {
    i64::try_from(x).ok().filter(|&v| v != i64::MIN)
}

impl Rational {
    /// Panics when `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Self::from_big(BigRational::new(num, den))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) if num != i64::MIN && den != i64::MIN => Rational(Repr::Small { num, den }),
            _ => Rational(Repr::Big(r)),
        }
    }

    /// `num/den` for `den ≠ 0` with both operands bounded by `2¹²⁷` in magnitude.
    fn from_i128(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num.unsigned_abs(), den as u128) as i128;
        let (num, den) = (num / g, den / g);
        match (small(num), small(den)) {
            (Some(num), Some(den)) => Rational(Repr::Small { num, den }),
            _ => Rational(Repr::Big(BigRational::new_raw(num.into(), den.into()))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw((*num).into(), (*den).into()),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => (*num).into(),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => (*den).into(),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// Panics on zero.
    pub fn recip(&self) -> Self {
        Self::one().div_ref(self)
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (&Repr::Small { num: an, den: ad }, &Repr::Small { num: bn, den: bd }) => {
                if ad == bd {
                    Self::from_i128(an as i128 + bn as i128, ad as i128)
                } else {
                    Self::from_i128(an as i128 * bd as i128 + bn as i128 * ad as i128, ad as i128 * bd as i128)
                }
            }
            _ => Self::from_big(self.to_big() + rhs.to_big()),
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (&Repr::Small { num: an, den: ad }, &Repr::Small { num: bn, den: bd }) => {
                Self::from_i128(an as i128 * bn as i128, ad as i128 * bd as i128)
            }
            _ => Self::from_big(self.to_big() * rhs.to_big()),
        }
    }

    fn div_ref(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (&Repr::Small { num: an, den: ad }, &Repr::Small { num: bn, den: bd }) => {
                assert!(bn != 0, "division by zero rational");
                Self::from_i128(an as i128 * bd as i128, ad as i128 * bn as i128)
            }
            _ => Self::from_big(self.to_big() / rhs.to_big()),
        }
    }

    fn rem_ref(&self, rhs: &Self) -> Self {
        Self::from_big(self.to_big() % rhs.to_big())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => (num, den).hash(state),
            Repr::Big(r) => r.hash(state),
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (&Repr::Small { num: an, den: ad }, &Repr::Small { num: bn, den: bd }) => {
                (an as i128 * bd as i128).cmp(&(bn as i128 * ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident, $imp:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }

        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                self.$imp(rhs)
            }
        }

        impl<'b> $tr<&'b Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                self.$imp(rhs)
            }
        }

        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }

        impl<'a> $assign_tr<&'a Rational> for Rational {
            fn $assign(&mut self, rhs: &'a Rational) {
                *self = self.$imp(rhs);
            }
        }

        impl $assign_tr for Rational {
            fn $assign(&mut self, rhs: Rational) {
                *self = self.$imp(&rhs);
            }
        }
    };
}

impl Rational {
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&-rhs.clone())
    }
}

forward_binop!(Add, add, AddAssign, add_assign, add_ref);
forward_binop!(Sub, sub, SubAssign, sub_assign, sub_ref);
forward_binop!(Mul, mul, MulAssign, mul_assign, mul_ref);
forward_binop!(Div, div, DivAssign, div_assign, div_ref);
forward_binop!(Rem, rem, RemAssign, rem_assign, rem_ref);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den }),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }
}

impl Num for Rational {
    type FromStrRadixErr = ParseRatioError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ParseRatioError> {
        BigRational::from_str_radix(s, radix).map(Self::from_big)
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self - other
        }
    }

    fn signum(&self) -> Self {
        match self.cmp(&Self::zero()) {
            Ordering::Less => -Self::one(),
            Ordering::Equal => Self::zero(),
            Ordering::Greater => Self::one(),
        }
    }

    fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }
}

impl FromPrimitive for Rational {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_i128(n as i128, 1))
    }

    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_i128(n as i128, 1))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_f64(x).map(Self::from_big)
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        self.to_big().to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_big().to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        const EXACT: i64 = 1 << 53;
        match &self.0 {
            // both operands are exact doubles, so the quotient is correctly rounded
            Repr::Small { num, den } if num.abs() <= EXACT && *den <= EXACT => Some(*num as f64 / *den as f64),
            _ => self.to_big().to_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_big(big(n, d))
    }

    #[test]
    fn promotes_and_demotes() {
        let m = r(i64::MAX, 1);
        let sq = &m * &m;
        assert!(matches!(sq.0, Repr::Big(_)));
        assert_eq!(sq.to_big(), big(i64::MAX, 1) * big(i64::MAX, 1));
        let back = &sq / &m;
        assert!(matches!(back.0, Repr::Small { .. }));
        assert_eq!(back, m);
        assert_eq!(-r(i64::MAX, 1) - r(1, 1), Rational::from_big(big(i64::MIN, 1)));
    }

    #[test]
    fn formatting_and_signs() {
        assert_eq!(r(6, -4).to_string(), "-3/2");
        assert_eq!(r(0, 5).to_string(), "0");
        assert!(r(-1, 3).is_negative());
        assert_eq!(r(-1, 3).abs(), r(1, 3));
        assert_eq!(r(2, 7).to_f64(), Some(2.0 / 7.0));
    }

    proptest! {
        #[test]
        fn agrees_with_big_rationals(
            a in any::<i64>(), b in 1i64..i64::MAX, c in any::<i64>(), d in 1i64..i64::MAX,
        ) {
            let (x, y) = (Rational::from_big(big(a, b)), Rational::from_big(big(c, d)));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            prop_assert_eq!(x.to_f64(), bx.to_f64());
        }

        #[test]
        fn small_operands_stay_small(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let s = &r(a, b) * &r(c, d) + r(a, d);
            let is_small = matches!(s.0, Repr::Small { .. });
            prop_assert!(is_small);
        }
    }
}
