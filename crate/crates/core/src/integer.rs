//! Arbitrary-precision integers with an inline fast path.
//!
//! Almost every entry that appears in the boundary matrices of this crate fits in
//! a machine word, so values are stored as `i64` and promoted to a heap-backed
//! [`BigInt`] only when an operation overflows. Results are always demoted back
//! to the small representation when they fit, which keeps equality and hashing
//! structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Integer {
    Small(i64),
    Large(BigInt),
}

impl Integer {
    pub const ZERO: Integer = Integer::Small(0);
    pub const ONE: Integer = Integer::Small(1);

    fn from_big(value: BigInt) -> Integer {
        match value.to_i64() {
            Some(v) => Integer::Small(v),
            None => Integer::Large(value),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Integer::Small(v) => BigInt::from(*v),
            Integer::Large(v) => v.clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Integer::Small(v) => Some(*v),
            Integer::Large(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Integer::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Integer::Small(1))
    }

    /// `true` for `1` and `-1`.
    pub fn is_unit(&self) -> bool {
        matches!(self, Integer::Small(1) | Integer::Small(-1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Integer::Small(v) => *v < 0,
            Integer::Large(v) => v.is_negative(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Integer::Small(v) => v.signum() as i32,
            Integer::Large(v) => {
                if v.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Integer {
        match self {
            Integer::Small(v) => match v.checked_abs() {
                Some(a) => Integer::Small(a),
                None => Integer::from_big(BigInt::from(*v).abs()),
            },
            Integer::Large(v) => Integer::from_big(v.abs()),
        }
    }

    /// Floor division and the matching non-negative remainder for a positive
    /// divisor, Euclidean otherwise. Panics on division by zero.
    pub fn div_rem_euclid(&self, divisor: &Integer) -> (Integer, Integer) {
        assert!(!divisor.is_zero(), "integer division by zero");
        if let (Integer::Small(a), Integer::Small(b)) = (self, divisor) {
            if let (Some(q), Some(r)) = (a.checked_div_euclid(*b), a.checked_rem_euclid(*b)) {
                return (Integer::Small(q), Integer::Small(r));
            }
        }
        let a = self.to_big();
        let b = divisor.to_big();
        let (mut q, mut r) = a.div_mod_floor(&b);
        if r.is_negative() {
            // only reachable for a negative divisor
            r -= &b;
            q += 1;
        }
        (Integer::from_big(q), Integer::from_big(r))
    }

    /// Quotient rounded so that the remainder has absolute value at most |d|/2.
    pub fn div_round(&self, divisor: &Integer) -> Integer {
        let (q, r) = self.div_rem_euclid(divisor);
        let twice = &r + &r;
        if twice.abs() > divisor.abs() {
            if divisor.is_negative() {
                &q - &Integer::ONE
            } else {
                &q + &Integer::ONE
            }
        } else {
            q
        }
    }

    pub fn is_divisible_by(&self, divisor: &Integer) -> bool {
        if divisor.is_zero() {
            return self.is_zero();
        }
        self.div_rem_euclid(divisor).1.is_zero()
    }

    pub fn gcd(&self, other: &Integer) -> Integer {
        match (self, other) {
            (Integer::Small(a), Integer::Small(b)) => {
                let g = (*a as i128).unsigned_abs().gcd(&(*b as i128).unsigned_abs());
                match i64::try_from(g) {
                    Ok(v) => Integer::Small(v),
                    Err(_) => Integer::from_big(BigInt::from(g)),
                }
            }
            _ => Integer::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    /// Residue in `0..p` for a positive word-sized modulus.
    pub fn rem_u64(&self, p: u64) -> u64 {
        match self {
            Integer::Small(v) => (*v as i128).rem_euclid(p as i128) as u64,
            Integer::Large(v) => {
                let r = v.mod_floor(&BigInt::from(p));
                r.to_u64().expect("residue fits")
            }
        }
    }
}

impl Default for Integer {
    fn default() -> Self {
        Integer::ZERO
    }
}

impl From<i64> for Integer {
    fn from(v: i64) -> Self {
        Integer::Small(v)
    }
}

impl From<i32> for Integer {
    fn from(v: i32) -> Self {
        Integer::Small(v as i64)
    }
}

impl From<usize> for Integer {
    fn from(v: usize) -> Self {
        match i64::try_from(v) {
            Ok(v) => Integer::Small(v),
            Err(_) => Integer::Large(BigInt::from(v)),
        }
    }
}

impl From<BigInt> for Integer {
    fn from(v: BigInt) -> Self {
        Integer::from_big(v)
    }
}

impl Ord for Integer {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Integer::Small(a), Integer::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Integer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn add(self, rhs: &'a Integer) -> Integer {
        if let (Integer::Small(a), Integer::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_add(*b) {
                return Integer::Small(s);
            }
        }
        Integer::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn sub(self, rhs: &'a Integer) -> Integer {
        if let (Integer::Small(a), Integer::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_sub(*b) {
                return Integer::Small(s);
            }
        }
        Integer::from_big(self.to_big() - rhs.to_big())
    }
}

impl<'a> Mul<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn mul(self, rhs: &'a Integer) -> Integer {
        if let (Integer::Small(a), Integer::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_mul(*b) {
                return Integer::Small(s);
            }
        }
        Integer::from_big(self.to_big() * rhs.to_big())
    }
}

impl Add for Integer {
    type Output = Integer;
    fn add(self, rhs: Integer) -> Integer {
        &self + &rhs
    }
}

impl Sub for Integer {
    type Output = Integer;
    fn sub(self, rhs: Integer) -> Integer {
        &self - &rhs
    }
}

impl Mul for Integer {
    type Output = Integer;
    fn mul(self, rhs: Integer) -> Integer {
        &self * &rhs
    }
}

impl Neg for &Integer {
    type Output = Integer;
    fn neg(self) -> Integer {
        match self {
            Integer::Small(v) => match v.checked_neg() {
                Some(n) => Integer::Small(n),
                None => Integer::from_big(-BigInt::from(*v)),
            },
            Integer::Large(v) => Integer::from_big(-v),
        }
    }
}

impl Neg for Integer {
    type Output = Integer;
    fn neg(self) -> Integer {
        -&self
    }
}

impl AddAssign<&Integer> for Integer {
    fn add_assign(&mut self, rhs: &Integer) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Integer> for Integer {
    fn sub_assign(&mut self, rhs: &Integer) {
        *self = &*self - rhs;
    }
}

impl Zero for Integer {
    fn zero() -> Self {
        Integer::ZERO
    }
    fn is_zero(&self) -> bool {
        Integer::is_zero(self)
    }
}

impl One for Integer {
    fn one() -> Self {
        Integer::ONE
    }
}

impl fmt::Display for Integer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integer::Small(v) => write!(f, "{v}"),
            Integer::Large(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Integer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Word-sized values serialize as JSON numbers, larger ones as decimal strings.
impl Serialize for Integer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Integer::Small(v) => serializer.serialize_i64(*v),
            Integer::Large(v) => serializer.serialize_str(&v.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Integer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(Integer::Small(v)),
            Repr::Text(s) => s
                .parse::<BigInt>()
                .map(Integer::from_big)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = &Integer::Small(i64::MAX) + &Integer::ONE;
        assert!(matches!(big, Integer::Large(_)));
        let back = &big - &Integer::ONE;
        assert_eq!(back, Integer::Small(i64::MAX));
        let sq = &Integer::Small(i64::MIN) * &Integer::Small(-1);
        assert_eq!(sq.to_big(), -BigInt::from(i64::MIN));
        assert_eq!((-&Integer::Small(i64::MIN)).to_big(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn gcd_and_division() {
        assert_eq!(Integer::from(12).gcd(&Integer::from(-18)), Integer::from(6));
        assert_eq!(Integer::from(0).gcd(&Integer::from(0)), Integer::ZERO);
        let (q, r) = Integer::from(-7).div_rem_euclid(&Integer::from(3));
        assert_eq!((q, r), (Integer::from(-3), Integer::from(2)));
        let (q, r) = Integer::from(7).div_rem_euclid(&Integer::from(-3));
        assert_eq!(&(&q * &Integer::from(-3)) + &r, Integer::from(7));
        assert!(!r.is_negative());
        assert_eq!(Integer::from(7).div_round(&Integer::from(3)), Integer::from(2));
        assert_eq!(Integer::from(8).div_round(&Integer::from(3)), Integer::from(3));
    }

    #[test]
    fn serde_round_trip_large() {
        let big = &Integer::Small(i64::MAX) * &Integer::Small(i64::MAX);
        let text = serde_json::to_string(&big).unwrap();
        let back: Integer = serde_json::from_str(&text).unwrap();
        assert_eq!(back, big);
        assert_eq!(serde_json::to_string(&Integer::from(-4)).unwrap(), "-4");
    }

    proptest! {
        #[test]
        fn arithmetic_matches_bigint(a in any::<i64>(), b in any::<i64>()) {
            let (x, y) = (Integer::from(a), Integer::from(b));
            let (ba, bb) = (BigInt::from(a), BigInt::from(b));
            prop_assert_eq!((&x + &y).to_big(), &ba + &bb);
            prop_assert_eq!((&x - &y).to_big(), &ba - &bb);
            prop_assert_eq!((&x * &y).to_big(), &ba * &bb);
            if b != 0 {
                let (q, r) = x.div_rem_euclid(&y);
                prop_assert_eq!(&(&q * &y) + &r, x.clone());
                prop_assert!(!r.is_negative() && r < y.abs());
            }
        }
    }
}
