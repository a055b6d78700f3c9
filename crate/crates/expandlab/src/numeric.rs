//! Canonical exact rationals with a compact inline fast path.
//!
//! Every value is stored fully reduced: gcd(|num|, den) = 1 and den >= 1.
//! Values whose reduced numerator and denominator both fit in i64 (with
//! i64::MIN excluded so negation and absolute value stay closed) are always
//! stored inline; only larger values box a `BigRational`. Because fitting
//! values are never boxed, equality and hashing can look at the
//! representation directly and still agree for values reached through
//! different arithmetic routes.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest magnitude allowed in the inline representation.
const SMALL_LIMIT: u128 = i64::MAX as u128;

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

/// Exact rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq)]
pub struct Rational(Repr);

/// Errors from rational construction and text parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumericError {
    ZeroDenominator,
    Parse { input: String, reason: &'static str },
}

impl fmt::Display for NumericError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericError::ZeroDenominator => write!(f, "zero denominator"),
            NumericError::Parse { input, reason } => {
                write!(f, "cannot parse {input:?} as a rational: {reason}")
            }
        }
    }
}

impl std::error::Error for NumericError {}

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small { num: 0, den: 1 });
    pub const ONE: Rational = Rational(Repr::Small { num: 1, den: 1 });

    /// Canonical constructor: reduces and normalizes the sign so den >= 1.
    pub fn new(num: i64, den: i64) -> Result<Rational, NumericError> {
        if den == 0 {
            return Err(NumericError::ZeroDenominator);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    /// Arbitrary-precision canonical constructor.
    pub fn from_big(num: BigInt, den: BigInt) -> Result<Rational, NumericError> {
        if den.is_zero() {
            return Err(NumericError::ZeroDenominator);
        }
        Ok(Self::demote(BigRational::new(num, den)))
    }

    /// Internal total constructor; den must be nonzero.
    fn from_i128(num: i128, den: i128) -> Rational {
        debug_assert!(den != 0);
        if num == 0 {
            return Rational::ZERO;
        }
        let neg = (num < 0) != (den < 0);
        let mut un = num.unsigned_abs();
        let mut ud = den.unsigned_abs();
        let g = num_integer::gcd(un, ud);
        un /= g;
        ud /= g;
        if un <= SMALL_LIMIT && ud <= SMALL_LIMIT {
            let n = if neg { -(un as i64) } else { un as i64 };
            Rational(Repr::Small { num: n, den: ud as i64 })
        } else {
            let mut n = BigInt::from(un);
            if neg {
                n = -n;
            }
            // Components are reduced and sign-normalized above.
            Rational(Repr::Big(Box::new(BigRational::new_raw(n, BigInt::from(ud)))))
        }
    }

    /// Repack a canonical `BigRational` inline when it fits.
    fn demote(r: BigRational) -> Rational {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small { num: n, den: d });
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numerator(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denominator(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Whether the canonical inline representation is in use; tests assert
    /// that demotion keeps this in sync with the fits-small invariant.
    #[cfg(test)]
    fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small { num: 1, den: 1 })
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(b) => b.numer().is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(b) => b.numer().is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.denom().is_one(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Rational> {
        match &self.0 {
            Repr::Small { num: 0, .. } => None,
            Repr::Small { num, den } => Some(Self::from_i128(*den as i128, *num as i128)),
            Repr::Big(b) => Some(Self::demote(b.recip())),
        }
    }

    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (&self.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                Self::from_i128(*n1 as i128 * *d2 as i128, *d1 as i128 * *n2 as i128)
            }
            _ => Self::demote(self.to_big() / rhs.to_big()),
        })
    }

    /// Exponentiation by squaring with exact arithmetic.
    pub fn pow(&self, exp: u32) -> Rational {
        let mut base = self.clone();
        let mut exp = exp;
        let mut acc = Rational::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Largest integer <= self.
    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, den } => BigInt::from(Integer::div_floor(num, den)),
            Repr::Big(b) => Integer::div_floor(b.numer(), b.denom()),
        }
    }

    /// Approximate value for report-only fields; never used in verdicts.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Parse an integer `p`, a fraction `p/q`, or a finite decimal `d.dd`,
    /// each with an optional leading minus (also allowed after `/`).
    pub fn parse_scalar(text: &str) -> Result<Rational, NumericError> {
        let err = |reason: &'static str| NumericError::Parse { input: text.to_owned(), reason };
        let b = text.as_bytes();
        let mut i = 0;
        let neg = if b.first() == Some(&b'-') {
            i += 1;
            true
        } else {
            false
        };
        let int_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == int_start {
            return Err(err("expected digits"));
        }
        let int_digits = &text[int_start..i];
        let mantissa = |digits: &str| BigInt::from_str(digits).expect("digits are ascii");
        let signed = |v: BigInt| if neg { -v } else { v };
        match b.get(i) {
            None => Rational::from_big(signed(mantissa(int_digits)), BigInt::from(1)),
            Some(b'.') => {
                i += 1;
                let frac_start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if i == frac_start {
                    return Err(err("expected digits after decimal point"));
                }
                if i != b.len() {
                    return Err(err("trailing characters after decimal digits"));
                }
                let frac_digits = &text[frac_start..i];
                let scale = num_traits::pow(BigInt::from(10u8), frac_digits.len());
                let num = mantissa(int_digits) * &scale + mantissa(frac_digits);
                Rational::from_big(signed(num), scale)
            }
            Some(b'/') => {
                i += 1;
                let den_neg = if b.get(i) == Some(&b'-') {
                    i += 1;
                    true
                } else {
                    false
                };
                let den_start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if i == den_start {
                    return Err(err("expected digits after '/'"));
                }
                if i != b.len() {
                    return Err(err("trailing characters after denominator"));
                }
                let mut den = mantissa(&text[den_start..i]);
                if den_neg {
                    den = -den;
                }
                Rational::from_big(signed(mantissa(int_digits)), den)
            }
            Some(_) => Err(err("unexpected character")),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse_scalar(s)
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Canonical form guarantees equal values share a variant, so the
        // discriminant plus component hashes is consistent with Eq.
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                // Cross products of i64 values cannot overflow i128.
                (*n1 as i128 * *d2 as i128).cmp(&(*n2 as i128 * *d1 as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

macro_rules! small_int_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(v: $t) -> Rational {
                Rational::from_i128(v as i128, 1)
            }
        }
    )*};
}

small_int_from!(i32, i64, u32, u64, usize);

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let num = *n1 as i128 * *d2 as i128 + *n2 as i128 * *d1 as i128;
                Rational::from_i128(num, *d1 as i128 * *d2 as i128)
            }
            _ => Rational::demote(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                let num = *n1 as i128 * *d2 as i128 - *n2 as i128 * *d1 as i128;
                Rational::from_i128(num, *d1 as i128 * *d2 as i128)
            }
            _ => Rational::demote(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small { num: n1, den: d1 }, Repr::Small { num: n2, den: d2 }) => {
                Rational::from_i128(*n1 as i128 * *n2 as i128, *d1 as i128 * *d2 as i128)
            }
            _ => Rational::demote(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for &Rational {
    type Output = Rational;

    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero rational")
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match &self.0 {
            // i64::MIN never occurs inline, so negation stays in range.
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den: *den }),
            Repr::Big(b) => Rational::demote(-(**b).clone()),
        }
    }
}

macro_rules! owned_ops {
    ($($trait:ident::$m:ident),*) => {$(
        impl $trait for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $trait::$m(&self, &rhs)
            }
        }
    )*};
}

owned_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        -&self
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
