//! Coefficient fields: exact rationals and prime fields `F_p` with `p < 2^31`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Runtime selector for the coefficient field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[derive(Default)]
pub enum FieldSpec {
    #[default]
    Rationals,
    PrimeField(u32),
}

impl FieldSpec {
    /// Validated prime field of order `p`.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        Ok(FieldSpec::PrimeField(p as u32))
    }

    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(self) -> u32 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => p,
        }
    }
}


impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = String;

    /// Accepts `q` or `fp:<p>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("fp:")
            .ok_or_else(|| format!("expected `q` or `fp:<p>`, got `{s}`"))?;
        let p: u64 = p.parse().map_err(|_| format!("bad prime `{p}`"))?;
        FieldSpec::prime(p).map_err(|e| e.to_string())
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Field arithmetic used by the exact matrix routines.
///
/// Elements are always kept in canonical form, so `==` on elements is equality
/// in the field.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// `a -= b * c`.
    fn sub_mul_assign(&self, a: &mut Self::Elem, b: &Self::Elem, c: &Self::Elem) {
        *a = self.sub(a, &self.mul(b, c));
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

/// `F_p` with machine-word arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        FieldSpec::prime(p as u64)?;
        Ok(PrimeField { p })
    }

    pub fn order(&self) -> u32 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::PrimeField(self.p)
    }

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1 % self.p
    }

    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p as u64) as u32
    }

    fn sub(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + self.p as u64 - *b as u64) % self.p as u64) as u32
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }

    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero in F_{}", self.p);
        // Fermat: a^(p-2)
        let p = self.p as u64;
        let mut base = *a as u64;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }

    fn sub_mul_assign(&self, a: &mut u32, b: &u32, c: &u32) {
        let p = self.p as u64;
        let prod = (*b as u64 * *c as u64) % p;
        *a = ((*a as u64 + p - prod) % p) as u32;
    }
}

/// Exact rational number in lowest terms.
///
/// Values whose numerator and denominator fit in an `i64` use the inline
/// representation; everything else falls back to arbitrary precision. The
/// representation is canonical, so derived equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    /// `num / den` with `den > 0` and `gcd(num, den) = 1`.
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn integer(v: i64) -> Self {
        Rational::Small(v, 1)
    }

    /// Reduces `num / den` (den != 0) into canonical form.
    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Rational::Small(0, 1);
        }
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        if g > 1 {
            num /= g;
            den /= g;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational::Small(n, d),
            _ => Rational::Big(BigRational::new_raw(BigInt::from(num), BigInt::from(den))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational::new normalizes; shrink when it fits.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational::Small(n, d);
            }
        }
        Rational::Big(r)
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn numer_denom(&self) -> (BigInt, BigInt) {
        let b = self.to_big();
        (b.numer().clone(), b.denom().clone())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) => write!(f, "{r}"),
        }
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }

    fn zero(&self) -> Rational {
        Rational::Small(0, 1)
    }

    fn one(&self) -> Rational {
        Rational::Small(1, 1)
    }

    fn from_i64(&self, v: i64) -> Rational {
        if v == i64::MIN {
            Rational::Big(BigRational::from_integer(BigInt::from(v)))
        } else {
            Rational::Small(v, 1)
        }
    }

    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        match (a, b) {
            (Rational::Small(0, _), _) => b.clone(),
            (_, Rational::Small(0, _)) => a.clone(),
            (Rational::Small(an, ad), Rational::Small(bn, bd)) => {
                let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
                if ad == bd {
                    Rational::from_i128(an + bn, ad)
                } else {
                    match (an * bd).checked_add(bn * ad) {
                        Some(num) => Rational::from_i128(num, ad * bd),
                        None => Rational::from_big(a.to_big() + b.to_big()),
                    }
                }
            }
            _ => Rational::from_big(a.to_big() + b.to_big()),
        }
    }

    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        match (a, b) {
            (Rational::Small(0, _), _) | (_, Rational::Small(0, _)) => self.zero(),
            (Rational::Small(1, 1), _) => b.clone(),
            (_, Rational::Small(1, 1)) => a.clone(),
            (Rational::Small(an, ad), Rational::Small(bn, bd)) => Rational::from_i128(
                *an as i128 * *bn as i128,
                *ad as i128 * *bd as i128,
            ),
            _ => Rational::from_big(a.to_big() * b.to_big()),
        }
    }

    fn neg(&self, a: &Rational) -> Rational {
        match a {
            Rational::Small(n, d) => Rational::Small(-n, *d),
            Rational::Big(r) => Rational::from_big(-r),
        }
    }

    fn inv(&self, a: &Rational) -> Rational {
        match a {
            Rational::Small(0, _) => panic!("inverse of zero in Q"),
            Rational::Small(n, d) => Rational::from_i128(*d as i128, *n as i128),
            Rational::Big(r) => Rational::from_big(r.recip()),
        }
    }

    fn is_one(&self, a: &Rational) -> bool {
        matches!(a, Rational::Small(1, 1))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl From<&Rational> for BigRational {
    fn from(r: &Rational) -> Self {
        r.to_big()
    }
}

impl Rational {
    pub fn one() -> Self {
        Rational::Small(1, 1)
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(b) => b.denom().is_one(),
        }
    }
}
