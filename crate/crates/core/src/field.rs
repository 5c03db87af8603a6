//! Exact scalar arithmetic: arbitrary-precision rationals and odd prime fields.
//!
//! Every scalar knows which field it belongs to; scalars from different fields
//! never take part in the same operation. Rationals are kept in lowest terms
//! with a positive denominator and residues are kept reduced to `0..p`, so
//! structural equality is semantic equality and hashing is stable.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

/// Errors produced by scalar construction and arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Two scalars from different fields met in one operation.
    #[error("scalars from different fields: {0} and {1}")]
    MixedFields(FieldTag, FieldTag),
    /// Division by the zero scalar.
    #[error("division by zero")]
    DivisionByZero,
    /// Text that does not denote a scalar of the requested field.
    #[error("cannot parse {text:?} as a scalar of {field}")]
    Parse { field: FieldTag, text: String },
    /// In GF(p) a denominator reduced to zero mod p.
    #[error("denominator {denom} is divisible by the characteristic {p}")]
    DenominatorDivisibleByP { denom: String, p: u64 },
    /// A modulus that is not an odd prime.
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    /// Text that does not denote a field.
    #[error("field tags are \"q\" or \"gf:P\" for an odd prime P; got {0:?}")]
    BadFieldTag(String),
}

/// The field a scalar lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldTag {
    /// Arbitrary-precision rationals.
    Rationals,
    /// The prime field GF(p) for an odd prime `p`.
    PrimeField(u64),
}

impl FieldTag {
    /// Constructs the GF(p) tag, verifying that `p` is an odd prime.
    pub fn prime_field(p: u64) -> Result<FieldTag, FieldError> {
        if p > 2 && is_prime_u64(p) {
            Ok(FieldTag::PrimeField(p))
        } else {
            Err(FieldError::NotAnOddPrime(p))
        }
    }

    /// The zero scalar of this field.
    pub fn zero(&self) -> FieldScalar {
        match *self {
            FieldTag::Rationals => FieldScalar::from_rational(BigRational::zero()),
            FieldTag::PrimeField(p) => FieldScalar::modular(0, p),
        }
    }

    /// The unit scalar of this field.
    pub fn one(&self) -> FieldScalar {
        self.integer(1)
    }

    /// Embeds a small integer into the field.
    pub fn integer(&self, n: i64) -> FieldScalar {
        match *self {
            FieldTag::Rationals => FieldScalar::from_rational(BigRational::from(BigInt::from(n))),
            FieldTag::PrimeField(p) => {
                FieldScalar::modular((n as i128).rem_euclid(p as i128) as u64, p)
            }
        }
    }

    /// Parses the canonical text form: `p/q` or `p` over the rationals, a
    /// decimal residue (optionally signed or written as a fraction) in GF(p).
    pub fn parse(&self, text: &str) -> Result<FieldScalar, FieldError> {
        let err = || FieldError::Parse {
            field: *self,
            text: text.to_owned(),
        };
        let (num_text, den_text) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (text.trim(), None),
        };
        let num = BigInt::from_str(num_text).map_err(|_| err())?;
        let den = match den_text {
            Some(d) => BigInt::from_str(d).map_err(|_| err())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match *self {
            FieldTag::Rationals => Ok(FieldScalar::from_rational(BigRational::new(num, den))),
            FieldTag::PrimeField(p) => {
                let num = FieldScalar::modular(reduce_bigint_mod(&num, p), p);
                let den_res = reduce_bigint_mod(&den, p);
                if den_res == 0 {
                    return Err(FieldError::DenominatorDivisibleByP {
                        denom: den.to_string(),
                        p,
                    });
                }
                num.div(&FieldScalar::modular(den_res, p))
            }
        }
    }

    /// Draws a scalar uniformly from a fixed finite pool: residues in GF(p),
    /// fractions with bounded numerator and denominator over the rationals.
    pub fn random_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldScalar {
        match *self {
            FieldTag::Rationals => {
                let num: i64 = rng.gen_range(-9999..=9999);
                let den: i64 = rng.gen_range(1..=99);
                FieldScalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            FieldTag::PrimeField(p) => FieldScalar::modular(rng.gen_range(0..p), p),
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => write!(f, "q"),
            FieldTag::PrimeField(p) => write!(f, "gf:{p}"),
        }
    }
}

impl FromStr for FieldTag {
    type Err = FieldError;

    /// Parses `"q"` or `"gf:P"` with `P` an odd prime.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        if s == "q" {
            return Ok(FieldTag::Rationals);
        }
        if let Some(p) = s.strip_prefix("gf:") {
            let p: u64 = p
                .parse()
                .map_err(|_| FieldError::BadFieldTag(s.to_owned()))?;
            return FieldTag::prime_field(p);
        }
        Err(FieldError::BadFieldTag(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rat(BigRational),
    Mod { value: u64, p: u64 },
}

/// An immutable scalar of one specific exact field.
///
/// The checked operations [`add`](FieldScalar::add), [`sub`](FieldScalar::sub),
/// [`mul`](FieldScalar::mul) and [`div`](FieldScalar::div) report mixed-field
/// use and division by zero. The `+`, `-` and `*` operators are sugar over the
/// checked operations for code that guarantees a uniform field by
/// construction; they panic on a mixed-field operand pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldScalar(Repr);

impl FieldScalar {
    fn from_rational(r: BigRational) -> FieldScalar {
        FieldScalar(Repr::Rat(r))
    }

    fn modular(value: u64, p: u64) -> FieldScalar {
        debug_assert!(value < p);
        FieldScalar(Repr::Mod { value, p })
    }

    /// The field this scalar belongs to.
    pub fn field_tag(&self) -> FieldTag {
        match &self.0 {
            Repr::Rat(_) => FieldTag::Rationals,
            Repr::Mod { p, .. } => FieldTag::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rat(r) => r.is_zero(),
            Repr::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Rat(r) => r.is_one(),
            Repr::Mod { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &FieldScalar) -> Result<(), FieldError> {
        let (a, b) = (self.field_tag(), other.field_tag());
        if a == b {
            Ok(())
        } else {
            Err(FieldError::MixedFields(a, b))
        }
    }

    /// Checked addition.
    pub fn add(&self, other: &FieldScalar) -> Result<FieldScalar, FieldError> {
        self.same_field(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => FieldScalar::from_rational(a + b),
            (Repr::Mod { value: a, p }, Repr::Mod { value: b, .. }) => {
                FieldScalar::modular(add_mod(*a, *b, *p), *p)
            }
            _ => unreachable!("same_field checked"),
        })
    }

    /// Checked subtraction.
    pub fn sub(&self, other: &FieldScalar) -> Result<FieldScalar, FieldError> {
        self.add(&other.neg())
    }

    /// Checked multiplication.
    pub fn mul(&self, other: &FieldScalar) -> Result<FieldScalar, FieldError> {
        self.same_field(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => FieldScalar::from_rational(a * b),
            (Repr::Mod { value: a, p }, Repr::Mod { value: b, .. }) => {
                FieldScalar::modular(mul_mod(*a, *b, *p), *p)
            }
            _ => unreachable!("same_field checked"),
        })
    }

    /// Checked division; the divisor must be nonzero.
    pub fn div(&self, other: &FieldScalar) -> Result<FieldScalar, FieldError> {
        self.mul(&other.inv()?)
    }

    /// Additive inverse.
    pub fn neg(&self) -> FieldScalar {
        match &self.0 {
            Repr::Rat(r) => FieldScalar::from_rational(-r),
            Repr::Mod { value, p } => {
                FieldScalar::modular(if *value == 0 { 0 } else { p - value }, *p)
            }
        }
    }

    /// Multiplicative inverse of a nonzero scalar.
    pub fn inv(&self) -> Result<FieldScalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Rat(r) => FieldScalar::from_rational(r.recip()),
            Repr::Mod { value, p } => {
                let inv = mod_inverse(*value, *p).expect("modulus is prime and value nonzero");
                FieldScalar::modular(inv, *p)
            }
        })
    }

    /// Over the rationals, the numerator/denominator pair; `None` in GF(p).
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            Repr::Mod { .. } => None,
        }
    }

    /// In GF(p), the reduced residue; `None` over the rationals.
    pub fn as_residue(&self) -> Option<u64> {
        match &self.0 {
            Repr::Rat(_) => None,
            Repr::Mod { value, .. } => Some(*value),
        }
    }
}

impl fmt::Display for FieldScalar {
    /// Canonical text form: `p/q` (or `p` for integers) over the rationals,
    /// the decimal residue in GF(p). `FieldTag::parse` round-trips it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(r) => write!(f, "{r}"),
            Repr::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait_:ident, $method:ident) => {
        impl std::ops::$trait_<&FieldScalar> for &FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &FieldScalar) -> FieldScalar {
                FieldScalar::$method(self, rhs).expect("operands from the same field")
            }
        }
        impl std::ops::$trait_ for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                FieldScalar::$method(&self, &rhs).expect("operands from the same field")
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl std::ops::Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar::neg(self)
    }
}

impl std::ops::Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar::neg(&self)
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = (a as u128) + (b as u128);
    (s % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128) * (b as u128) % (p as u128)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Extended-Euclid inverse of `a` modulo the prime `p`.
fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

fn reduce_bigint_mod(n: &BigInt, p: u64) -> u64 {
    let p_big = BigInt::from(p);
    let mut r = n % &p_big;
    if r.is_negative() {
        r += &p_big;
    }
    r.to_u64().expect("residue fits in u64")
}

/// Deterministic Miller-Rabin primality test, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
