//! Finite-precision p-adic numbers with explicit precision tracking.
//!
//! A nonzero value is stored as `p^v * u + O(p^(v + r))` with `u` a unit
//! residue modulo `p^r`; `r` is the relative precision and `v + r` the
//! absolute precision. Zero is either exact or known only modulo `p^A`.
//!
//! Addition keeps the smaller absolute precision, multiplication and
//! division keep the smaller relative precision. Multiplying or dividing by
//! an exact integer shifts the valuation and leaves relative precision alone.

use std::cmp::min;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{is_prime_u64, legendre, mod_inverse, pow_u64, small_residue, split_prime_power};
use crate::exact::{MultiQuadElement, QuadElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("division by a value indistinguishable from zero")]
    DivisionByZero,
    #[error("trace {t} is divisible by {p}: x^2 - t x + p^m has no unit root")]
    NonOrdinaryTrace { t: BigInt, p: u64 },
    #[error("trace {t} does not give an imaginary quadratic root (t^2 >= 4 p^m)")]
    NotImaginary { t: BigInt },
    #[error("{a} is not a square modulo {p}")]
    NotASquare { a: BigInt, p: u64 },
    #[error("{a} is divisible by {p}")]
    NonUnit { a: BigInt, p: u64 },
    #[error("{r0} is not a square root of {a} modulo {p}")]
    BadBranch { a: BigInt, r0: BigInt, p: u64 },
    #[error("precision must be positive, got {0}")]
    BadPrecision(i64),
}

pub fn check_odd_prime(p: u64) -> Result<(), PadicError> {
    if p == 2 || !is_prime_u64(p) {
        return Err(PadicError::InvalidPrime(p));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Exact zero when `absprec` is `None`, otherwise `O(p^absprec)`.
    Zero {
        absprec: Option<i64>,
    },
    Nonzero {
        val: i64,
        unit: BigInt,
        relprec: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    prime: u64,
    repr: Repr,
}

fn modulus(p: u64, e: i64) -> BigInt {
    pow_u64(p, e as u32)
}

impl PadicScalar {
    pub fn exact_zero(p: u64) -> Self {
        Self { prime: p, repr: Repr::Zero { absprec: None } }
    }

    /// Zero known modulo `p^absprec`.
    pub fn zero_mod(p: u64, absprec: i64) -> Self {
        Self { prime: p, repr: Repr::Zero { absprec: Some(absprec) } }
    }

    pub fn one(p: u64, relprec: i64) -> Self {
        Self::from_integer(p, &BigInt::one(), relprec)
    }

    /// `p^val * s + O(p^absprec)`, normalized.
    fn normalize(p: u64, val: i64, s: BigInt, absprec: i64) -> Self {
        let e = absprec - val;
        if e <= 0 {
            return Self::zero_mod(p, absprec);
        }
        let s = s.mod_floor(&modulus(p, e));
        if s.is_zero() {
            return Self::zero_mod(p, absprec);
        }
        let (shift, unit) = split_prime_power(&s, p);
        let relprec = e - shift;
        let unit = unit.mod_floor(&modulus(p, relprec));
        Self { prime: p, repr: Repr::Nonzero { val: val + shift, unit, relprec } }
    }

    /// The integer `n` reduced modulo `p^absprec`; `0` is exact.
    pub fn from_integer(p: u64, n: &BigInt, absprec: i64) -> Self {
        if n.is_zero() {
            return Self::exact_zero(p);
        }
        Self::normalize(p, 0, n.clone(), absprec)
    }

    pub fn from_rational(p: u64, r: &BigRational, absprec: i64) -> Self {
        if r.is_zero() {
            return Self::exact_zero(p);
        }
        let (vn, un) = split_prime_power(r.numer(), p);
        let (vd, ud) = split_prime_power(r.denom(), p);
        let val = vn - vd;
        if absprec <= val {
            return Self::zero_mod(p, absprec);
        }
        let m = modulus(p, absprec - val);
        let inv = mod_inverse(&ud, &m).expect("cofactor is prime to p");
        Self::normalize(p, val, un * inv, absprec)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Valuation of a nonzero value; `None` for (possibly inexact) zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Nonzero { val, .. } => Some(*val),
            Repr::Zero { .. } => None,
        }
    }

    /// Lower bound on the valuation: the valuation itself, or the absolute
    /// precision of an inexact zero. `None` for exact zero.
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match &self.repr {
            Repr::Nonzero { val, .. } => Some(*val),
            Repr::Zero { absprec } => *absprec,
        }
    }

    /// Absolute precision; `None` means exact.
    pub fn absprec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Nonzero { val, relprec, .. } => Some(val + relprec),
            Repr::Zero { absprec } => *absprec,
        }
    }

    pub fn relprec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Nonzero { relprec, .. } => Some(*relprec),
            Repr::Zero { .. } => None,
        }
    }

    /// Unit part in `[0, p^relprec)`; zero for zero values.
    pub fn unit(&self) -> BigInt {
        match &self.repr {
            Repr::Nonzero { unit, .. } => unit.clone(),
            Repr::Zero { .. } => BigInt::zero(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { absprec: None })
    }

    /// True when the value is indistinguishable from zero at its precision.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Representative in `[0, p^absprec)` of an integral value.
    pub fn residue(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::Zero { .. } => Some(BigInt::zero()),
            Repr::Nonzero { val, unit, relprec } => {
                if *val < 0 {
                    return None;
                }
                let m = modulus(self.prime, val + relprec);
                Some((unit * modulus(self.prime, *val)).mod_floor(&m))
            }
        }
    }

    /// Forget digits at and beyond `p^absprec`.
    pub fn truncate(&self, absprec: i64) -> Self {
        match &self.repr {
            Repr::Zero { absprec: a } => match a {
                Some(a) if *a <= absprec => self.clone(),
                _ => Self::zero_mod(self.prime, absprec),
            },
            Repr::Nonzero { val, unit, relprec } => {
                if val + relprec <= absprec {
                    self.clone()
                } else {
                    Self::normalize(self.prime, *val, unit.clone(), absprec)
                }
            }
        }
    }

    /// Equal modulo the smaller of the two absolute precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "p-adic values over different primes");
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, PadicError> {
        self.assert_same_prime(other);
        let p = self.prime;
        let (vy, uy, ry) = match &other.repr {
            Repr::Zero { .. } => return Err(PadicError::DivisionByZero),
            Repr::Nonzero { val, unit, relprec } => (*val, unit, *relprec),
        };
        Ok(match &self.repr {
            Repr::Zero { absprec: None } => Self::exact_zero(p),
            Repr::Zero { absprec: Some(a) } => Self::zero_mod(p, a - vy),
            Repr::Nonzero { val, unit, relprec } => {
                let r = min(*relprec, ry);
                let m = modulus(p, r);
                let inv = mod_inverse(uy, &m).expect("unit is invertible");
                Self::normalize(p, val - vy, unit * inv, val - vy + r)
            }
        })
    }

    pub fn inverse(&self) -> Result<Self, PadicError> {
        let rel = self.relprec().ok_or(PadicError::DivisionByZero)?;
        Self::one(self.prime, rel).checked_div(self)
    }

    /// Product with an exact integer.
    pub fn mul_integer(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::exact_zero(self.prime);
        }
        let (v, u) = split_prime_power(n, self.prime);
        match &self.repr {
            Repr::Zero { absprec: None } => self.clone(),
            Repr::Zero { absprec: Some(a) } => Self::zero_mod(self.prime, a + v),
            Repr::Nonzero { val, unit, relprec } => Self::normalize(self.prime, val + v, unit * u, val + v + relprec),
        }
    }

    /// Product with `p^k` for any integer `k`; exact, so relative precision is unchanged.
    pub fn shift(&self, k: i64) -> Self {
        let p = self.prime;
        match &self.repr {
            Repr::Zero { absprec: None } => self.clone(),
            Repr::Zero { absprec: Some(a) } => Self::zero_mod(p, a + k),
            Repr::Nonzero { val, unit, relprec } => {
                Self { prime: p, repr: Repr::Nonzero { val: val + k, unit: unit.clone(), relprec: *relprec } }
            }
        }
    }

    /// Quotient by an exact nonzero integer: valuation shift plus unit inverse.
    pub fn div_integer(&self, n: &BigInt) -> Result<Self, PadicError> {
        if n.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let (v, u) = split_prime_power(n, self.prime);
        Ok(match &self.repr {
            Repr::Zero { absprec: None } => self.clone(),
            Repr::Zero { absprec: Some(a) } => Self::zero_mod(self.prime, a - v),
            Repr::Nonzero { val, unit, relprec } => {
                let inv = mod_inverse(&u, &modulus(self.prime, *relprec)).expect("cofactor is a unit");
                Self::normalize(self.prime, val - v, unit * inv, val - v + relprec)
            }
        })
    }

    pub fn pow(&self, k: i64) -> Result<Self, PadicError> {
        let p = self.prime;
        match &self.repr {
            Repr::Zero { absprec } => match k.signum() {
                -1 => Err(PadicError::DivisionByZero),
                0 => Ok(Self::one(p, absprec.unwrap_or(1).max(1))),
                _ => Ok(match absprec {
                    None => Self::exact_zero(p),
                    Some(a) => Self::zero_mod(p, a * k),
                }),
            },
            Repr::Nonzero { val, unit, relprec } => {
                let m = modulus(p, *relprec);
                let mut u = unit.modpow(&BigInt::from(k.unsigned_abs()), &m);
                if k < 0 {
                    u = mod_inverse(&u, &m).expect("unit is invertible");
                }
                Ok(Self::normalize(p, val * k, u, val * k + relprec))
            }
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for &PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        self.assert_same_prime(rhs);
        let p = self.prime;
        if self.is_exact_zero() {
            return rhs.clone();
        }
        if rhs.is_exact_zero() {
            return self.clone();
        }
        let absprec = min(self.absprec().unwrap(), rhs.absprec().unwrap());
        let vmin = match (self.valuation(), rhs.valuation()) {
            (None, None) => return PadicScalar::zero_mod(p, absprec),
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => min(a, b),
        };
        let lift = |x: &PadicScalar| match &x.repr {
            Repr::Nonzero { val, unit, .. } => unit * modulus(p, val - vmin),
            Repr::Zero { .. } => BigInt::zero(),
        };
        PadicScalar::normalize(p, vmin, lift(self) + lift(rhs), absprec)
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { val, unit, relprec } => PadicScalar::normalize(self.prime, *val, -unit, val + relprec),
        }
    }
}

impl Sub for &PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self + &(-rhs)
    }
}

impl Mul for &PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        self.assert_same_prime(rhs);
        let p = self.prime;
        match (&self.repr, &rhs.repr) {
            (Repr::Zero { absprec: None }, _) | (_, Repr::Zero { absprec: None }) => PadicScalar::exact_zero(p),
            (Repr::Zero { absprec: Some(a) }, Repr::Zero { absprec: Some(b) }) => PadicScalar::zero_mod(p, a + b),
            (Repr::Zero { absprec: Some(a) }, Repr::Nonzero { val, .. })
            | (Repr::Nonzero { val, .. }, Repr::Zero { absprec: Some(a) }) => PadicScalar::zero_mod(p, a + val),
            (Repr::Nonzero { val: v1, unit: u1, relprec: r1 }, Repr::Nonzero { val: v2, unit: u2, relprec: r2 }) => {
                let r = min(*r1, *r2);
                PadicScalar::normalize(p, v1 + v2, u1 * u2, v1 + v2 + r)
            }
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        match &self.repr {
            Repr::Zero { absprec: None } => write!(f, "0"),
            Repr::Zero { absprec: Some(a) } => write!(f, "O({p}^{a})"),
            Repr::Nonzero { val, unit, relprec } => {
                write!(f, "{p}^{val} * {unit} + O({p}^{})", val + relprec)
            }
        }
    }
}

/// Serialized as a `(valuation, unit, precision)` triple. Zero has a null
/// valuation and unit `"0"`; exact values have a null precision.
impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PadicScalar", 3)?;
        s.serialize_field("valuation", &self.valuation())?;
        s.serialize_field("unit", &self.unit().to_string())?;
        s.serialize_field("precision", &self.absprec())?;
        s.end()
    }
}

fn check_precision(prec: i64) -> Result<(), PadicError> {
    if prec < 1 {
        return Err(PadicError::BadPrecision(prec));
    }
    Ok(())
}

/// The root of `x^2 - t x + p^m` congruent to `t` modulo `p`, to `prec` digits.
pub fn hensel_unit_root(t: &BigInt, p: u64, m: u32, prec: i64) -> Result<PadicScalar, PadicError> {
    check_odd_prime(p)?;
    check_precision(prec)?;
    let pm = pow_u64(p, m);
    if small_residue(t, p) == 0 {
        return Err(PadicError::NonOrdinaryTrace { t: t.clone(), p });
    }
    if t * t >= BigInt::from(4) * &pm {
        return Err(PadicError::NotImaginary { t: t.clone() });
    }
    let mut x = t.mod_floor(&BigInt::from(p));
    let mut e = 1i64;
    while e < prec {
        e = min(2 * e, prec);
        let md = modulus(p, e);
        let fx = &x * &x - t * &x + &pm;
        let dfx = BigInt::from(2) * &x - t;
        let inv = mod_inverse(&dfx, &md).expect("derivative is a unit at the unit root");
        x = (x - fx * inv).mod_floor(&md);
    }
    Ok(PadicScalar::from_integer(p, &x, prec))
}

/// Square root of the unit `a` congruent to `r0` modulo `p`, to `prec` digits.
pub fn hensel_sqrt(a: &BigInt, p: u64, prec: i64, r0: &BigInt) -> Result<PadicScalar, PadicError> {
    check_odd_prime(p)?;
    check_precision(prec)?;
    match legendre(a, p) {
        0 => return Err(PadicError::NonUnit { a: a.clone(), p }),
        -1 => return Err(PadicError::NotASquare { a: a.clone(), p }),
        _ => {}
    }
    let pb = BigInt::from(p);
    if (r0 * r0 - a).mod_floor(&pb) != BigInt::zero() {
        return Err(PadicError::BadBranch { a: a.clone(), r0: r0.clone(), p });
    }
    let mut x = r0.mod_floor(&pb);
    let mut e = 1i64;
    while e < prec {
        e = min(2 * e, prec);
        let md = modulus(p, e);
        let fx = &x * &x - a;
        let inv = mod_inverse(&(BigInt::from(2) * &x), &md).expect("2x is a unit");
        x = (x - fx * inv).mod_floor(&md);
    }
    Ok(PadicScalar::from_integer(p, &x, prec))
}

/// A fixed embedding of the multiquadratic numbers that live in `Q_p`.
///
/// The square root of a radicand `d` is sent to the Hensel lift of the
/// smallest positive residue `r` with `r^2 = d (mod p)`. The map is
/// Q-linear and a field embedding on each `Q(sqrt d)` separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicEmbedding {
    prime: u64,
}

impl PadicEmbedding {
    pub fn new(p: u64) -> Result<Self, PadicError> {
        check_odd_prime(p)?;
        Ok(Self { prime: p })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Residue modulo `p` of the image of `sqrt(d)`.
    pub fn sqrt_residue(&self, d: &BigInt) -> Result<u64, PadicError> {
        let p = self.prime;
        match legendre(d, p) {
            0 => return Err(PadicError::NonUnit { a: d.clone(), p }),
            -1 => return Err(PadicError::NotASquare { a: d.clone(), p }),
            _ => {}
        }
        let dr = small_residue(d, p);
        Ok((1..p).find(|r| (r * r) % p == dr).expect("a square has a root"))
    }

    pub fn sqrt(&self, d: &BigInt, prec: i64) -> Result<PadicScalar, PadicError> {
        let r0 = self.sqrt_residue(d)?;
        hensel_sqrt(d, self.prime, prec, &BigInt::from(r0))
    }

    pub fn embed_quad(&self, x: &QuadElement, absprec: i64) -> Result<PadicScalar, PadicError> {
        self.embed_multiquad(&MultiQuadElement::from_quad(x), absprec)
    }

    /// Image of `x` modulo `p^absprec`.
    pub fn embed_multiquad(&self, x: &MultiQuadElement, absprec: i64) -> Result<PadicScalar, PadicError> {
        let p = self.prime;
        let mut acc = PadicScalar::exact_zero(p);
        for (d, c) in x.terms() {
            let coeff = PadicScalar::from_rational(p, c, absprec);
            let term = if d.is_one() {
                coeff
            } else {
                let need = absprec - coeff.valuation().unwrap_or(absprec);
                &coeff * &self.sqrt(d, need.max(1))?
            };
            acc = &acc + &term;
        }
        Ok(acc)
    }
}
