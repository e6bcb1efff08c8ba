use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use super::{squarefree_decompose, ExactError};

/// `a + b*sqrt(d)` with `d` squarefree. Rational elements carry `d = 1`, `b = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElement {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadElement {
    /// Builds `a + b*sqrt(d)`, pulling square factors of `d` into `b`.
    pub fn new(a: BigRational, b: BigRational, d: &BigInt) -> Result<Self, ExactError> {
        let dec = squarefree_decompose(d)?;
        let b = b * BigRational::from_integer(dec.square_part);
        if dec.radical.is_one() {
            return Ok(Self::rational(a + b));
        }
        if b.is_zero() {
            return Ok(Self::rational(a));
        }
        Ok(Self { a, b, d: dec.radical })
    }

    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero(), d: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::rational(BigRational::zero());
        }
        Self { a: &self.a * s, b: &self.b * s, d: self.d.clone() }
    }

    fn common_radicand(&self, other: &Self) -> Result<BigInt, ExactError> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == other.d => Ok(self.d.clone()),
            _ => Err(ExactError::FieldMismatch(self.d.clone(), other.d.clone())),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.common_radicand(other)?;
        Self::new(&self.a + &other.a, &self.b + &other.b, &d)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&other.scale(&-BigRational::one()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.common_radicand(other)?;
        let dr = BigRational::from_integer(d.clone());
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Self::new(a, b, &d)
    }

    /// Complex value as `(re, im)`, using the principal square root for negative radicands.
    pub fn evaluate<F: Float>(&self) -> (F, F) {
        let a = ratio_to_float::<F>(&self.a);
        let b = ratio_to_float::<F>(&self.b);
        let d = F::from(self.d.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan);
        if d < F::zero() {
            (a, b * (-d).sqrt())
        } else {
            (a + b * d.sqrt(), F::zero())
        }
    }
}

pub(crate) fn ratio_to_float<F: Float>(r: &BigRational) -> F {
    F::from(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan)
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}*sqrt({})", self.a, sign, self.b.abs(), self.d)
    }
}

/// `x^k` for `x` a root of `X^2 - t X + n`, by the linear recurrence
/// `x^j = t x^(j-1) - n x^(j-2)`. Negative `k` goes through `x^-1 = (t - x)/n`.
pub fn quad_pow(x: &QuadElement, k: i64, t: &BigInt, n: &BigInt) -> Result<QuadElement, ExactError> {
    let tr = BigRational::from_integer(t.clone());
    let nr = BigRational::from_integer(n.clone());
    let lhs = x.checked_mul(x)?;
    let rhs = x.scale(&tr).checked_sub(&QuadElement::rational(nr.clone()))?;
    if lhs != rhs {
        return Err(ExactError::InconsistentMinimalPolynomial);
    }
    if k >= 0 {
        return recur(x, k as u64, &tr, &nr);
    }
    if n.is_zero() {
        return Err(ExactError::ZeroNorm);
    }
    let inv = QuadElement::rational(tr.clone()).checked_sub(x)?.scale(&nr.recip());
    // x^-1 is a root of X^2 - (t/n) X + 1/n
    recur(&inv, k.unsigned_abs(), &(&tr / &nr), &nr.recip())
}

fn recur(x: &QuadElement, k: u64, t: &BigRational, n: &BigRational) -> Result<QuadElement, ExactError> {
    if k == 0 {
        return Ok(QuadElement::one());
    }
    let mut prev = QuadElement::one();
    let mut cur = x.clone();
    for _ in 1..k {
        let next = cur.scale(t).checked_sub(&prev.scale(n))?;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}
