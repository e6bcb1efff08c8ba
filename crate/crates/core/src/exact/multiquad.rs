use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, Zero};

use super::{squarefree_decompose, ExactError, QuadElement};
use crate::arith::{abs_biguint, factor};

/// Finite sum `sum_d c_d * sqrt(d)` over signed squarefree radicands `d`.
///
/// The key `1` holds the rational part. Zero coefficients are never stored, so
/// by linear independence of square roots of distinct squarefree integers the
/// element is zero exactly when the map is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MultiQuadElement {
    terms: BTreeMap<BigInt, BigRational>,
}

impl MultiQuadElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: BigRational) -> Self {
        let mut out = Self::zero();
        out.accumulate(BigInt::one(), r);
        out
    }

    /// Builds the sum of `c * sqrt(d)` over the given pairs; radicands need not be squarefree.
    pub fn from_terms<I>(terms: I) -> Result<Self, ExactError>
    where
        I: IntoIterator<Item = (BigInt, BigRational)>,
    {
        let mut out = Self::zero();
        for (d, c) in terms {
            let dec = squarefree_decompose(&d)?;
            out.accumulate(dec.radical, c * BigRational::from_integer(dec.square_part));
        }
        Ok(out)
    }

    pub fn from_quad(x: &QuadElement) -> Self {
        let mut out = Self::rational(x.rational_part().clone());
        out.accumulate(x.radicand().clone(), x.radical_part().clone());
        out
    }

    fn accumulate(&mut self, d: BigInt, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(d.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, d: &BigInt) -> BigRational {
        self.terms.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn rational_part(&self) -> BigRational {
        self.coefficient(&BigInt::one())
    }

    /// Radicands other than `1` carrying a nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<BigInt> {
        self.terms.keys().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(d, c)| (d.clone(), c * s)).collect() }
    }

    /// Complex value `(re, im)` with principal square roots.
    pub fn evaluate<F: Float>(&self) -> (F, F) {
        let mut re = F::zero();
        let mut im = F::zero();
        for (d, c) in &self.terms {
            let (x, y) = QuadElement::new(BigRational::zero(), c.clone(), d)
                .expect("stored radicands are nonzero")
                .evaluate::<F>();
            re = re + x;
            im = im + y;
        }
        (re, im)
    }
}

/// `sqrt(d1) * sqrt(d2) = sign * g * sqrt(d1 d2 / g^2)` with principal roots.
fn mul_radicals(d1: &BigInt, d2: &BigInt) -> (BigInt, BigInt) {
    let g = d1.abs().gcd(&d2.abs());
    let radicand = d1 * d2 / (&g * &g);
    let coeff = if d1.is_negative() && d2.is_negative() { -g } else { g };
    (coeff, radicand)
}

impl Add for &MultiQuadElement {
    type Output = MultiQuadElement;
    fn add(self, rhs: &MultiQuadElement) -> MultiQuadElement {
        let mut out = self.clone();
        for (d, c) in &rhs.terms {
            out.accumulate(d.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MultiQuadElement {
    type Output = MultiQuadElement;
    fn neg(self) -> MultiQuadElement {
        self.scale(&-BigRational::one())
    }
}

impl Sub for &MultiQuadElement {
    type Output = MultiQuadElement;
    fn sub(self, rhs: &MultiQuadElement) -> MultiQuadElement {
        self + &(-rhs)
    }
}

impl Mul for &MultiQuadElement {
    type Output = MultiQuadElement;
    fn mul(self, rhs: &MultiQuadElement) -> MultiQuadElement {
        let mut out = MultiQuadElement::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &rhs.terms {
                let (g, d) = mul_radicals(d1, d2);
                out.accumulate(d, c1 * c2 * BigRational::from_integer(g));
            }
        }
        out
    }
}

impl fmt::Display for MultiQuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if d.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

/// Exponent vector of a squarefree radicand over F_2: its prime factors plus `-1` when negative.
fn exponent_vector(d: &BigInt) -> BTreeSet<BigInt> {
    let mut v: BTreeSet<BigInt> = factor(&abs_biguint(d)).into_iter().map(|(q, _)| BigInt::from(q)).collect();
    if d.is_negative() {
        v.insert(-BigInt::one());
    }
    v
}

fn validate_radicand(d: &BigInt) -> Result<(), ExactError> {
    if d.is_zero() || d.is_one() {
        return Err(ExactError::BadRadicand(d.clone()));
    }
    let dec = squarefree_decompose(d)?;
    if !dec.square_part.is_one() {
        return Err(ExactError::NotSquarefree(d.clone()));
    }
    Ok(())
}

/// Rank over F_2 of the exponent vectors of the radicands.
pub fn radicand_rank(radicands: &[BigInt]) -> Result<usize, ExactError> {
    // pivot (largest coordinate) -> reduced basis vector
    let mut basis: BTreeMap<BigInt, BTreeSet<BigInt>> = BTreeMap::new();
    for d in radicands {
        validate_radicand(d)?;
        let mut v = exponent_vector(d);
        while let Some(pivot) = v.last().cloned() {
            match basis.get(&pivot) {
                Some(b) => v = v.symmetric_difference(b).cloned().collect(),
                None => {
                    basis.insert(pivot, v);
                    break;
                }
            }
        }
    }
    Ok(basis.len())
}

/// Degree over Q of the field generated by the square roots of the radicands.
pub fn mq_field_degree(radicands: &[BigInt]) -> Result<BigUint, ExactError> {
    Ok(BigUint::one() << radicand_rank(radicands)?)
}
