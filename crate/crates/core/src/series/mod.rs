//! Truncated power series `1 + a_1 T + ... + a_n T^n` over p-adic scalars.
//!
//! Every series built here has constant term exactly `1`, so it is stored
//! implicitly; each higher coefficient carries its own precision.

mod newton;

pub use newton::{CoefficientValuation, NewtonPolygon, NewtonSegment, NewtonVertex};

use num_bigint::BigInt;
use serde::Serialize;

use crate::padic::{PadicError, PadicScalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("precision exhausted at coefficient {index}")]
    PrecisionExhausted { index: usize },
    #[error("constant term is not 1")]
    ConstantTerm,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicSeries {
    prime: u64,
    /// `tail[i]` is the coefficient of `T^(i+1)`.
    tail: Vec<PadicScalar>,
}

impl PadicSeries {
    /// `1 + sum tail[i] T^(i+1)`.
    pub fn new(prime: u64, tail: Vec<PadicScalar>) -> Self {
        for c in &tail {
            assert_eq!(c.prime(), prime, "coefficient over a different prime");
        }
        Self { prime, tail }
    }

    /// From a full coefficient list whose first entry must be `1`.
    pub fn from_coefficients(prime: u64, mut coeffs: Vec<PadicScalar>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::ConstantTerm);
        }
        let a0 = coeffs.remove(0);
        let one = PadicScalar::one(prime, a0.absprec().unwrap_or(1).max(1));
        if a0.is_zero() || !a0.agrees_with(&one) {
            return Err(SeriesError::ConstantTerm);
        }
        Ok(Self::new(prime, coeffs))
    }

    pub fn one(prime: u64, degree: usize) -> Self {
        Self::new(prime, vec![PadicScalar::exact_zero(prime); degree])
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> usize {
        self.tail.len()
    }

    /// Coefficient of `T^i` for `1 <= i <= degree`.
    pub fn coefficient(&self, i: usize) -> &PadicScalar {
        assert!(i >= 1, "the constant term is exactly 1");
        &self.tail[i - 1]
    }

    /// Coefficients of `T^1, ..., T^degree`.
    pub fn tail(&self) -> &[PadicScalar] {
        &self.tail
    }

    /// Smallest absolute precision among the coefficients (`None` if all exact).
    pub fn min_precision(&self) -> Option<i64> {
        self.tail.iter().filter_map(PadicScalar::absprec).min()
    }

    pub fn truncate_degree(&self, degree: usize) -> Self {
        Self::new(self.prime, self.tail.iter().take(degree).cloned().collect())
    }

    pub fn truncate_precision(&self, absprec: i64) -> Self {
        Self::new(self.prime, self.tail.iter().map(|c| c.truncate(absprec)).collect())
    }

    /// First index (>= 1) where the two series differ within tracked precision.
    pub fn first_disagreement(&self, other: &Self) -> Option<usize> {
        self.tail.iter().zip(&other.tail).position(|(a, b)| !a.agrees_with(b)).map(|i| i + 1)
    }

    /// `f(p^j T)`.
    pub fn scale_argument(&self, j: i64) -> Self {
        Self::new(self.prime, self.tail.iter().enumerate().map(|(i, c)| c.shift((i as i64 + 1) * j)).collect())
    }

    /// Product truncated at the smaller degree.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.degree().min(other.degree());
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            let mut acc = &self.tail[k - 1] + &other.tail[k - 1];
            for i in 1..k {
                acc = &acc + &(&self.tail[i - 1] * &other.tail[k - i - 1]);
            }
            out.push(acc);
        }
        Self::new(self.prime, out)
    }

    /// `h` with `h * g = f` to the common degree.
    pub fn divide(&self, g: &Self) -> Self {
        let n = self.degree().min(g.degree());
        let mut h: Vec<PadicScalar> = Vec::with_capacity(n);
        for k in 1..=n {
            let mut acc = &self.tail[k - 1] - &g.tail[k - 1];
            for j in 1..k {
                acc = &acc - &(&g.tail[j - 1] * &h[k - j - 1]);
            }
            h.push(acc);
        }
        Self::new(self.prime, h)
    }

    /// The `c_m` with `self = exp(sum c_m T^m / m)`.
    pub fn log_series(&self) -> Vec<PadicScalar> {
        let mut c: Vec<PadicScalar> = Vec::with_capacity(self.degree());
        for n in 1..=self.degree() {
            let mut acc = self.tail[n - 1].mul_integer(&BigInt::from(n));
            for m in 1..n {
                acc = &acc - &(&c[m - 1] * &self.tail[n - m - 1]);
            }
            c.push(acc);
        }
        c
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::of_series(self)
    }
}

/// `exp(sum c_m T^m / m)` via `n a_n = sum_{m=1}^n c_m a_{n-m}`, `a_0 = 1`.
pub fn exp_weighted(prime: u64, c: &[PadicScalar]) -> Result<PadicSeries, SeriesError> {
    let mut a: Vec<PadicScalar> = Vec::with_capacity(c.len());
    for n in 1..=c.len() {
        let mut acc = c[n - 1].clone();
        for m in 1..n {
            acc = &acc + &(&c[m - 1] * &a[n - m - 1]);
        }
        let an = acc.div_integer(&BigInt::from(n))?;
        if matches!(an.absprec(), Some(prec) if prec <= 0) {
            return Err(SeriesError::PrecisionExhausted { index: n });
        }
        a.push(an);
    }
    Ok(PadicSeries::new(prime, a))
}

pub fn series_divide(f: &PadicSeries, g: &PadicSeries) -> PadicSeries {
    f.divide(g)
}

pub fn scale_argument(f: &PadicSeries, j: i64) -> PadicSeries {
    f.scale_argument(j)
}

pub fn log_series(f: &PadicSeries) -> Vec<PadicScalar> {
    f.log_series()
}

pub fn newton_polygon(f: &PadicSeries) -> NewtonPolygon {
    f.newton_polygon()
}
