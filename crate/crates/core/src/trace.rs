//! The class-number trace formula for `A_m(k)` and `C_m(k)`, and the series
//! `D(k, T)` and `L(k, T) = D(k+2, T) / D(k, pT)` built from them.
//!
//! Units `gamma` of norm `p^m` are enumerated by their trace `t`: for every
//! `t` with `p ∤ t` and `t^2 < 4 p^m` exactly one root of `x^2 - t x + p^m`
//! is a p-adic unit, namely the one congruent to `t` modulo `p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors_u64, pow_u64, small_residue};
use crate::exact::{quad_pow, squarefree_decompose, ExactError, MultiQuadElement, QuadElement};
use crate::orders::{bn_count, fundamental_discriminant, ClassNumberCache, OrderElement, OrderError, OrderSpec};
use crate::padic::{check_odd_prime, hensel_unit_root, PadicEmbedding, PadicError, PadicScalar};
use crate::series::{exp_weighted, NewtonPolygon, PadicSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("p = {0} must be an odd prime")]
    InvalidPrime(u64),
    #[error("level N = {0} must exceed 4")]
    InvalidLevel(u64),
    #[error("level N = {level} is not prime to p = {p}")]
    LevelNotCoprime { level: u64, p: u64 },
    #[error("{0}")]
    BadParameter(String),
    #[error("exponential and quotient routes disagree at coefficient {index}")]
    RouteDisagreement { index: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl TraceError {
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Self::InvalidPrime(_) | Self::InvalidLevel(_) | Self::LevelNotCoprime { .. } | Self::BadParameter(_)
        )
    }

    pub fn is_precision_failure(&self) -> bool {
        matches!(self, Self::Series(SeriesError::PrecisionExhausted { .. }))
    }
}

/// Prime `p` and tame level `N` of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyParams {
    pub p: u64,
    #[serde(rename = "N")]
    pub level: u64,
}

impl FamilyParams {
    pub fn new(p: u64, level: u64) -> Result<Self, TraceError> {
        check_odd_prime(p).map_err(|_| TraceError::InvalidPrime(p))?;
        if level <= 4 {
            return Err(TraceError::InvalidLevel(level));
        }
        if num_integer::gcd(level, p) != 1 {
            return Err(TraceError::LevelNotCoprime { level, p });
        }
        Ok(Self { p, level })
    }
}

/// Digits to carry internally so that `target` digits survive the divisions
/// by `n <= degree` in the exponential.
pub fn working_precision(p: u64, target: i64, degree: usize) -> i64 {
    let mut log = 0i64;
    let mut q = p as usize;
    while q <= degree {
        log += 1;
        q *= p as usize;
    }
    target + log + 2
}

/// One `(gamma, O)` summand of the trace formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceTerm {
    pub m: u32,
    pub t: i64,
    /// Fundamental discriminant of `Q(gamma)`.
    pub d_k: i64,
    /// Conductor of `Z[gamma]`.
    pub f: u64,
    /// Conductor of this order; divides `f`.
    pub c: u64,
    pub class_number: u64,
    pub fixed_points: u64,
    /// `(t + s)/2` with `s` the square root of `t^2 - 4p^m` congruent to `t` mod `p`.
    #[serde(serialize_with = "display")]
    pub gamma_exact: QuadElement,
    pub gamma_padic: PadicScalar,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl TraceTerm {
    /// `h(O) * B_N(O, gamma)`.
    pub fn weight(&self) -> u64 {
        self.class_number * self.fixed_points
    }

    pub fn order(&self) -> OrderSpec {
        OrderSpec { fundamental_disc: self.d_k, conductor: self.c }
    }
}

/// Traces `t` with `p ∤ t` and `0 < t^2 < 4 p^m`, ascending.
pub fn ordinary_traces(p: u64, m: u32) -> Vec<i64> {
    let four_pm: BigInt = pow_u64(p, m) * 4;
    let bound = four_pm.sqrt().to_i64().expect("trace bound fits in i64");
    (-bound..=bound).filter(|&t| t % p as i64 != 0 && BigInt::from(t) * BigInt::from(t) < four_pm).collect()
}

/// Shared state for trace formula evaluations at one `(p, N)`.
#[derive(Debug)]
pub struct TraceEngine<'a> {
    params: FamilyParams,
    embedding: PadicEmbedding,
    cache: &'a ClassNumberCache,
}

impl<'a> TraceEngine<'a> {
    pub fn new(params: FamilyParams, cache: &'a ClassNumberCache) -> Self {
        let embedding = PadicEmbedding::new(params.p).expect("validated prime");
        Self { params, embedding, cache }
    }

    pub fn params(&self) -> FamilyParams {
        self.params
    }

    pub fn embedding(&self) -> &PadicEmbedding {
        &self.embedding
    }

    fn terms_for_trace(&self, m: u32, t: i64, prec: i64) -> Result<Vec<TraceTerm>, TraceError> {
        let p = self.params.p;
        let pm = pow_u64(p, m);
        let tb = BigInt::from(t);
        let disc = &tb * &tb - BigInt::from(4) * &pm;
        let dec = squarefree_decompose(&disc)?;
        let d0 = dec.radical.to_i64().ok_or_else(|| TraceError::BadParameter("radicand too large".into()))?;
        let s = dec.square_part.to_i64().ok_or_else(|| TraceError::BadParameter("conductor too large".into()))?;
        // branch: eps * s * sqrt(d0) = t (mod p) under the fixed embedding
        let r0 = self.embedding.sqrt_residue(&dec.radical)?;
        let eps: i64 = if small_residue(&BigInt::from(s as i128 * r0 as i128 - t as i128), p) == 0 { 1 } else { -1 };
        let d_k = fundamental_discriminant(d0)?;
        let f = if d_k == d0 { s } else { s / 2 };
        let half = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(2));
        let gamma_exact = QuadElement::new(half(t), half(eps * s), &dec.radical)?;
        let gamma_padic = hensel_unit_root(&tb, p, m, prec)?;

        if gamma_exact.norm() != BigRational::from_integer(pm.clone()) {
            return Err(TraceError::Invariant(format!("norm of gamma for t = {t} is not p^{m}")));
        }
        if gamma_padic.valuation() != Some(0)
            || !self.embedding.embed_quad(&gamma_exact, prec)?.agrees_with(&gamma_padic)
        {
            return Err(TraceError::Invariant(format!("exact and p-adic gamma differ for t = {t}")));
        }

        let mut out = Vec::new();
        for c in divisors_u64(f as u64) {
            let order = OrderSpec::new(d_k, c)?;
            let gamma_bar = OrderElement::quadratic_integer(order, t, -eps * f)?;
            if gamma_bar.norm() != pm.to_i128().unwrap_or(i128::MAX) {
                return Err(TraceError::Invariant(format!("norm of gamma_bar for t = {t}, c = {c}")));
            }
            out.push(TraceTerm {
                m,
                t,
                d_k,
                f: f as u64,
                c,
                class_number: self.cache.get(order.discriminant())?,
                fixed_points: bn_count(&gamma_bar, self.params.level)?,
                gamma_exact: gamma_exact.clone(),
                gamma_padic: gamma_padic.clone(),
            });
        }
        Ok(out)
    }

    /// All summands at level `p^m`, ordered by trace and then conductor.
    pub fn enumerate_terms(&self, m: u32, prec: i64) -> Result<Vec<TraceTerm>, TraceError> {
        if m == 0 {
            return Err(TraceError::BadParameter("m must be positive".into()));
        }
        let per_trace: Vec<Vec<TraceTerm>> = ordinary_traces(self.params.p, m)
            .into_par_iter()
            .map(|t| self.terms_for_trace(m, t, prec))
            .collect::<Result<_, _>>()?;
        Ok(per_trace.into_iter().flatten().collect())
    }

    /// Summands for `m = 1..=m_max`.
    pub fn term_table(&self, m_max: usize, prec: i64) -> Result<TermTable, TraceError> {
        let levels = (1..=m_max as u32).map(|m| self.enumerate_terms(m, prec)).collect::<Result<_, _>>()?;
        Ok(TermTable { prime: self.params.p, prec, levels })
    }

    pub fn compute_a(&self, m: u32, k: i64, prec: i64) -> Result<PadicScalar, TraceError> {
        a_from_terms(self.params.p, m, &self.enumerate_terms(m, prec)?, k, prec)
    }

    pub fn compute_c_padic(&self, m: u32, k: i64, prec: i64) -> Result<PadicScalar, TraceError> {
        c_from_terms(self.params.p, &self.enumerate_terms(m, prec)?, k)
    }

    pub fn compute_c_exact(&self, m: u32, k: i64) -> Result<MultiQuadElement, TraceError> {
        c_exact_from_terms(self.params.p, &self.enumerate_terms(m, 1)?, k)
    }

    /// `D(k, T)` to degree `m_max`, reported to `target` digits.
    pub fn build_d(&self, k: i64, m_max: usize, target: i64) -> Result<DSeriesResult, TraceError> {
        let work = working_precision(self.params.p, target, m_max);
        let table = self.term_table(m_max, work)?;
        let series = table.d_series(k)?;
        Ok(DSeriesResult::new(self.params, k, m_max, target, series))
    }

    pub fn build_l(&self, k: i64, m_max: usize, target: i64, route: Route) -> Result<LSeriesResult, TraceError> {
        let work = working_precision(self.params.p, target, m_max);
        let table = self.term_table(m_max, work)?;
        table.l_series(self.params, k, m_max, target, route)
    }
}

/// Trace formula summands for `m = 1..=m_max` at one working precision.
#[derive(Debug, Clone)]
pub struct TermTable {
    prime: u64,
    prec: i64,
    levels: Vec<Vec<TraceTerm>>,
}

impl TermTable {
    pub fn m_max(&self) -> usize {
        self.levels.len()
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn terms(&self, m: u32) -> &[TraceTerm] {
        &self.levels[m as usize - 1]
    }

    pub fn a_values(&self, k: i64) -> Result<Vec<PadicScalar>, TraceError> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, terms)| a_from_terms(self.prime, i as u32 + 1, terms, k, self.prec))
            .collect()
    }

    pub fn c_values(&self, k: i64) -> Result<Vec<PadicScalar>, TraceError> {
        self.levels.iter().map(|terms| c_from_terms(self.prime, terms, k)).collect()
    }

    pub fn c_exact_values(&self, k: i64) -> Result<Vec<MultiQuadElement>, TraceError> {
        self.levels.iter().map(|terms| c_exact_from_terms(self.prime, terms, k)).collect()
    }

    pub fn d_series(&self, k: i64) -> Result<PadicSeries, TraceError> {
        Ok(exp_weighted(self.prime, &self.a_values(k)?)?)
    }

    pub fn l_series(
        &self,
        params: FamilyParams,
        k: i64,
        m_max: usize,
        target: i64,
        route: Route,
    ) -> Result<LSeriesResult, TraceError> {
        if m_max > self.m_max() {
            return Err(TraceError::BadParameter("term table is shorter than m_max".into()));
        }
        let p = self.prime;
        let exp = match route {
            Route::Quot => None,
            _ => Some(exponential_route(p, &self.c_values(k)?[..m_max])?),
        };
        let quot = match route {
            Route::Exp => None,
            _ => {
                let a_k = self.a_values(k)?;
                let a_k2 = self.a_values(k + 2)?;
                Some(quotient_route(p, &a_k[..m_max], &a_k2[..m_max])?)
            }
        };
        let routes_agree = match (&exp, &quot) {
            (Some(e), Some(q)) => match e.first_disagreement(q) {
                Some(index) => return Err(TraceError::RouteDisagreement { index }),
                None => Some(true),
            },
            _ => None,
        };
        let tracked = [&exp, &quot].into_iter().flatten().filter_map(PadicSeries::min_precision).min();
        let series = exp.or(quot).expect("at least one route");
        Ok(LSeriesResult::new(params, k, m_max, target, route, series, tracked, routes_agree))
    }
}

fn a_from_terms(p: u64, m: u32, terms: &[TraceTerm], k: i64, prec: i64) -> Result<PadicScalar, TraceError> {
    let pm = PadicScalar::from_integer(p, &pow_u64(p, m), prec);
    let parts: Vec<PadicScalar> = terms
        .par_iter()
        .filter(|term| term.weight() > 0)
        .map(|term| {
            let g = &term.gamma_padic;
            let den = &(g * g) - &pm;
            if den.valuation() != Some(0) {
                return Err(TraceError::Invariant(format!("gamma^2 - p^m is not a unit for t = {}", term.t)));
            }
            Ok(g.pow(k)?.checked_div(&den)?.mul_integer(&BigInt::from(term.weight())))
        })
        .collect::<Result<_, TraceError>>()?;
    Ok(parts.iter().fold(PadicScalar::exact_zero(p), |acc, x| &acc + x))
}

fn c_from_terms(p: u64, terms: &[TraceTerm], k: i64) -> Result<PadicScalar, TraceError> {
    let parts: Vec<PadicScalar> = terms
        .par_iter()
        .filter(|term| term.weight() > 0)
        .map(|term| Ok(term.gamma_padic.pow(k)?.mul_integer(&BigInt::from(term.weight()))))
        .collect::<Result<_, TraceError>>()?;
    Ok(parts.iter().fold(PadicScalar::exact_zero(p), |acc, x| &acc + x))
}

fn c_exact_from_terms(p: u64, terms: &[TraceTerm], k: i64) -> Result<MultiQuadElement, TraceError> {
    let parts: Vec<MultiQuadElement> = terms
        .par_iter()
        .filter(|term| term.weight() > 0)
        .map(|term| {
            let pm = pow_u64(p, term.m);
            let g = quad_pow(&term.gamma_exact, k, &BigInt::from(term.t), &pm)?;
            let w = BigRational::from_integer(BigInt::from(term.weight()));
            Ok(MultiQuadElement::from_quad(&g).scale(&w))
        })
        .collect::<Result<_, TraceError>>()?;
    Ok(parts.iter().fold(MultiQuadElement::zero(), |acc, x| &acc + x))
}

/// `exp(sum C_m T^m / m)`.
pub fn exponential_route(p: u64, c: &[PadicScalar]) -> Result<PadicSeries, TraceError> {
    Ok(exp_weighted(p, c)?)
}

/// `D(k+2, T) / D(k, pT)` from the two lists of `A_m`.
pub fn quotient_route(p: u64, a_k: &[PadicScalar], a_k2: &[PadicScalar]) -> Result<PadicSeries, TraceError> {
    let num = exp_weighted(p, a_k2)?;
    let den = exp_weighted(p, a_k)?.scale_argument(1);
    Ok(num.divide(&den))
}

pub fn is_integral(f: &PadicSeries) -> bool {
    f.tail().iter().all(|c| c.valuation_lower_bound().is_none_or(|v| v >= 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Exp,
    Quot,
    Both,
}

impl std::str::FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exp" => Ok(Self::Exp),
            "quot" => Ok(Self::Quot),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown route {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DSeriesResult {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub m_max: usize,
    pub precision: i64,
    /// Smallest absolute precision before truncation to `precision`.
    pub tracked_precision: Option<i64>,
    pub integral: bool,
    pub coefficients: PadicSeries,
    pub newton_polygon: NewtonPolygon,
}

impl DSeriesResult {
    fn new(params: FamilyParams, k: i64, m_max: usize, target: i64, full: PadicSeries) -> Self {
        let coefficients = full.truncate_precision(target);
        Self {
            params,
            k,
            m_max,
            precision: target,
            tracked_precision: full.min_precision(),
            integral: is_integral(&full),
            newton_polygon: coefficients.newton_polygon(),
            coefficients,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LSeriesResult {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub m_max: usize,
    pub precision: i64,
    pub route: Route,
    pub tracked_precision: Option<i64>,
    /// `Some(true)` when both routes were computed and agree.
    pub routes_agree: Option<bool>,
    pub integral: bool,
    pub coefficients: PadicSeries,
    pub newton_polygon: NewtonPolygon,
}

impl LSeriesResult {
    #[allow(clippy::too_many_arguments)]
    fn new(
        params: FamilyParams,
        k: i64,
        m_max: usize,
        target: i64,
        route: Route,
        full: PadicSeries,
        tracked_precision: Option<i64>,
        routes_agree: Option<bool>,
    ) -> Self {
        let coefficients = full.truncate_precision(target);
        Self {
            params,
            k,
            m_max,
            precision: target,
            route,
            tracked_precision,
            routes_agree,
            integral: is_integral(&full),
            newton_polygon: coefficients.newton_polygon(),
            coefficients,
        }
    }
}
