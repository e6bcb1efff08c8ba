//! Finite, checkable reports: the quotient identity for `L`, congruences
//! between weights, exact-versus-embedded agreement, field generation by the
//! exact `C_m(k)`, linear independence of square roots, and pole
//! certificates on the circle `|T|_p = p`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::pow_u64;
use crate::exact::{mq_field_degree, radicand_rank, squarefree_decompose, ExactError, MultiQuadElement};
use crate::padic::PadicScalar;
use crate::series::{NewtonPolygon, PadicSeries};
use crate::trace::{
    exponential_route, is_integral, quotient_route, working_precision, FamilyParams, TermTable, TraceEngine, TraceError,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientAgreement {
    pub index: usize,
    pub exponential: PadicScalar,
    pub quotient: PadicScalar,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub m_max: usize,
    pub precision: i64,
    pub agree: bool,
    pub first_disagreement: Option<usize>,
    /// Smallest absolute precision over both routes, before truncation.
    pub min_tracked_precision: Option<i64>,
    /// `C_1(k) = A_1(k+2) - p A_1(k)`.
    pub first_order_identity: bool,
    pub integral: bool,
    pub coefficients: Vec<CoefficientAgreement>,
}

/// Where to perturb the input of [`check_identity_values`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tamper {
    /// Add `p^(precision - 1)` to `A_m(k+2)` for this `m`.
    pub m: usize,
}

/// Compares `exp(sum C_m T^m/m)` with `D(k+2, T) / D(k, pT)` to `precision` digits.
pub fn check_identity(
    engine: &TraceEngine<'_>,
    k: i64,
    m_max: usize,
    precision: i64,
) -> Result<IdentityReport, TraceError> {
    let work = working_precision(engine.params().p, precision, m_max);
    let table = engine.term_table(m_max, work)?;
    check_identity_values(engine.params(), &table, k, precision, None)
}

pub fn check_identity_values(
    params: FamilyParams,
    table: &TermTable,
    k: i64,
    precision: i64,
    tamper: Option<Tamper>,
) -> Result<IdentityReport, TraceError> {
    let p = params.p;
    let m_max = table.m_max();
    let c = table.c_values(k)?;
    let a_k = table.a_values(k)?;
    let mut a_k2 = table.a_values(k + 2)?;
    if let Some(Tamper { m }) = tamper {
        if m == 0 || m > m_max {
            return Err(TraceError::BadParameter(format!("tamper index {m} outside 1..={m_max}")));
        }
        let bump = PadicScalar::from_integer(p, &pow_u64(p, (precision - 1) as u32), table.precision());
        a_k2[m - 1] = &a_k2[m - 1] + &bump;
    }
    let exp = exponential_route(p, &c)?;
    let quot = quotient_route(p, &a_k, &a_k2)?;
    let first_order = {
        let rhs = &a_k2[0] - &a_k[0].mul_integer(&BigInt::from(p));
        c[0].truncate(precision).agrees_with(&rhs.truncate(precision))
    };
    let exp_t = exp.truncate_precision(precision);
    let quot_t = quot.truncate_precision(precision);
    let coefficients: Vec<CoefficientAgreement> = exp_t
        .tail()
        .iter()
        .zip(quot_t.tail())
        .enumerate()
        .map(|(i, (e, q))| CoefficientAgreement {
            index: i + 1,
            exponential: e.clone(),
            quotient: q.clone(),
            agree: e.agrees_with(q),
        })
        .collect();
    let first_disagreement = coefficients.iter().find(|c| !c.agree).map(|c| c.index);
    Ok(IdentityReport {
        params,
        k,
        m_max,
        precision,
        agree: first_disagreement.is_none(),
        first_disagreement,
        min_tracked_precision: [exp.min_precision(), quot.min_precision()].into_iter().flatten().min(),
        first_order_identity: first_order,
        integral: is_integral(&exp) && is_integral(&quot),
        coefficients,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceEntry {
    pub m: usize,
    pub a_k: PadicScalar,
    pub a_shifted: PadicScalar,
    pub a_congruent: bool,
    pub c_k: PadicScalar,
    pub c_shifted: PadicScalar,
    pub c_congruent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub shifted_k: i64,
    pub s: u32,
    /// Congruences are checked modulo `p^(s+1)`.
    pub modulus_exponent: i64,
    pub holds: bool,
    pub entries: Vec<CongruenceEntry>,
}

fn congruent(x: &PadicScalar, y: &PadicScalar, e: i64) -> bool {
    (x - y).valuation_lower_bound().is_none_or(|v| v >= e)
}

/// `A_m(k) = A_m(k + (p-1)p^s)` and the same for `C_m`, modulo `p^(s+1)`.
pub fn check_continuity(
    engine: &TraceEngine<'_>,
    k: i64,
    s: u32,
    m_max: usize,
    precision: i64,
) -> Result<ContinuityReport, TraceError> {
    let p = engine.params().p;
    let e = s as i64 + 1;
    if precision < e {
        return Err(TraceError::BadParameter(format!("precision {precision} is below the modulus p^{e}")));
    }
    let shift = (p as i64 - 1) * (p as i64).pow(s);
    let table = engine.term_table(m_max, precision)?;
    let (a1, a2) = (table.a_values(k)?, table.a_values(k + shift)?);
    let (c1, c2) = (table.c_values(k)?, table.c_values(k + shift)?);
    let entries: Vec<CongruenceEntry> = (0..m_max)
        .map(|i| CongruenceEntry {
            m: i + 1,
            a_congruent: congruent(&a1[i], &a2[i], e),
            c_congruent: congruent(&c1[i], &c2[i], e),
            a_k: a1[i].truncate(e),
            a_shifted: a2[i].truncate(e),
            c_k: c1[i].truncate(e),
            c_shifted: c2[i].truncate(e),
        })
        .collect();
    Ok(ContinuityReport {
        params: engine.params(),
        k,
        shifted_k: k + shift,
        s,
        modulus_exponent: e,
        holds: entries.iter().all(|x| x.a_congruent && x.c_congruent),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactAgreementEntry {
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub c_exact: MultiQuadElement,
    pub embedded: PadicScalar,
    pub from_a: PadicScalar,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactAgreementReport {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub precision: i64,
    pub holds: bool,
    pub entries: Vec<ExactAgreementEntry>,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// Image of the exact `C_m(k)` under the fixed embedding against `A_m(k+2) - p^m A_m(k)`.
pub fn check_exact_agreement(
    engine: &TraceEngine<'_>,
    k: i64,
    m_max: usize,
    precision: i64,
) -> Result<ExactAgreementReport, TraceError> {
    let p = engine.params().p;
    let table = engine.term_table(m_max, precision)?;
    let exact = table.c_exact_values(k)?;
    let (a_k, a_k2) = (table.a_values(k)?, table.a_values(k + 2)?);
    let mut entries = Vec::with_capacity(m_max);
    for (i, c) in exact.into_iter().enumerate() {
        let m = i as u32 + 1;
        let embedded = engine.embedding().embed_multiquad(&c, precision)?.truncate(precision);
        let from_a = (&a_k2[i] - &a_k[i].mul_integer(&pow_u64(p, m))).truncate(precision);
        entries.push(ExactAgreementEntry {
            m: i + 1,
            agree: embedded.agrees_with(&from_a) && embedded.absprec() == from_a.absprec(),
            c_exact: c,
            embedded,
            from_a,
        });
    }
    Ok(ExactAgreementReport { params: engine.params(), k, precision, holds: entries.iter().all(|e| e.agree), entries })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoleCertificate {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub m_max: usize,
    pub precision: i64,
    /// Valuation of `T` on the circle where poles are counted: `|T|_p = p`.
    pub circle_valuation: i64,
    /// Slope-0 multiplicity of `D(k, T)`: zeros of `D(k, pT)` on the circle.
    pub denominator_circle_zeros: usize,
    /// Slope-1 multiplicity of `D(k+2, T)`: zeros of the numerator on the circle.
    pub numerator_circle_zeros: usize,
    pub certified_poles: usize,
    /// Set when an uncertain Newton vertex makes the count only a lower bound.
    pub lower_bound: bool,
    /// The numerator count is read from the truncated polygon.
    pub truncation_conditional: bool,
    /// Valuations of `T` at the counted poles (all equal to `circle_valuation`).
    pub pole_valuations: Vec<i64>,
    pub numerator_polygon: NewtonPolygon,
    pub denominator_polygon: NewtonPolygon,
}

impl PoleCertificate {
    pub fn summary(&self) -> String {
        format!("{} certified poles on |T|=p", self.certified_poles)
    }
}

pub fn pole_certificate(
    engine: &TraceEngine<'_>,
    k: i64,
    m_max: usize,
    precision: i64,
) -> Result<PoleCertificate, TraceError> {
    let p = engine.params().p;
    let work = working_precision(p, precision, m_max);
    let table = engine.term_table(m_max, work)?;
    let num = table.d_series(k + 2)?.truncate_precision(precision);
    let den_unscaled = table.d_series(k)?.truncate_precision(precision);
    if !is_integral(&num) || !is_integral(&den_unscaled) {
        return Err(TraceError::Invariant(format!("D(k, T) is not integral at k = {k}")));
    }
    pole_certificate_from_series(engine.params(), k, precision, &num, &den_unscaled)
}

/// Certificate from `D(k+2, T)` and `D(k, T)`; the denominator is rescaled here.
pub fn pole_certificate_from_series(
    params: FamilyParams,
    k: i64,
    precision: i64,
    numerator: &PadicSeries,
    denominator_unscaled: &PadicSeries,
) -> Result<PoleCertificate, TraceError> {
    let den = denominator_unscaled.scale_argument(1);
    let numerator_polygon = numerator.newton_polygon();
    let denominator_polygon = den.newton_polygon();
    // zeros of D(k, pT) have valuation -slope; slopes below 1 would put a pole inside |T| <= 1
    if denominator_polygon.segments().iter().any(|s| s.slope < Rational64::one()) {
        return Err(TraceError::Invariant("denominator has a zero with |T|_p < p".into()));
    }
    let (d0, den_ok) = denominator_polygon.multiplicity(Rational64::one());
    let (n1, num_ok) = numerator_polygon.multiplicity(Rational64::one());
    let certified = d0.saturating_sub(n1);
    let circle_valuation = -1;
    Ok(PoleCertificate {
        params,
        k,
        m_max: numerator.degree().min(den.degree()),
        precision,
        circle_valuation,
        denominator_circle_zeros: d0,
        numerator_circle_zeros: n1,
        certified_poles: certified,
        lower_bound: !(den_ok && num_ok),
        truncation_conditional: true,
        pole_valuations: vec![circle_valuation; certified],
        numerator_polygon,
        denominator_polygon,
    })
}

/// First `k` in `range` whose certificate shows at least one pole.
pub fn find_pole_witness(
    engine: &TraceEngine<'_>,
    ks: impl IntoIterator<Item = i64>,
    m_max: usize,
    precision: i64,
) -> Result<Option<PoleCertificate>, TraceError> {
    let work = working_precision(engine.params().p, precision, m_max);
    let table = engine.term_table(m_max, work)?;
    for k in ks {
        let num = table.d_series(k + 2)?.truncate_precision(precision);
        let den = table.d_series(k)?.truncate_precision(precision);
        let cert = pole_certificate_from_series(engine.params(), k, precision, &num, &den)?;
        if cert.certified_poles > 0 {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldLevel {
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub c_exact: MultiQuadElement,
    pub support: Vec<BigInt>,
    /// `[Q(C_1, ..., C_m) : Q]`.
    pub cumulative_degree: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainedField {
    pub radicand: BigInt,
    /// First `m` whose `C_m(k)` has this radicand in its support.
    pub first_m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldGenerationReport {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub k: i64,
    pub levels: Vec<FieldLevel>,
    /// Quadratic fields `Q(sqrt d)` certified to lie in the generated field.
    pub contained_fields: Vec<ContainedField>,
}

/// Field generated by the exact `C_1(k), ..., C_m(k)` for each `m <= m_max`.
///
/// A nonzero combination of square roots of distinct squarefree integers
/// generates the field of all of them, so `Q(C_1, ..., C_m)` is the field of
/// the union of the supports.
pub fn field_generation_report(
    engine: &TraceEngine<'_>,
    k: i64,
    m_max: usize,
) -> Result<FieldGenerationReport, TraceError> {
    if k < 1 {
        return Err(TraceError::BadParameter(format!("field generation needs k >= 1, got {k}")));
    }
    let table = engine.term_table(m_max, 1)?;
    let mut union: Vec<BigInt> = Vec::new();
    let mut first_seen: BTreeMap<BigInt, usize> = BTreeMap::new();
    let mut levels = Vec::with_capacity(m_max);
    for (i, c) in table.c_exact_values(k)?.into_iter().enumerate() {
        let support = c.support();
        for d in &support {
            first_seen.entry(d.clone()).or_insert(i + 1);
            if !union.contains(d) {
                union.push(d.clone());
            }
        }
        levels.push(FieldLevel { m: i + 1, cumulative_degree: mq_field_degree(&union)?, support, c_exact: c });
    }
    let contained_fields =
        first_seen.into_iter().map(|(radicand, first_m)| ContainedField { radicand, first_m }).collect();
    Ok(FieldGenerationReport { params: engine.params(), k, levels, contained_fields })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub nonzero: bool,
    /// Radicands (other than 1) with nonzero coefficient.
    pub support: Vec<BigInt>,
    /// Degree of the field generated by the combination.
    pub generated_degree: BigUint,
    pub support_rank: usize,
}

/// Whether `sum a_i sqrt(n_i)` vanishes, for distinct squarefree `n_i`, and
/// the degree of the field it generates.
pub fn independence_check(coeffs: &[BigRational], radicands: &[BigInt]) -> Result<IndependenceReport, ExactError> {
    if coeffs.len() != radicands.len() {
        return Err(ExactError::LengthMismatch);
    }
    let mut seen = std::collections::BTreeSet::new();
    for d in radicands {
        if d.is_zero() {
            return Err(ExactError::BadRadicand(d.clone()));
        }
        if !squarefree_decompose(d)?.square_part.is_one() {
            return Err(ExactError::NotSquarefree(d.clone()));
        }
        if !seen.insert(d.clone()) {
            return Err(ExactError::DuplicateRadicand(d.clone()));
        }
    }
    let x = MultiQuadElement::from_terms(radicands.iter().cloned().zip(coeffs.iter().cloned()))?;
    let support = x.support();
    Ok(IndependenceReport {
        nonzero: !x.is_zero(),
        generated_degree: mq_field_degree(&support)?,
        support_rank: radicand_rank(&support)?,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::ClassNumberCache;

    fn int(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(int(n))
    }

    #[test]
    fn independence_examples() {
        let r = independence_check(&[rat(1), rat(-1)], &[int(2), int(3)]).unwrap();
        assert!(r.nonzero);
        assert_eq!(r.generated_degree, BigUint::from(4u32));
        let r = independence_check(&[rat(0), rat(0)], &[int(2), int(3)]).unwrap();
        assert!(!r.nonzero);
        assert_eq!(r.generated_degree, BigUint::one());
        assert_eq!(
            independence_check(&[rat(1), rat(2)], &[int(5), int(5)]),
            Err(ExactError::DuplicateRadicand(int(5)))
        );
        assert_eq!(independence_check(&[rat(1)], &[int(12)]), Err(ExactError::NotSquarefree(int(12))));
    }

    #[test]
    fn identity_small() {
        let cache = ClassNumberCache::new();
        let engine = TraceEngine::new(FamilyParams::new(5, 7).unwrap(), &cache);
        let r = check_identity(&engine, 2, 5, 20).unwrap();
        assert!(r.agree && r.first_order_identity && r.integral);
        let r1 = check_identity(&engine, 2, 1, 20).unwrap();
        assert!(r1.agree && r1.first_order_identity);
        assert_eq!(r1.coefficients.len(), 1);
    }

    #[test]
    fn tampering_is_detected_at_its_index() {
        let cache = ClassNumberCache::new();
        let params = FamilyParams::new(5, 7).unwrap();
        let engine = TraceEngine::new(params, &cache);
        let table = engine.term_table(5, working_precision(5, 20, 5)).unwrap();
        for m in 1..=5 {
            let r = check_identity_values(params, &table, 2, 20, Some(Tamper { m })).unwrap();
            assert_eq!(r.first_disagreement, Some(m), "tamper at {m}");
        }
        assert!(check_identity_values(params, &table, 2, 20, Some(Tamper { m: 6 })).is_err());
    }

    #[test]
    fn continuity_trivial_shift() {
        let cache = ClassNumberCache::new();
        let engine = TraceEngine::new(FamilyParams::new(5, 7).unwrap(), &cache);
        let r = check_continuity(&engine, 2, 0, 3, 5).unwrap();
        assert!(r.holds);
        assert_eq!(r.shifted_k, 6);
        assert!(check_continuity(&engine, 2, 3, 3, 2).is_err());
    }

    #[test]
    fn field_generation_needs_positive_k() {
        let cache = ClassNumberCache::new();
        let engine = TraceEngine::new(FamilyParams::new(5, 7).unwrap(), &cache);
        assert!(field_generation_report(&engine, 0, 2).is_err());
        let r = field_generation_report(&engine, 1, 1).unwrap();
        // only t = -1 contributes at m = 1: C_1(1) = 6 gamma with gamma in Q(sqrt -19)
        assert_eq!(r.levels[0].support, vec![int(-19)]);
        assert_eq!(r.levels[0].cumulative_degree, BigUint::from(2u32));
    }

    #[test]
    fn zero_denominator_slope_gives_no_poles() {
        let p = 5;
        let params = FamilyParams::new(p, 7).unwrap();
        let z = |n: i64| PadicScalar::from_integer(p, &int(n), 10);
        // D(k, T) with all coefficients divisible by p: no slope-0 part
        let den = PadicSeries::new(p, vec![z(5), z(25)]);
        let num = PadicSeries::new(p, vec![z(1), z(3)]);
        let cert = pole_certificate_from_series(params, 1, 10, &num, &den).unwrap();
        assert_eq!(cert.certified_poles, 0);
        assert_eq!(cert.summary(), "0 certified poles on |T|=p");
        // one unit root on the denominator side, none cancelled
        let den = PadicSeries::new(p, vec![z(1), z(25)]);
        let cert = pole_certificate_from_series(params, 1, 10, &num, &den).unwrap();
        assert_eq!((cert.denominator_circle_zeros, cert.certified_poles), (1, 1));
        assert_eq!(cert.pole_valuations, vec![-1]);
        // a numerator zero on the same circle cancels it
        let num = PadicSeries::new(p, vec![z(5), z(1)]);
        let cert = pole_certificate_from_series(params, 1, 10, &num, &den).unwrap();
        assert_eq!(cert.numerator_circle_zeros, 0);
        let num = PadicSeries::new(p, vec![z(5), z(0)]);
        let cert = pole_certificate_from_series(params, 1, 10, &num, &den).unwrap();
        assert_eq!((cert.numerator_circle_zeros, cert.certified_poles), (1, 0));
    }
}
