use num_bigint::BigInt;
use proptest::prelude::*;
use unitroot::analysis::check_continuity;
use unitroot::trace::{working_precision, TraceError};
use unitroot::{ClassNumberCache, FamilyParams, Route, TraceEngine};

fn engine(cache: &ClassNumberCache, p: u64, n: u64) -> TraceEngine<'_> {
    TraceEngine::new(FamilyParams::new(p, n).unwrap(), cache)
}

#[test]
fn family_hypotheses() {
    assert_eq!(FamilyParams::new(2, 7), Err(TraceError::InvalidPrime(2)));
    assert_eq!(FamilyParams::new(15, 7), Err(TraceError::InvalidPrime(15)));
    assert_eq!(FamilyParams::new(5, 4), Err(TraceError::InvalidLevel(4)));
    assert_eq!(FamilyParams::new(5, 15), Err(TraceError::LevelNotCoprime { level: 15, p: 5 }));
    assert!(FamilyParams::new(3, 5).is_ok());
}

#[test]
fn working_precision_adds_guard_digits() {
    assert_eq!(working_precision(5, 20, 6), 23);
    assert_eq!(working_precision(5, 20, 4), 22);
    assert_eq!(working_precision(3, 10, 9), 14);
    assert_eq!("quot".parse::<Route>(), Ok(Route::Quot));
    assert!("other".parse::<Route>().is_err());
}

#[test]
fn empty_effective_sum_is_zero() {
    let cache = ClassNumberCache::new();
    // a fixed point needs N | N(gamma_bar - 1) = p^m + 1 - t, which is below 29 here
    let e = engine(&cache, 3, 29);
    let terms = e.enumerate_terms(1, 10).unwrap();
    assert_eq!(terms.len(), 4);
    assert!(terms.iter().all(|t| t.fixed_points == 0));
    assert!(e.compute_a(1, 4, 10).unwrap().is_exact_zero());
    assert!(e.compute_c_exact(1, 4).unwrap().is_zero());
}

#[test]
fn weight_zero_is_rational() {
    let cache = ClassNumberCache::new();
    let e = engine(&cache, 5, 7);
    for m in 1..=2 {
        let c = e.compute_c_exact(m, 0).unwrap();
        assert!(c.support().is_empty());
        let weights: u64 = e.enumerate_terms(m, 4).unwrap().iter().map(|t| t.weight()).sum();
        assert_eq!(c.rational_part(), num_rational::BigRational::from_integer(BigInt::from(weights)));
    }
}

#[test]
fn continuity_example() {
    let cache = ClassNumberCache::new();
    let e = engine(&cache, 5, 7);
    let a2 = e.compute_a(1, 2, 4).unwrap();
    let a22 = e.compute_a(1, 22, 4).unwrap();
    let diff = &a2 - &a22;
    assert!(diff.valuation_lower_bound().is_none_or(|v| v >= 2));
    let same = check_continuity(&e, 2, 1, 1, 4).unwrap();
    assert!(same.holds && same.shifted_k == 22);
}

#[test]
fn both_routes_report_agreement() {
    let cache = ClassNumberCache::new();
    let e = engine(&cache, 5, 6);
    let both = e.build_l(1, 4, 12, Route::Both).unwrap();
    assert_eq!(both.routes_agree, Some(true));
    let exp = e.build_l(1, 4, 12, Route::Exp).unwrap();
    let quot = e.build_l(1, 4, 12, Route::Quot).unwrap();
    assert_eq!(exp.coefficients, quot.coefficients);
    assert_eq!(both.coefficients, exp.coefficients);
    assert_eq!(exp.routes_agree, None);
}

#[test]
fn term_invariants() {
    let cache = ClassNumberCache::new();
    let e = engine(&cache, 7, 5);
    for m in 1..=3 {
        for t in e.enumerate_terms(m, 10).unwrap() {
            assert_eq!(t.gamma_padic.valuation(), Some(0));
            assert_eq!(t.order().discriminant() % (t.c as i64 * t.c as i64), 0);
            assert!(t.class_number >= 1);
            assert_eq!(t.f % t.c, 0);
            let disc = t.t * t.t - 4 * 7i64.pow(m);
            assert_eq!(disc % (t.f as i64 * t.f as i64 * t.d_k), 0);
            assert_eq!(disc, (t.f * t.f) as i64 * t.d_k);
        }
    }
}

#[test]
fn no_slope_zero_at_three_seven_for_even_weight() {
    let cache = ClassNumberCache::new();
    let d = engine(&cache, 3, 7).build_d(2, 5, 8).unwrap();
    assert!(d.coefficients.tail().iter().all(|c| c.valuation_lower_bound().is_none_or(|v| v >= 1)));
    assert!(d.newton_polygon.segments().iter().all(|s| s.slope > num_rational::Rational64::from_integer(0)));
    assert!(d.integral);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identity_and_integrality(fam in 0usize..4, k in -4i64..12, m_max in 1usize..5) {
        let (p, n) = [(5u64, 7u64), (5, 6), (7, 5), (3, 5)][fam];
        let cache = ClassNumberCache::new();
        let e = engine(&cache, p, n);
        let l = e.build_l(k, m_max, 10, Route::Both).unwrap();
        prop_assert_eq!(l.routes_agree, Some(true));
        prop_assert!(l.integral);
        prop_assert!(l.tracked_precision.is_none_or(|t| t >= 10));
        let d = e.build_d(k, m_max, 10).unwrap();
        prop_assert!(d.integral);
    }

    #[test]
    fn target_precision_only_truncates(k in 0i64..6) {
        let cache = ClassNumberCache::new();
        let e = engine(&cache, 5, 7);
        let lo = e.build_l(k, 4, 8, Route::Exp).unwrap();
        let hi = e.build_l(k, 4, 12, Route::Exp).unwrap();
        prop_assert_eq!(hi.coefficients.truncate_precision(8), lo.coefficients);
    }
}
