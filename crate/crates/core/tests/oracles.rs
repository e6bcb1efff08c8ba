mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use unitroot::orders::{bn_count, class_number, OrderElement};
use unitroot::trace::ordinary_traces;
use unitroot::{ClassNumberCache, FamilyParams, OrderSpec, TraceEngine};

use common::*;

#[test]
fn class_numbers_match_form_graph_components() {
    for d in (-400i64..0).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
        assert_eq!(class_number(d).unwrap(), brute_class_number(d), "D = {d}");
    }
}

#[test]
fn known_class_numbers() {
    for (d, h) in [(-3, 1), (-4, 1), (-16, 1), (-23, 3), (-47, 5), (-56, 4), (-71, 7), (-163, 1), (-96, 4)] {
        assert_eq!(brute_class_number(d), h, "oracle at {d}");
        assert_eq!(class_number(d).unwrap(), h, "library at {d}");
    }
}

#[test]
fn fixed_point_counts_match_exhaustive_iteration() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut nonzero = 0;
    for _ in 0..200 {
        let p = [3i64, 5, 7, 11][rng.gen_range(0..4)];
        let m = rng.gen_range(1..=3u32);
        let ts = traces(p, m);
        let t = ts[rng.gen_range(0..ts.len())];
        let (s, d0) = square_split(t * t - 4 * p.pow(m));
        let (d_k, halve) = fundamental(d0);
        let f = if halve { s / 2 } else { s };
        let cs = divisors(f);
        let c = cs[rng.gen_range(0..cs.len())];
        let g = if rng.gen_bool(0.5) { f } else { -f };
        let n = rng.gen_range(5..=30i64);
        let order = OrderSpec::new(d_k, c as u64).unwrap();
        let elt = OrderElement::quadratic_integer(order, t, g).unwrap();
        let expected = brute_bn(d_k, c, coords(d_k, c, t, g).unwrap(), n);
        assert_eq!(bn_count(&elt, n as u64).unwrap(), expected, "p={p} m={m} t={t} c={c} N={n}");
        nonzero += (expected > 0) as u32;
    }
    assert!(nonzero >= 5, "too few nonzero counts to be informative: {nonzero}");
}

#[test]
fn fixed_point_counts_for_elements_near_one() {
    let mut rng = StdRng::seed_from_u64(12);
    let mut nonzero = 0;
    for _ in 0..300 {
        let d_k = [-3i64, -4, -7, -8, -11, -19, -20, -24, -43][rng.gen_range(0..9)];
        let c = rng.gen_range(1..=4i64);
        let n = rng.gen_range(5..=30i64);
        let q = *divisors(n).iter().filter(|&&q| q > 1).nth(rng.gen_range(0..2)).unwrap_or(&n);
        let a = 1 + q * rng.gen_range(-3..=3) + rng.gen_range(0..=1);
        let b = q * rng.gen_range(-3..=3) + rng.gen_range(0..=1);
        let order = OrderSpec::new(d_k, c as u64).unwrap();
        let elt = OrderElement { order, a: a as i128, b: b as i128 };
        let expected = brute_bn(d_k, c, (a, b), n);
        assert_eq!(bn_count(&elt, n as u64).unwrap(), expected, "d_K={d_k} c={c} a={a} b={b} N={n}");
        nonzero += (expected > 0) as u32;
    }
    assert!(nonzero > 50, "too few nonzero counts: {nonzero}");
}

#[test]
fn trace_counts() {
    let cache = ClassNumberCache::new();
    let terms = |p, n, m| TraceEngine::new(FamilyParams::new(p, n).unwrap(), &cache).enumerate_terms(m, 4).unwrap();
    let t = terms(5, 7, 1);
    assert_eq!(t.len(), 10);
    for x in &t {
        let orders = t.iter().filter(|y| y.t == x.t).count();
        assert_eq!(orders, if x.t.abs() == 2 { 2 } else { 1 }, "t = {}", x.t);
    }
    let t = terms(3, 5, 1);
    assert_eq!(t.len(), 4);
    assert!(t.iter().all(|x| x.f == 1));
    assert_eq!(ordinary_traces(5, 2), vec![-9, -8, -7, -6, -4, -3, -2, -1, 1, 2, 3, 4, 6, 7, 8, 9]);
    assert_eq!(ordinary_traces(5, 2), traces(5, 2));
}

#[test]
fn a_values_match_digit_by_digit_summation() {
    let cache = ClassNumberCache::new();
    for (p, n, m_max) in [(5u64, 7u64, 3u32), (3, 5, 3), (7, 5, 2)] {
        let engine = TraceEngine::new(FamilyParams::new(p, n).unwrap(), &cache);
        for m in 1..=m_max {
            for k in [0u32, 1, 2, 5] {
                let got = engine.compute_a(m, k as i64, 20).unwrap();
                let prec = got.absprec().expect("sum of units is not an exact zero") as u32;
                assert!(prec >= 20, "precision {prec}");
                let want = brute_a(p as i64, n as i64, m, k, 20);
                assert_eq!(got.residue().unwrap(), want, "p={p} N={n} m={m} k={k}");
            }
        }
    }
}

#[test]
fn exact_c_matches_surd_summation() {
    let cache = ClassNumberCache::new();
    for (p, n, m_max) in [(5u64, 7u64, 3u32), (7, 5, 2), (3, 7, 3)] {
        let engine = TraceEngine::new(FamilyParams::new(p, n).unwrap(), &cache);
        for m in 1..=m_max {
            for k in 0u32..=3 {
                let got = engine.compute_c_exact(m, k as i64).unwrap();
                let want = brute_c_exact(p as i64, n as i64, m, k);
                let mut support: Vec<i64> = want.keys().copied().filter(|&d| d != 1).collect();
                support.sort();
                let got_support: Vec<i64> = got.support().iter().map(|d| i64::try_from(d).unwrap()).collect();
                assert_eq!(got_support, support, "p={p} m={m} k={k}");
                for (d, c) in &want {
                    assert_eq!(&got.coefficient(&BigInt::from(*d)), c, "p={p} m={m} k={k} d={d}");
                }
                if want.is_empty() {
                    assert!(got.is_zero());
                }
            }
        }
    }
}

#[test]
fn first_exact_coefficient_at_five_seven() {
    // only t = -1 has fixed points at m = 1: h(-19) = 1, B_7 = 6, gamma = (-1 - sqrt -19)/2
    let c = brute_c_exact(5, 7, 1, 1);
    let r = |n: i64| BigRational::from_integer(BigInt::from(n));
    assert_eq!(c.get(&1), Some(&r(-3)));
    assert_eq!(c.get(&-19), Some(&r(-3)));
    assert_eq!(c.len(), 2);
    let zero_weight = brute_c_exact(5, 7, 1, 0);
    assert_eq!(zero_weight.get(&1), Some(&r(6)));
    assert!(!zero_weight.values().any(|v| v.is_zero()));
}

#[test]
fn negative_weights_satisfy_the_exact_identity() {
    let cache = ClassNumberCache::new();
    let engine = TraceEngine::new(FamilyParams::new(5, 7).unwrap(), &cache);
    let report = unitroot::analysis::check_exact_agreement(&engine, -3, 3, 20).unwrap();
    assert!(report.holds);
    assert!(report.entries.iter().any(|e| !e.c_exact.is_zero()));
}
