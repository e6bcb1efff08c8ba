//! Brute-force reference implementations shared by the integration tests.
//! None of these call into the library's arithmetic.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `n = s^2 * d0` with `d0` squarefree, by trial division.
pub fn square_split(n: i64) -> (i64, i64) {
    let (mut s, mut d0, mut rest) = (1i64, n.signum(), n.abs());
    let mut q = 2;
    while q * q <= rest {
        let mut e = 0;
        while rest % q == 0 {
            rest /= q;
            e += 1;
        }
        s *= q.pow(e / 2);
        if e % 2 == 1 {
            d0 *= q;
        }
        q += 1;
    }
    (s, d0 * rest)
}

/// Primitive forms `(a, b, c)`, `b^2 - 4ac = d`, with `|b| <= bound` and `a, c >= 1`,
/// grouped into connected components under `(a,b,c) -> (c,-b,a)` and
/// `(a,b,c) -> (a, b +- 2a, a +- b + c)` restricted to the box.
pub fn brute_class_number(d: i64) -> u64 {
    assert!(d < 0 && matches!(d.rem_euclid(4), 0 | 1));
    let bound = 2 * ((-d) as f64).sqrt() as i64 + 4;
    let mut forms = HashSet::new();
    for b in -bound..=bound {
        let ac = b * b - d;
        if ac % 4 != 0 {
            continue;
        }
        let ac = ac / 4;
        for a in 1..=ac {
            if ac % a == 0 {
                let c = ac / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    forms.insert((a, b, c));
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let mut components = 0;
    for &start in &forms {
        if !seen.insert(start) {
            continue;
        }
        components += 1;
        let mut queue = VecDeque::from([start]);
        while let Some((a, b, c)) = queue.pop_front() {
            for next in [(c, -b, a), (a, b + 2 * a, a + b + c), (a, b - 2 * a, a - b + c)] {
                if forms.contains(&next) && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    components
}

/// Coordinates of `(t + g sqrt d_k) / 2` on the basis `{1, c (d_k + sqrt d_k) / 2}`.
pub fn coords(d_k: i64, c: i64, t: i64, g: i64) -> Option<(i64, i64)> {
    let twice_a = t - g * d_k;
    (twice_a % 2 == 0 && g % c == 0).then_some((twice_a / 2, g / c))
}

/// Fixed points of exact order `n` of `x -> gamma x` on `O/nO`, by iterating over `(Z/n)^2`.
pub fn brute_bn(d_k: i64, c: i64, gamma: (i64, i64), n: i64) -> u64 {
    let tr = c * d_k;
    let nm = c * c * (d_k * d_k - d_k) / 4;
    let (ga, gb) = gamma;
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            if x.gcd(&y).gcd(&n) != 1 {
                continue;
            }
            // (ga + gb th)(x + y th) with th^2 = tr th - nm
            let u = ga * x - gb * y * nm;
            let v = ga * y + gb * x + gb * y * tr;
            if (u - x).rem_euclid(n) == 0 && (v - y).rem_euclid(n) == 0 {
                count += 1;
            }
        }
    }
    count
}

pub fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn fundamental(d0: i64) -> (i64, bool) {
    if d0.rem_euclid(4) == 1 {
        (d0, false)
    } else {
        (4 * d0, true)
    }
}

/// Ordinary traces at `p^m`, ascending.
pub fn traces(p: i64, m: u32) -> Vec<i64> {
    let q = p.pow(m);
    (-2 * q..=2 * q).filter(|t| t * t < 4 * q && t % p != 0).collect()
}

/// The root of `x^2 - t x + p^m` congruent to `t` mod `p`, found one digit at a time.
pub fn digit_lift_root(t: i64, p: i64, m: u32, digits: u32) -> BigInt {
    let pb = BigInt::from(p);
    let f = |x: &BigInt| x * x - BigInt::from(t) * x + pb.pow(m);
    let mut x = BigInt::from(t).mod_floor(&pb);
    for j in 1..digits {
        let pj = pb.pow(j);
        let next = pb.pow(j + 1);
        x = (0..p).map(|digit| &x + &pj * digit).find(|y| f(y).mod_floor(&next).is_zero()).expect("a lift exists");
    }
    x
}

/// Inverse of a unit modulo `p^e` via Euler's theorem.
pub fn inverse_mod(x: &BigInt, p: i64, e: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(e);
    let phi = BigInt::from(p).pow(e - 1) * (p - 1);
    x.modpow(&(phi - 1), &modulus)
}

/// `(a, b)` meaning `a + b sqrt d` over the rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct Surd {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

impl Surd {
    pub fn mul(&self, o: &Surd) -> Surd {
        assert_eq!(self.d, o.d);
        let d = BigRational::from_integer(BigInt::from(self.d));
        Surd { a: &self.a * &o.a + &self.b * &o.b * d, b: &self.a * &o.b + &self.b * &o.a, d: self.d }
    }

    pub fn pow(&self, k: u32) -> Surd {
        let mut acc = Surd { a: BigRational::one(), b: BigRational::zero(), d: self.d };
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Smallest `r` in `[1, p-1]` with `r^2 = d` mod `p`.
pub fn smallest_root(d: i64, p: i64) -> i64 {
    (1..p).find(|r| (r * r - d).rem_euclid(p) == 0).expect("d is a square mod p")
}

/// Every weighted term at `p^m`: `(t, s, d0, h * B)` summed over orders.
pub fn weighted_traces(p: i64, level: i64, m: u32) -> Vec<(i64, i64, i64, u64)> {
    let mut out = Vec::new();
    for t in traces(p, m) {
        let (s, d0) = square_split(t * t - 4 * p.pow(m));
        let (d_k, halve) = fundamental(d0);
        let f = if halve { s / 2 } else { s };
        let mut w = 0;
        for c in divisors(f) {
            let gamma = coords(d_k, c, t, f).expect("gamma lies in every order of conductor dividing f");
            w += brute_class_number(c * c * d_k) * brute_bn(d_k, c, gamma, level);
        }
        out.push((t, s, d0, w));
    }
    out
}

/// Exact `sum h B gamma^k` as `radicand -> coefficient` (radicand 1 for the rational part).
pub fn brute_c_exact(p: i64, level: i64, m: u32, k: u32) -> BTreeMap<i64, BigRational> {
    let mut acc: BTreeMap<i64, BigRational> = BTreeMap::new();
    for (t, s, d0, w) in weighted_traces(p, level, m) {
        if w == 0 {
            continue;
        }
        let r0 = smallest_root(d0, p);
        let eps = if (s * r0 - t).rem_euclid(p) == 0 { 1 } else { -1 };
        let half = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(2));
        let g = Surd { a: half(t), b: half(eps * s), d: d0 }.pow(k);
        let w = BigRational::from_integer(BigInt::from(w));
        *acc.entry(1).or_insert_with(BigRational::zero) += &g.a * &w;
        *acc.entry(d0).or_insert_with(BigRational::zero) += &g.b * &w;
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// `A_m(k)` modulo `p^digits` for `k >= 0`.
pub fn brute_a(p: i64, level: i64, m: u32, k: u32, digits: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(digits);
    let pm = BigInt::from(p).pow(m);
    let mut acc = BigInt::zero();
    for (t, _, _, w) in weighted_traces(p, level, m) {
        if w == 0 {
            continue;
        }
        let g = digit_lift_root(t, p, m, digits);
        let den = (&g * &g - &pm).mod_floor(&modulus);
        let term = g.modpow(&BigInt::from(k), &modulus) * inverse_mod(&den, p, digits) * BigInt::from(w);
        acc = (acc + term).mod_floor(&modulus);
    }
    acc
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && square_split(n).0 == 1
}

/// Size of the subgroup of `Q^* / Q^*2` generated by the radicands, by closing
/// the set of squarefree parts of products.
pub fn generated_group_size(radicands: &[i64]) -> usize {
    let mut group: HashSet<BigInt> = HashSet::from([BigInt::one()]);
    for &r in radicands {
        let r = BigInt::from(r);
        let new: Vec<BigInt> = group.iter().map(|g| squarefree_part(&(g * &r))).collect();
        group.extend(new);
    }
    group.len()
}

fn squarefree_part(n: &BigInt) -> BigInt {
    let mut rest = n.abs();
    let mut out = n.signum();
    let mut q = BigInt::from(2);
    while &q * &q <= rest {
        let mut e = 0;
        while (&rest % &q).is_zero() {
            rest /= &q;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &q;
        }
        q += 1;
    }
    out * rest
}
