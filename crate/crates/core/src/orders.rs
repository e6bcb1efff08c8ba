//! Imaginary quadratic orders: discriminants, class numbers, and the
//! fixed-point counts `B_N(O, gamma)`.

use std::collections::HashMap;
use std::sync::RwLock;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::prime_divisors_u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("{0} is not a negative squarefree integer")]
    BadRadical(i64),
    #[error("{0} is not a negative discriminant (D < 0, D = 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),
    #[error("conductor must be positive")]
    BadConductor,
    #[error("level N = {0} must exceed 4")]
    InvalidLevel(u64),
    #[error("element does not have integral coordinates in the order of conductor {conductor}")]
    NotInOrder { conductor: u64 },
}

fn is_squarefree_i64(n: i64) -> bool {
    n != 0 && prime_divisors_u64(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// `d0` if `d0 = 1 (mod 4)`, else `4 d0`.
pub fn fundamental_discriminant(d0: i64) -> Result<i64, OrderError> {
    if d0 >= 0 || !is_squarefree_i64(d0) {
        return Err(OrderError::BadRadical(d0));
    }
    Ok(if d0.rem_euclid(4) == 1 { d0 } else { 4 * d0 })
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree_i64(d),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && is_squarefree_i64(q)
        }
        _ => false,
    }
}

/// The order of conductor `c` in the imaginary quadratic field of discriminant `d_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrderSpec {
    pub fundamental_disc: i64,
    pub conductor: u64,
}

impl OrderSpec {
    pub fn new(fundamental_disc: i64, conductor: u64) -> Result<Self, OrderError> {
        if !is_fundamental_discriminant(fundamental_disc) {
            return Err(OrderError::NotFundamental(fundamental_disc));
        }
        if conductor == 0 {
            return Err(OrderError::BadConductor);
        }
        Ok(Self { fundamental_disc, conductor })
    }

    pub fn discriminant(&self) -> i64 {
        let c = self.conductor as i64;
        c * c * self.fundamental_disc
    }

    /// Trace and norm of the basis element `theta = c * (d_K + sqrt d_K) / 2`.
    pub fn theta_trace_norm(&self) -> (i128, i128) {
        let c = self.conductor as i128;
        let dk = self.fundamental_disc as i128;
        (c * dk, c * c * (dk * dk - dk) / 4)
    }
}

/// `a + b * theta` in the basis `{1, theta}` of an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderElement {
    pub order: OrderSpec,
    pub a: i128,
    pub b: i128,
}

impl OrderElement {
    /// Coordinates of `(t + f sqrt d_K) / 2`, where `f` may be negative.
    pub fn quadratic_integer(order: OrderSpec, t: i64, f: i64) -> Result<Self, OrderError> {
        let c = order.conductor as i64;
        let not_in = OrderError::NotInOrder { conductor: order.conductor };
        // sqrt d_K = 2 theta / c - d_K
        let twice_a = t as i128 - f as i128 * order.fundamental_disc as i128;
        if twice_a % 2 != 0 || f % c != 0 {
            return Err(not_in);
        }
        Ok(Self { order, a: twice_a / 2, b: (f / c) as i128 })
    }

    /// Matrix of multiplication by this element on the basis `{1, theta}`, columns are images.
    pub fn multiplication_matrix(&self) -> [[i128; 2]; 2] {
        let (tr, nm) = self.order.theta_trace_norm();
        [[self.a, -self.b * nm], [self.b, self.a + self.b * tr]]
    }

    pub fn norm(&self) -> i128 {
        let m = self.multiplication_matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i128 {
        let m = self.multiplication_matrix();
        m[0][0] + m[1][1]
    }
}

/// Number of reduced primitive positive definite forms of discriminant `d`.
pub fn class_number(d: i64) -> Result<u64, OrderError> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(OrderError::InvalidDiscriminant(d));
    }
    let abs = -d;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= abs {
        for b in (1 - a)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    Ok(h)
}

/// Memoized class numbers, shared between worker threads.
#[derive(Debug, Default)]
pub struct ClassNumberCache {
    table: RwLock<HashMap<i64, u64>>,
}

impl ClassNumberCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_entries<I: IntoIterator<Item = (i64, u64)>>(entries: I) -> Self {
        Self { table: RwLock::new(entries.into_iter().collect()) }
    }

    pub fn get(&self, d: i64) -> Result<u64, OrderError> {
        if let Some(&h) = self.table.read().expect("cache lock").get(&d) {
            return Ok(h);
        }
        let h = class_number(d)?;
        self.table.write().expect("cache lock").insert(d, h);
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot sorted by discriminant, closest to zero first.
    pub fn entries(&self) -> Vec<(i64, u64)> {
        let mut v: Vec<_> = self.table.read().expect("cache lock").iter().map(|(&d, &h)| (d, h)).collect();
        v.sort_by_key(|&(d, _)| std::cmp::Reverse(d));
        v
    }
}

/// `|{x in (Z/n)^2 : A x = 0}|` from the Smith form `diag(d1, d2)` of `A`.
fn kernel_size(m: &[[i128; 2]; 2], n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let n = n as i128;
    let d1 = m[0][0].gcd(&m[0][1]).gcd(&m[1][0]).gcd(&m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if d1 == 0 {
        return (n * n) as u64;
    }
    let d2 = det / d1;
    (d1.gcd(&n) * d2.gcd(&n)) as u64
}

/// Elements of exact additive order `n` in the kernel of `A` on `(Z/n)^2`.
pub(crate) fn exact_order_kernel_count(a: &[[i128; 2]; 2], n: u64) -> u64 {
    prime_divisors_u64(n)
        .into_iter()
        .map(|(l, e)| {
            let q = l.pow(e);
            // order below l^e means divisible by l, i.e. l*y with y in ker mod l^(e-1)
            kernel_size(a, q) - kernel_size(a, q / l)
        })
        .product()
}

/// `B_N(O, gamma)`: elements of `O/NO` of exact order `N` fixed by multiplication by `gamma_bar`.
pub fn bn_count(gamma_bar: &OrderElement, n: u64) -> Result<u64, OrderError> {
    if n <= 4 {
        return Err(OrderError::InvalidLevel(n));
    }
    let mut m = gamma_bar.multiplication_matrix();
    m[0][0] -= 1;
    m[1][1] -= 1;
    Ok(exact_order_kernel_count(&m, n))
}

/// `N^2 * prod_{l | N} (1 - l^-2)`: the number of elements of exact order `N` in `(Z/N)^2`.
pub fn exact_order_total(n: u64) -> u64 {
    prime_divisors_u64(n).into_iter().map(|(l, e)| l.pow(2 * e) - l.pow(2 * e - 2)).product()
}
