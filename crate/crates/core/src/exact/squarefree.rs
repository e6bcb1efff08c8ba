use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ExactError;
use crate::arith::{abs_biguint, factor};

/// `input = square_part^2 * radical` with `radical` squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquarefreeDecomposition {
    pub input: BigInt,
    pub square_part: BigInt,
    pub radical: BigInt,
}

pub fn squarefree_decompose(n: &BigInt) -> Result<SquarefreeDecomposition, ExactError> {
    if n.is_zero() {
        return Err(ExactError::ZeroInput);
    }
    let mut square_part = BigInt::one();
    let mut radical = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (q, e) in factor(&abs_biguint(n)) {
        let q = BigInt::from(q);
        square_part *= num_traits::pow(q.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            radical *= q;
        }
    }
    Ok(SquarefreeDecomposition { input: n.clone(), square_part, radical })
}

pub fn is_squarefree(n: &BigInt) -> bool {
    match squarefree_decompose(n) {
        Ok(dec) => dec.square_part.is_one(),
        Err(_) => false,
    }
}
