//! Integer arithmetic primitives: p-adic valuations, residues, and the
//! valuation of differences of weight points w_k.
//!
//! Weight points w_k = exp(p(k-2)) - 1 are never materialised; the only fact
//! about them used anywhere is v_p(w_k - w_l) = 1 + v_p(k - l), which is what
//! [`wdiff_val`] computes.

use crate::{Error, Rat, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Add;

/// A p-adic valuation: a nonnegative integer or infinity (valuation of 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u64),
    Infinity,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// The finite value, or `None` for infinity.
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// Compare against an exact rational; infinity exceeds everything.
    pub fn ge_rat(self, bound: Rat) -> bool {
        match self {
            Valuation::Infinity => true,
            Valuation::Finite(v) => Rat::from_integer(v as i64) >= bound,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => std::cmp::Ordering::Equal,
            (Valuation::Infinity, _) => std::cmp::Ordering::Greater,
            (_, Valuation::Infinity) => std::cmp::Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Trial-division primality test; the primes in play are small.
pub fn is_prime(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest e with p^e | n; infinity for n = 0.
pub fn padic_val(n: i64, p: i64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::InvalidParam(format!("p = {p} is not prime")));
    }
    Ok(padic_val_prime(n, p))
}

/// Same as [`padic_val`] but assumes p is already known prime.
pub(crate) fn padic_val_prime(n: i64, p: i64) -> Valuation {
    if n == 0 {
        return Valuation::Infinity;
    }
    let mut n = n.unsigned_abs();
    let p = p as u64;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Valuation::Finite(e)
}

/// The representative of x mod m in [0, m-1]; correct for negative x.
pub fn residue(x: i64, m: i64) -> Result<i64> {
    if m <= 0 {
        return Err(Error::InvalidParam(format!("modulus m = {m} must be >= 1")));
    }
    Ok(x.rem_euclid(m))
}

/// v_p(w_k - w_l) = 1 + v_p(k - l); infinity when k = l.
pub fn wdiff_val(k: i64, l: i64, p: i64) -> Valuation {
    match padic_val_prime(k - l, p) {
        Valuation::Finite(v) => Valuation::Finite(1 + v),
        Valuation::Infinity => Valuation::Infinity,
    }
}

/// floor(log_p(x)) for x >= 1, i.e. the largest e with p^e <= x.
pub fn ilog_p(x: i64, p: i64) -> i64 {
    debug_assert!(x >= 1 && p >= 2);
    let mut e = 0;
    let mut acc = 1i64;
    while acc <= x / p {
        acc *= p;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn padic_val_examples() {
        assert_eq!(padic_val(1, 11).unwrap(), Valuation::Finite(0));
        assert_eq!(padic_val(0, 11).unwrap(), Valuation::Infinity);
        assert_eq!(padic_val(1331, 11).unwrap(), Valuation::Finite(3));
        assert_eq!(padic_val(-1331, 11).unwrap(), Valuation::Finite(3));
    }

    #[test]
    fn padic_val_rejects_nonprime() {
        assert!(padic_val(10, 4).is_err());
        assert!(padic_val(10, 1).is_err());
        assert!(padic_val(10, -7).is_err());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue(-2, 10).unwrap(), 8);
        assert_eq!(residue(18, 10).unwrap(), 8);
        assert_eq!(residue(10, 10).unwrap(), 0);
        assert!(residue(3, 0).is_err());
    }

    #[test]
    fn wdiff_val_examples() {
        assert_eq!(wdiff_val(4, 14, 11), Valuation::Finite(1));
        assert_eq!(wdiff_val(4, 114, 11), Valuation::Finite(2));
        assert_eq!(wdiff_val(7, 7, 11), Valuation::Infinity);
    }

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(Valuation::Infinity + Valuation::Finite(5), Valuation::Infinity);
        assert_eq!(Valuation::Finite(5) + Valuation::Infinity, Valuation::Infinity);
        assert_eq!(Valuation::Finite(2) + Valuation::Finite(3), Valuation::Finite(5));
    }

    #[test]
    fn ilog_p_values() {
        assert_eq!(ilog_p(1, 11), 0);
        assert_eq!(ilog_p(10, 11), 0);
        assert_eq!(ilog_p(11, 11), 1);
        assert_eq!(ilog_p(121, 11), 2);
        assert_eq!(ilog_p(1330, 11), 2);
    }

    proptest! {
        #[test]
        fn wdiff_symmetric(k in -1000i64..1000, l in -1000i64..1000) {
            prop_assert_eq!(wdiff_val(k, l, 11), wdiff_val(l, k, 11));
        }

        #[test]
        fn wdiff_at_least_one(k in -1000i64..1000, l in -1000i64..1000) {
            prop_assume!(k != l);
            let v = wdiff_val(k, l, 11).finite().unwrap();
            prop_assert!(v >= 1);
        }

        #[test]
        fn padic_val_multiplicative(a in 1i64..10_000, b in 1i64..10_000) {
            let va = padic_val(a, 13).unwrap().finite().unwrap();
            let vb = padic_val(b, 13).unwrap().finite().unwrap();
            let vab = padic_val(a * b, 13).unwrap().finite().unwrap();
            prop_assert_eq!(vab, va + vb);
        }
    }
}
