//! Finite-sequence combinators used by the recursive slope algorithms.
//!
//! Sequences are 1-indexed in all the combinator contracts, matching the
//! s[i] = a_i convention of the algorithm they serve.

use crate::{Error, Rat, Result};

pub type Seq = Vec<Rat>;

/// kappa(n, r): the constant sequence of length n, value r.
pub fn kappa(n: u64, r: Rat) -> Seq {
    vec![r; n as usize]
}

/// a followed by b.
pub fn concat(mut a: Seq, b: Seq) -> Seq {
    a.extend(b);
    a
}

/// Pointwise minimum of two equal-length sequences.
pub fn pointwise_min(a: &[Rat], b: &[Rat]) -> Result<Seq> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "pointwise_min length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (*x).min(*y)).collect())
}

/// v + e pointwise.
pub fn add_scalar(v: &[Rat], e: Rat) -> Seq {
    v.iter().map(|x| *x + e).collect()
}

/// (e - v)[i] = e - v[l(v) - i + 1]: complement with order reversed.
pub fn reflect(e: Rat, v: &[Rat]) -> Seq {
    v.iter().rev().map(|x| e - *x).collect()
}

/// sigma(v, delta): prefix of length delta; requires delta <= l(v).
pub fn truncate(v: &[Rat], delta: u64) -> Result<Seq> {
    let delta = delta as usize;
    if delta > v.len() {
        return Err(Error::Domain(format!(
            "truncate: delta = {delta} exceeds length {}",
            v.len()
        )));
    }
    Ok(v[..delta].to_vec())
}

/// sigma(v, d1, d2): the 1-indexed inclusive slice. The one-off degenerate
/// case d1 = d2 + 1 yields the empty sequence; anything further out of range
/// is an error.
pub fn slice(v: &[Rat], d1: u64, d2: u64) -> Result<Seq> {
    let n = v.len() as u64;
    if d1 == d2 + 1 && d1 >= 1 && d2 <= n {
        return Ok(Vec::new());
    }
    if d1 < 1 || d2 < 1 || d1 > n || d2 > n || d1 > d2 {
        return Err(Error::Domain(format!(
            "slice: indices ({d1}, {d2}) out of range for length {n}"
        )));
    }
    Ok(v[(d1 - 1) as usize..d2 as usize].to_vec())
}
