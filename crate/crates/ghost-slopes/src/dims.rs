//! Relevant-character bookkeeping and the closed-form dimension functions
//! d_k^Iw, d_k^ur, d_k^new.
//!
//! A character is represented solely by its index s_eps in [0, p-2]; the pair
//! (a, b) of [`GhostParams`] fixes everything else. Dimensions are
//! cardinalities, so the raw formulas are clamped below at 0; `*_raw` variants
//! expose the unclamped values so sweeps can surface clamp events.

use crate::arith::residue;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The triple (p, a, b) fixing the residual-representation type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GhostParams {
    pub p: i64,
    pub a: i64,
    pub b: i64,
}

impl GhostParams {
    /// Requires p prime >= 5, 1 <= a <= p-4, 0 <= b <= p-2.
    pub fn new(p: i64, a: i64, b: i64) -> Result<Self> {
        if !crate::arith::is_prime(p) || p < 5 {
            return Err(Error::InvalidParam(format!("p = {p} must be a prime >= 5")));
        }
        if !(1..=p - 4).contains(&a) {
            return Err(Error::InvalidParam(format!(
                "a = {a} must satisfy 1 <= a <= p-4 = {}",
                p - 4
            )));
        }
        if !(0..=p - 2).contains(&b) {
            return Err(Error::InvalidParam(format!(
                "b = {b} must satisfy 0 <= b <= p-2 = {}",
                p - 2
            )));
        }
        Ok(GhostParams { p, a, b })
    }

    /// Whether (p, a) lies in the hypothesis range of the main theorem
    /// (p >= 11 and 2 <= a <= p-5).
    pub fn strict(&self) -> bool {
        self.p >= 11 && (2..=self.p - 5).contains(&self.a)
    }
}

/// A relevant character, indexed by s_eps in [0, p-2].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharIndex {
    pub s_eps: i64,
}

impl CharIndex {
    pub fn new(params: &GhostParams, s_eps: i64) -> Result<Self> {
        if !(0..=params.p - 2).contains(&s_eps) {
            return Err(Error::InvalidParam(format!(
                "s_eps = {s_eps} must satisfy 0 <= s_eps <= p-2 = {}",
                params.p - 2
            )));
        }
        Ok(CharIndex { s_eps })
    }

    /// The index reduced by an integer shift: {s_eps + delta} mod p-1.
    pub fn shifted(&self, params: &GhostParams, delta: i64) -> CharIndex {
        CharIndex {
            s_eps: (self.s_eps + delta).rem_euclid(params.p - 1),
        }
    }
}

/// The three dimensions at one in-class weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimTriple {
    pub ur: u64,
    pub iw: u64,
    /// Only defined in-class (k = k_eps mod p-1).
    pub new: Option<u64>,
}

/// k_eps = 2 + {a + 2 s_eps} in [2, p].
pub fn k_eps(params: &GhostParams, char: CharIndex) -> i64 {
    2 + (params.a + 2 * char.s_eps).rem_euclid(params.p - 1)
}

/// Whether k lies in the congruence class k = k_eps mod p-1.
pub fn in_class(params: &GhostParams, char: CharIndex, k: i64) -> bool {
    (k - k_eps(params, char)).rem_euclid(params.p - 1) == 0
}

/// delta_eps = floor((s_eps + {a + s_eps}) / (p-1)), always 0 or 1.
pub fn delta_eps(params: &GhostParams, char: CharIndex) -> i64 {
    let s = char.s_eps;
    let r = (params.a + s).rem_euclid(params.p - 1);
    (s + r).div_euclid(params.p - 1)
}

/// Unclamped d_k^Iw(eps.(1 x omega^{2-k})) for any k >= 2.
pub fn dim_iw_raw(params: &GhostParams, char: CharIndex, k: i64) -> Result<i64> {
    if k < 2 {
        return Err(Error::Domain(format!("dim_iw requires k >= 2, got {k}")));
    }
    let s = char.s_eps;
    let r = (params.a + s).rem_euclid(params.p - 1);
    let m = params.p - 1;
    Ok((k - 2 - s).div_euclid(m) + (k - 2 - r).div_euclid(m) + 2)
}

/// d_k^Iw, clamped below at 0.
pub fn dim_iw(params: &GhostParams, char: CharIndex, k: i64) -> Result<u64> {
    Ok(dim_iw_raw(params, char, k)?.max(0) as u64)
}

/// Unclamped d_k^ur; 0 off-class.
pub fn dim_ur_raw(params: &GhostParams, char: CharIndex, k: i64) -> Result<i64> {
    if k < 2 {
        return Err(Error::Domain(format!("dim_ur requires k >= 2, got {k}")));
    }
    if !in_class(params, char, k) {
        return Ok(0);
    }
    let s = char.s_eps;
    let a = params.a;
    let delta = delta_eps(params, char);
    let r = (a + s).rem_euclid(params.p - 1);
    let (t1, t2) = if a + s < params.p - 1 {
        (s + delta, a + s + delta + 2)
    } else {
        (r + delta + 1, s + delta + 1)
    };
    let k_bullet = (k - k_eps(params, char)) / (params.p - 1);
    let m = params.p + 1;
    Ok((k_bullet - t1).div_euclid(m) + (k_bullet - t2).div_euclid(m) + 2)
}

/// d_k^ur, clamped below at 0.
pub fn dim_ur(params: &GhostParams, char: CharIndex, k: i64) -> Result<u64> {
    Ok(dim_ur_raw(params, char, k)?.max(0) as u64)
}

/// d_k^new = d_k^Iw - 2 d_k^ur; in-class weights only.
pub fn dim_new(params: &GhostParams, char: CharIndex, k: i64) -> Result<u64> {
    if !in_class(params, char, k) {
        return Err(Error::Domain(format!(
            "dim_new requires k = k_eps mod p-1; k = {k}, k_eps = {}",
            k_eps(params, char)
        )));
    }
    let iw = dim_iw(params, char, k)? as i64;
    let ur = dim_ur(params, char, k)? as i64;
    let new = iw - 2 * ur;
    if new < 0 {
        return Err(Error::Invariant(format!(
            "dim_new negative at k = {k}: iw = {iw}, ur = {ur}"
        )));
    }
    Ok(new as u64)
}

/// All three dimensions at once.
pub fn dim_triple(params: &GhostParams, char: CharIndex, k: i64) -> Result<DimTriple> {
    let iw = dim_iw(params, char, k)?;
    let ur = dim_ur(params, char, k)?;
    let new = if in_class(params, char, k) {
        Some(dim_new(params, char, k)?)
    } else {
        None
    };
    Ok(DimTriple { ur, iw, new })
}

/// Character index of eps'' with s_{eps''} = {delta} for an absolute shift.
pub fn char_from_residue(params: &GhostParams, x: i64) -> CharIndex {
    CharIndex {
        s_eps: residue(x, params.p - 1).expect("p - 1 >= 1"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p11() -> GhostParams {
        GhostParams::new(11, 2, 0).unwrap()
    }

    fn c(s: i64) -> CharIndex {
        CharIndex { s_eps: s }
    }

    #[test]
    fn params_validation() {
        assert!(GhostParams::new(11, 2, 0).is_ok());
        assert!(GhostParams::new(9, 2, 0).is_err());
        assert!(GhostParams::new(11, 0, 0).is_err());
        assert!(GhostParams::new(11, 8, 0).is_err());
        assert!(GhostParams::new(11, 2, 10).is_err());
        assert!(GhostParams::new(11, 2, 0).unwrap().strict());
        assert!(!GhostParams::new(11, 1, 0).unwrap().strict());
        assert!(!GhostParams::new(11, 7, 0).unwrap().strict());
    }

    #[test]
    fn k_eps_examples() {
        let p = p11();
        assert_eq!(k_eps(&p, c(0)), 4);
        assert_eq!(k_eps(&p, c(9)), 2);
        assert_eq!(k_eps(&p, c(8)), 10);
    }

    #[test]
    fn delta_eps_examples() {
        let p = p11();
        assert_eq!(delta_eps(&p, c(0)), 0);
        assert_eq!(delta_eps(&p, c(9)), 1);
        assert_eq!(delta_eps(&p, c(8)), 0);
    }

    #[test]
    fn dim_iw_examples() {
        let p = p11();
        assert_eq!(dim_iw(&p, c(0), 14).unwrap(), 4);
        assert_eq!(dim_iw(&p, c(0), 4).unwrap(), 2);
        assert_eq!(dim_iw(&p, c(0), 2).unwrap(), 1);
        assert!(dim_iw(&p, c(0), 1).is_err());
    }

    #[test]
    fn dim_ur_examples() {
        let p = p11();
        assert_eq!(dim_ur(&p, c(0), 4).unwrap(), 1);
        assert_eq!(dim_ur(&p, c(0), 124).unwrap(), 3);
        assert_eq!(dim_ur(&p, c(0), 16).unwrap(), 0);
    }

    #[test]
    fn dim_new_examples() {
        let p = p11();
        assert_eq!(dim_new(&p, c(0), 14).unwrap(), 2);
        assert_eq!(dim_new(&p, c(0), 4).unwrap(), 0);
        assert_eq!(dim_new(&p, c(0), 44).unwrap(), 6);
        assert!(dim_new(&p, c(0), 16).is_err());
    }

    /// dim_iw by the floor formula equals 2 k_bullet + 2 - 2 delta_eps
    /// in-class, for every character and k_bullet up to 500.
    #[test]
    fn iw_two_formulas_agree() {
        for p in [11i64, 13] {
            let params = GhostParams::new(p, 2, 0).unwrap();
            for s in 0..=p - 2 {
                let ch = c(s);
                let ke = k_eps(&params, ch);
                let de = delta_eps(&params, ch);
                for kb in 0..=500 {
                    let k = ke + (p - 1) * kb;
                    let lhs = dim_iw_raw(&params, ch, k).unwrap();
                    assert_eq!(lhs, 2 * kb + 2 - 2 * de, "p={p} s={s} kb={kb}");
                }
            }
        }
    }

    #[test]
    fn ur_monotone_and_bounded_by_iw() {
        for p in [11i64, 13] {
            for a in 1..=p - 4 {
                let params = GhostParams::new(p, a, 0).unwrap();
                for s in 0..=p - 2 {
                    let ch = c(s);
                    let ke = k_eps(&params, ch);
                    let mut prev = 0u64;
                    for kb in 0..=200 {
                        let k = ke + (p - 1) * kb;
                        let ur = dim_ur(&params, ch, k).unwrap();
                        let iw = dim_iw(&params, ch, k).unwrap();
                        assert!(ur >= prev, "dim_ur not monotone at p={p} a={a} s={s} k={k}");
                        assert!(2 * ur <= iw, "2 dim_ur > dim_iw at p={p} a={a} s={s} k={k}");
                        prev = ur;
                    }
                }
            }
        }
    }

    #[test]
    fn iw_step_is_two_in_class() {
        let p = p11();
        for s in 0..=9 {
            let ch = c(s);
            let ke = k_eps(&p, ch);
            for kb in 0..100 {
                let k = ke + 10 * kb;
                let d0 = dim_iw(&p, ch, k).unwrap();
                let d1 = dim_iw(&p, ch, k + 10).unwrap();
                assert_eq!(d1 - d0, 2);
            }
        }
    }
}
