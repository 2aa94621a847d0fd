//! Ghost-series multiplicities m_n(k) and exact p-adic valuations of the
//! ghost coefficients g_n evaluated at integer weight points, together with
//! their "hatted" variants (the weight-k factor removed).
//!
//! The coefficient g_n(w) is a product of (w - w_l) over in-class weights l
//! with multiplicity m_n(l); its valuation at w_{k'} is the multiplicity-
//! weighted sum of v_p(w_{k'} - w_l). The product is finite: once dim_ur
//! reaches n the multiplicity vanishes for every later weight, which is what
//! [`support_bound`] certifies.

use crate::arith::{wdiff_val, Valuation};
use crate::context::Ctx;
use crate::dims::{self, CharIndex};
use crate::{Error, Result};

/// m_n(k): min(n - d_ur, d_iw - d_ur - n) inside the open range, else 0.
/// Off-class weights carry multiplicity 0.
pub fn multiplicity(ctx: &Ctx, char: CharIndex, n: u64, k: i64) -> Result<u64> {
    let params = &ctx.params;
    if k < 2 || !dims::in_class(params, char, k) {
        return Ok(0);
    }
    let ur = dims::dim_ur(params, char, k)? as i64;
    let iw = dims::dim_iw(params, char, k)? as i64;
    let n = n as i64;
    if ur < n && n < iw - ur {
        Ok((n - ur).min(iw - ur - n) as u64)
    } else {
        Ok(0)
    }
}

/// Smallest in-class weight K with dim_ur(l) >= n for all in-class l >= K;
/// beyond it every multiplicity m_n(l) vanishes (dim_ur is nondecreasing).
pub fn support_bound(ctx: &Ctx, char: CharIndex, n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::Domain("support_bound requires n >= 1".into()));
    }
    let key = (char.s_eps, n);
    if let Some(&k) = ctx.support_bounds.lock().unwrap().get(&key) {
        return Ok(k);
    }
    let params = &ctx.params;
    let mut k = dims::k_eps(params, char);
    loop {
        if dims::dim_ur(params, char, k)? >= n {
            ctx.support_bounds.lock().unwrap().insert(key, k);
            return Ok(k);
        }
        k += params.p - 1;
    }
}

/// v_p(g_n(w_{k'})): multiplicity-weighted sum of wdiff valuations over the
/// finite support. Infinity exactly when k' itself carries multiplicity.
pub fn ghost_val(ctx: &Ctx, char: CharIndex, n: u64, eval_weight: i64) -> Result<Valuation> {
    ghost_val_inner(ctx, char, n, eval_weight, None)
}

/// v_p(g_{n,k-hat}(w_k)): same sum with the l = k factor omitted; finite.
pub fn ghost_val_hat(ctx: &Ctx, char: CharIndex, n: u64, k: i64) -> Result<Valuation> {
    if k < 2 || !dims::in_class(&ctx.params, char, k) {
        return Err(Error::Domain(format!(
            "ghost_val_hat requires an in-class weight k >= 2, got {k}"
        )));
    }
    ghost_val_inner(ctx, char, n, k, Some(k))
}

fn ghost_val_inner(
    ctx: &Ctx,
    char: CharIndex,
    n: u64,
    eval_weight: i64,
    omit: Option<i64>,
) -> Result<Valuation> {
    if n == 0 {
        return Ok(Valuation::Finite(0)); // g_0 = 1
    }
    // The hatted value differs from the plain one only in the l = eval_weight
    // factor, so both are served from one cache of plain values plus the
    // omitted term.
    let key = (char.s_eps, n, eval_weight);
    let cached = ctx.ghost_vals.lock().unwrap().get(&key).copied();
    let total = match cached {
        Some(v) => v,
        None => {
            let params = &ctx.params;
            let bound = support_bound(ctx, char, n)?;
            let mut total = Valuation::Finite(0);
            let mut l = dims::k_eps(params, char);
            while l < bound {
                let m = multiplicity(ctx, char, n, l)?;
                if m > 0 {
                    let w = wdiff_val(eval_weight, l, params.p);
                    match w {
                        Valuation::Infinity => {
                            total = Valuation::Infinity;
                            break;
                        }
                        Valuation::Finite(v) => {
                            if let Valuation::Finite(t) = total {
                                total = Valuation::Finite(t + m * v);
                            }
                        }
                    }
                }
                l += params.p - 1;
            }
            ctx.ghost_vals.lock().unwrap().insert(key, total);
            total
        }
    };
    match omit {
        None => Ok(total),
        Some(k) => {
            let m = multiplicity(ctx, char, n, k)?;
            if m == 0 {
                return Ok(total);
            }
            match total {
                // The only infinite factor is the omitted one.
                Valuation::Infinity => {
                    let params = &ctx.params;
                    let bound = support_bound(ctx, char, n)?;
                    let mut sum = 0u64;
                    let mut l = dims::k_eps(params, char);
                    while l < bound {
                        if l != k {
                            let ml = multiplicity(ctx, char, n, l)?;
                            if ml > 0 {
                                match wdiff_val(k, l, params.p) {
                                    Valuation::Finite(v) => sum += ml * v,
                                    Valuation::Infinity => {
                                        return Err(Error::Invariant(format!(
                                            "duplicate infinite factor at l = {l}, k = {k}"
                                        )))
                                    }
                                }
                            }
                        }
                        l += params.p - 1;
                    }
                    Ok(Valuation::Finite(sum))
                }
                Valuation::Finite(_) => Err(Error::Invariant(format!(
                    "finite ghost_val with positive multiplicity at k = {k}, n = {n}"
                ))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::GhostParams;

    fn ctx() -> Ctx {
        Ctx::new(GhostParams::new(11, 2, 0).unwrap())
    }

    fn c0() -> CharIndex {
        CharIndex { s_eps: 0 }
    }

    /// Independent oracle: enumerate in-class weights up to a fixed large
    /// bound, recomputing multiplicities from the dimension formulas alone.
    fn oracle_ghost_val(p: i64, a: i64, s_eps: i64, n: u64, kp: i64, omit: Option<i64>) -> Valuation {
        let params = GhostParams::new(p, a, 0).unwrap();
        let ch = CharIndex { s_eps };
        let ke = dims::k_eps(&params, ch);
        if n == 0 {
            return Valuation::Finite(0);
        }
        let mut total = Valuation::Finite(0);
        let mut l = ke;
        while l < ke + (p - 1) * 4000 {
            let ur = dims::dim_ur(&params, ch, l).unwrap() as i64;
            let iw = dims::dim_iw(&params, ch, l).unwrap() as i64;
            let ni = n as i64;
            let m = if ur < ni && ni < iw - ur {
                (ni - ur).min(iw - ur - ni) as u64
            } else {
                0
            };
            if m > 0 && omit != Some(l) {
                for _ in 0..m {
                    total = total + wdiff_val(kp, l, p);
                }
            }
            l += p - 1;
        }
        total
    }

    #[test]
    fn multiplicity_examples() {
        let ctx = ctx();
        assert_eq!(multiplicity(&ctx, c0(), 2, 14).unwrap(), 1);
        assert_eq!(multiplicity(&ctx, c0(), 1, 14).unwrap(), 0);
        assert_eq!(multiplicity(&ctx, c0(), 3, 24).unwrap(), 2);
        // off-class weight
        assert_eq!(multiplicity(&ctx, c0(), 2, 16).unwrap(), 0);
    }

    #[test]
    fn support_bound_examples() {
        let ctx = ctx();
        assert_eq!(support_bound(&ctx, c0(), 2).unwrap(), 44);
        assert_eq!(support_bound(&ctx, c0(), 1).unwrap(), 4);
        assert_eq!(support_bound(&ctx, c0(), 3).unwrap(), 124);
    }

    #[test]
    fn ghost_val_examples() {
        let ctx = ctx();
        assert_eq!(ghost_val(&ctx, c0(), 2, 4).unwrap(), Valuation::Finite(3));
        assert_eq!(ghost_val(&ctx, c0(), 0, 4).unwrap(), Valuation::Finite(0));
        assert_eq!(ghost_val(&ctx, c0(), 2, 14).unwrap(), Valuation::Infinity);
    }

    #[test]
    fn ghost_val_hat_examples() {
        let ctx = ctx();
        assert_eq!(ghost_val_hat(&ctx, c0(), 2, 14).unwrap(), Valuation::Finite(2));
        assert_eq!(ghost_val_hat(&ctx, c0(), 2, 4).unwrap(), Valuation::Finite(3));
        assert_eq!(ghost_val_hat(&ctx, c0(), 3, 14).unwrap(), Valuation::Finite(12));
    }

    #[test]
    fn matches_enumeration_oracle() {
        let ctx = ctx();
        for n in 0..12u64 {
            for kp in [-26, 2, 4, 14, 15, 44, 113] {
                let got = ghost_val(&ctx, c0(), n, kp).unwrap();
                let want = oracle_ghost_val(11, 2, 0, n, kp, None);
                assert_eq!(got, want, "n={n} kp={kp}");
            }
        }
        for n in 1..10u64 {
            for k in [4, 14, 24, 44] {
                let got = ghost_val_hat(&ctx, c0(), n, k).unwrap();
                let want = oracle_ghost_val(11, 2, 0, n, k, Some(k));
                assert_eq!(got, want, "hat n={n} k={k}");
            }
        }
    }

    #[test]
    fn finite_off_class_and_below_two() {
        let ctx = ctx();
        for n in 1..20u64 {
            for kp in [-8, 0, 1, 16, 17] {
                assert!(ghost_val(&ctx, c0(), n, kp).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn infinite_iff_positive_multiplicity() {
        let ctx = ctx();
        for n in 1..20u64 {
            for kp in 2..80i64 {
                let inf = !ghost_val(&ctx, c0(), n, kp).unwrap().is_finite();
                let m = multiplicity(&ctx, c0(), n, kp).unwrap();
                assert_eq!(inf, m > 0, "n={n} kp={kp}");
            }
        }
    }

    /// Ghost duality in the Delta'-symmetric form: hat(d_iw/2 + l) minus
    /// hat(d_iw/2 - l) equals (k-2) l.
    #[test]
    fn ghost_duality_symmetry() {
        let ctx = ctx();
        for k in [14i64, 24, 44, 104] {
            let iw = dims::dim_iw(&ctx.params, c0(), k).unwrap();
            let new = dims::dim_new(&ctx.params, c0(), k).unwrap();
            for l in 0..=new / 2 {
                let hi = ghost_val_hat(&ctx, c0(), iw / 2 + l, k).unwrap().finite().unwrap() as i64;
                let lo = ghost_val_hat(&ctx, c0(), iw / 2 - l, k).unwrap().finite().unwrap() as i64;
                assert_eq!(hi - lo, (k - 2) * l as i64, "k={k} l={l}");
            }
        }
    }
}
