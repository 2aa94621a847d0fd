//! Executable verification suites: the slope-compatibility identities, the
//! Delta-gap inequalities, near-Steinberg structure, the ghost-valuation
//! transfer lemmas behind the recursion, and the main cross-validation sweep
//! of the recursive slopes against the Newton polygon.
//!
//! Everything is exact; inequalities involving logarithms are decided by
//! integer power comparisons, never floats.

use crate::arith::{residue, Valuation};
use crate::context::Ctx;
use crate::dims::{self, CharIndex, GhostParams};
use crate::ghost;
use crate::newton::{self, lower_hull};
use crate::slopes_algo::{self, CompatFlags};
use crate::{Error, Rat, Result};
use num_bigint::BigUint;
use num_integer::Roots;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub tuple: String,
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckReport {
    fn pass(suite: &str, tuple: String) -> Self {
        CheckReport {
            suite: suite.into(),
            tuple,
            status: Status::Pass,
            witness: None,
        }
    }

    fn fail(suite: &str, tuple: String, witness: String) -> Self {
        CheckReport {
            suite: suite.into(),
            tuple,
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    fn skipped(suite: &str, tuple: String, reason: &str) -> Self {
        CheckReport {
            suite: suite.into(),
            tuple,
            status: Status::Skipped {
                reason: reason.into(),
            },
            witness: None,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn tuple_str(params: &GhostParams, char: CharIndex, k: i64) -> String {
    format!(
        "p={} a={} b={} s_eps={} k={k}",
        params.p, params.a, params.b, char.s_eps
    )
}

/// np_slopes with a zero-count convenience case.
fn np_seq(ctx: &Ctx, char: CharIndex, eval: i64, count: u64) -> Result<Vec<Rat>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    Ok(newton::np_slopes(ctx, char, eval, count)?.0)
}

fn at(v: &[Rat], i: i64) -> Rat {
    v[(i - 1) as usize]
}

/// Theta-map compatibility: slope d+l at weight k0 equals slope l at weight
/// 2-k0 under the shifted character, plus k0-1, for l = 1..L.
pub fn check_theta(ctx: &Ctx, char: CharIndex, k0: i64, l_count: u64) -> Result<CheckReport> {
    let suite = "theta";
    let tuple = format!("{} L={l_count}", tuple_str(&ctx.params, char, k0));
    let d = dims::dim_iw(&ctx.params, char, k0)?;
    let shifted = char.shifted(&ctx.params, 1 - k0);
    let hi = np_seq(ctx, char, k0, d + l_count)?;
    let lo = np_seq(ctx, shifted, 2 - k0, l_count)?;
    for l in 1..=l_count as i64 {
        let lhs = at(&hi, d as i64 + l);
        let rhs = at(&lo, l) + Rat::from_integer(k0 - 1);
        if lhs != rhs {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("l={l}: lhs={lhs} rhs={rhs}"),
            ));
        }
    }
    Ok(CheckReport::pass(suite, tuple))
}

/// Atkin-Lehner compatibility at off-class weights: slopes l and d-l+1 under
/// the paired characters sum to k0-1.
pub fn check_atkin_lehner(ctx: &Ctx, char: CharIndex, k0: i64) -> Result<CheckReport> {
    let suite = "atkin-lehner";
    let tuple = tuple_str(&ctx.params, char, k0);
    if dims::in_class(&ctx.params, char, k0) {
        return Ok(CheckReport::skipped(suite, tuple, "k0 in the class of k_eps"));
    }
    let d = dims::dim_iw(&ctx.params, char, k0)?;
    if d == 0 {
        return Ok(CheckReport::pass(suite, tuple));
    }
    let pair = CharIndex {
        s_eps: residue(k0 - 2 - ctx.params.a - char.s_eps, ctx.params.p - 1)?,
    };
    let va = np_seq(ctx, char, k0, d)?;
    let vb = np_seq(ctx, pair, k0, d)?;
    for l in 1..=d as i64 {
        let sum = at(&va, l) + at(&vb, d as i64 - l + 1);
        if sum != Rat::from_integer(k0 - 1) {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("l={l}: {} + {} != {}", at(&va, l), at(&vb, d as i64 - l + 1), k0 - 1),
            ));
        }
    }
    Ok(CheckReport::pass(suite, tuple))
}

/// p-stabilization compatibility at in-class weights: slopes l and d-l+1 of
/// the same sequence sum to k0-1 for l up to dim_ur.
pub fn check_pstab(ctx: &Ctx, char: CharIndex, k0: i64) -> Result<CheckReport> {
    let suite = "pstab";
    let tuple = tuple_str(&ctx.params, char, k0);
    if !dims::in_class(&ctx.params, char, k0) {
        return Ok(CheckReport::skipped(suite, tuple, "k0 not in the class of k_eps"));
    }
    let d = dims::dim_iw(&ctx.params, char, k0)?;
    let ur = dims::dim_ur(&ctx.params, char, k0)?;
    if ur == 0 {
        return Ok(CheckReport::pass(suite, tuple));
    }
    let v = np_seq(ctx, char, k0, d)?;
    for l in 1..=ur as i64 {
        let sum = at(&v, l) + at(&v, d as i64 - l + 1);
        if sum != Rat::from_integer(k0 - 1) {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("l={l}: {} + {} != {}", at(&v, l), at(&v, d as i64 - l + 1), k0 - 1),
            ));
        }
    }
    Ok(CheckReport::pass(suite, tuple))
}

/// Ghost duality: the raw Delta profile is symmetric about l = 0, and the
/// hatted valuations at mirrored indices differ by (k0-2)(d_new/2 - l).
pub fn check_ghost_duality(ctx: &Ctx, char: CharIndex, k0: i64) -> Result<CheckReport> {
    let suite = "duality";
    let tuple = tuple_str(&ctx.params, char, k0);
    if !dims::in_class(&ctx.params, char, k0) {
        return Ok(CheckReport::skipped(suite, tuple, "k0 not in the class of k_eps"));
    }
    let profile = newton::delta_profile(ctx, char, k0)?;
    for l in 1..=profile.half {
        if profile.raw(l) != profile.raw(-l) {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("raw({l})={} != raw({})={}", profile.raw(l), -l, profile.raw(-l)),
            ));
        }
    }
    let iw = dims::dim_iw(&ctx.params, char, k0)? as i64;
    let ur = dims::dim_ur(&ctx.params, char, k0)? as i64;
    let half = profile.half;
    for l in 0..half {
        let hi = ghost::ghost_val_hat(ctx, char, (iw - ur - l) as u64, k0)?
            .finite()
            .ok_or_else(|| Error::Invariant("infinite hatted value".into()))? as i64;
        let lo = ghost::ghost_val_hat(ctx, char, (ur + l) as u64, k0)?
            .finite()
            .ok_or_else(|| Error::Invariant("infinite hatted value".into()))? as i64;
        if hi - lo != (k0 - 2) * (half - l) {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("l={l}: {hi} - {lo} != ({}) * ({})", k0 - 2, half - l),
            ));
        }
    }
    Ok(CheckReport::pass(suite, tuple))
}

/// Decide d <= 3 (log l / log p)^2 exactly: equivalent to
/// p^sqrt(d/3) <= l, settled by bracketing sqrt(d/3) between rationals and
/// comparing integer powers.
fn log_gap_bound_holds(p: i64, l: i64, d: Rat) -> Result<bool> {
    if d <= Rat::from_integer(0) {
        return Ok(true);
    }
    if l <= 1 {
        return Ok(false);
    }
    let q = d / Rat::from_integer(3);
    // exact p-power case: compare q with j^2 directly
    let mut lp = l;
    let mut j = 0i64;
    while lp % p == 0 {
        lp /= p;
        j += 1;
    }
    if lp == 1 {
        return Ok(q <= Rat::from_integer(j * j));
    }
    let n = *q.numer() as u64;
    let den = *q.denom() as u64;
    let pb = BigUint::from(p as u64);
    let lb = BigUint::from(l as u64);
    let mut scale: u64 = 1;
    while scale <= 1 << 16 {
        // t/(den*scale) <= sqrt(q) <= (t+1)/(den*scale)
        let m = n * den * scale * scale;
        let t = m.sqrt();
        let exp_den = (den * scale) as u32;
        let l_pow = lb.pow(exp_den);
        if t * t == m {
            return Ok(pb.pow(t as u32) <= l_pow);
        }
        if pb.pow(t as u32 + 1) <= l_pow {
            return Ok(true);
        }
        if pb.pow(t as u32) > l_pow {
            return Ok(false);
        }
        scale *= 2;
    }
    Err(Error::Invariant(format!(
        "log-gap comparison did not resolve for p={p}, l={l}, d={d}"
    )))
}

/// The Delta-gap inequalities: raw gaps >= 3/2 + (p-1)(l-1)/2, hull gaps
/// >= l, the raw-minus-hull excess bounded by 3 (log l / log p)^2, and the
/// sharp small-l form (excess 0 for l < 2p except l = p, where it is <= 1).
pub fn check_delta_gaps(ctx: &Ctx, char: CharIndex, k: i64) -> Result<CheckReport> {
    let suite = "gaps";
    let tuple = tuple_str(&ctx.params, char, k);
    if !dims::in_class(&ctx.params, char, k) {
        return Ok(CheckReport::skipped(suite, tuple, "k not in the class of k_eps"));
    }
    let p = ctx.params.p;
    let profile = newton::delta_profile(ctx, char, k)?;
    for l in 1..=profile.half {
        let raw_gap = profile.raw_gap(l);
        let raw_bound = Rat::new(3, 2) + Rat::new(p - 1, 2) * Rat::from_integer(l - 1);
        if raw_gap < raw_bound {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("raw gap at l={l}: {raw_gap} < {raw_bound}"),
            ));
        }
        let hull_gap = profile.hull_gap(l);
        if hull_gap < Rat::from_integer(l) {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("hull gap at l={l}: {hull_gap} < {l}"),
            ));
        }
        let excess = profile.raw(l) - profile.hull(l);
        if excess < Rat::from_integer(0) {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("raw below hull at l={l}: excess {excess}"),
            ));
        }
        if l < 2 * p {
            let limit = if l == p {
                Rat::from_integer(1)
            } else {
                Rat::from_integer(0)
            };
            if excess > limit {
                return Ok(CheckReport::fail(
                    suite,
                    tuple,
                    format!("sharp small-l form at l={l}: excess {excess} > {limit}"),
                ));
            }
        } else if !log_gap_bound_holds(p, l, excess)? {
            return Ok(CheckReport::fail(
                suite,
                tuple,
                format!("log bound at l={l}: excess {excess} > 3 (log {l}/log {p})^2"),
            ));
        }
    }
    Ok(CheckReport::pass(suite, tuple))
}

/// Near-Steinberg structure at one evaluation weight: range nestedness, and
/// agreement of the non-near-Steinberg integers with the strict vertices of
/// the certified polygon prefix on [0, upto].
pub fn check_ns(ctx: &Ctx, char: CharIndex, eval_weight: i64, upto: i64) -> Result<CheckReport> {
    let suite = "ns";
    let tuple = format!(
        "{} upto={upto}",
        tuple_str(&ctx.params, char, eval_weight)
    );
    let intervals = newton::ns_intervals(ctx, char, eval_weight, upto)?;
    for (i, &(a1, b1)) in intervals.iter().enumerate() {
        for &(a2, b2) in &intervals[i + 1..] {
            let disjoint = b1 <= a2 || b2 <= a1;
            let nested = (a1 <= a2 && b2 <= b1) || (a2 <= a1 && b1 <= b2);
            if !disjoint && !nested {
                return Ok(CheckReport::fail(
                    suite,
                    tuple,
                    format!("ranges ({a1},{b1}) and ({a2},{b2}) overlap without nesting"),
                ));
            }
        }
    }
    let expected: Vec<i64> = newton::vertices_via_ns(ctx, char, eval_weight, upto)?
        .into_iter()
        .collect();
    // certified vertex at or beyond the window, so the prefix hull is exact
    let mut window = upto.max(1);
    let vertex = loop {
        if window > ctx.enumeration_cap {
            return Err(Error::UncertifiedTruncation(format!(
                "no certified vertex >= {upto} for eval weight {eval_weight}"
            )));
        }
        let verts = newton::vertices_via_ns(ctx, char, eval_weight, window)?;
        if let Some(&v) = verts.iter().find(|&&v| v >= upto) {
            break v;
        }
        window *= 2;
    };
    let mut points = Vec::with_capacity(vertex as usize + 1);
    for n in 0..=vertex {
        points.push((n, ghost::ghost_val(ctx, char, n as u64, eval_weight)?));
    }
    let hull = lower_hull(&points)?;
    let got: Vec<i64> = hull
        .vertices
        .iter()
        .map(|&(x, _)| x)
        .filter(|&x| x <= upto)
        .collect();
    if got != expected {
        return Ok(CheckReport::fail(
            suite,
            tuple,
            format!("hull vertices {got:?} != non-near-Steinberg integers {expected:?}"),
        ));
    }
    Ok(CheckReport::pass(suite, tuple))
}

/// The ghost-valuation transfer identities behind one recursion step at k,
/// for whichever case applies, plus the lies-on-polygon claim for the
/// (k1, k) pair.
pub fn check_transfer_lemmas(ctx: &Ctx, char: CharIndex, k: i64) -> Result<CheckReport> {
    let suite = "transfer";
    let tuple = tuple_str(&ctx.params, char, k);
    let params = &ctx.params;
    if !dims::in_class(params, char, k) {
        return Ok(CheckReport::skipped(suite, tuple, "k not in the class of k_eps"));
    }
    if k < params.p + 3 || k % 2 != 0 {
        return Ok(CheckReport::skipped(suite, tuple, "base-case weight"));
    }
    let cp = slopes_algo::case_params(ctx, char, k)?;
    let ur_k1 = dims::dim_ur(params, cp.char1, cp.k1)?;
    let fail = |witness: String| Ok(CheckReport::fail(suite, tuple.clone(), witness));

    let same_val = |ch: CharIndex, n: u64, w1: i64, w2: i64| -> Result<Option<String>> {
        let a = ghost::ghost_val(ctx, ch, n, w1)?;
        let b = ghost::ghost_val(ctx, ch, n, w2)?;
        if a != b {
            Ok(Some(format!(
                "g_{n} at w_{w1} vs w_{w2} (s_eps={}): {a} != {b}",
                ch.s_eps
            )))
        } else {
            Ok(None)
        }
    };

    if cp.case_id == 1 {
        // first-segment agreement at k1
        for n in 0..=ur_k1 {
            if let Some(w) = same_val(char, n, cp.k1, k)? {
                return fail(format!("case-1 k1 agreement: {w}"));
            }
        }
        // agreement with the e+1 evaluation over the whole Iwahori range
        let d_e1 = dims::dim_iw(params, char, cp.e + 1)?;
        for n in 0..=d_e1 {
            if let Some(w) = same_val(char, n, cp.e + 1, k)? {
                return fail(format!("case-1 e+1 agreement: {w}"));
            }
        }
        // the paired-character evaluation transfers from k2 to e+1
        let ur_k2 = dims::dim_ur(params, cp.char2, cp.k2)?;
        for n in 0..=ur_k2 {
            if let Some(w) = same_val(cp.char2, n, cp.k2, cp.e + 1)? {
                return fail(format!("case-1 k2 agreement: {w}"));
            }
        }
    } else {
        // agreement at k1 outside the open middle range
        let iw_k1 = dims::dim_iw(params, cp.char1, cp.k1)?;
        for n in 0..=iw_k1 {
            if n > ur_k1 && n < iw_k1 - ur_k1 {
                continue;
            }
            if let Some(w) = same_val(char, n, cp.k1, k)? {
                return fail(format!("case-{} k1 agreement: {w}", cp.case_id));
            }
        }
        let ur_k2 = dims::dim_ur(params, cp.char2, cp.k2)?;
        if cp.case_id == 2 {
            for n in ur_k1..=ur_k2 {
                if let Some(w) = same_val(char, n, cp.k2, k)? {
                    return fail(format!("case-2 k2 agreement: {w}"));
                }
            }
        } else {
            // case 3 transfers with a tent-shaped valuation shift
            for n in ur_k1..=ur_k2.min(iw_k1 - ur_k1) {
                let lhs = ghost::ghost_val(ctx, char, n, k)?;
                let base = ghost::ghost_val(ctx, char, n, cp.k2)?;
                let bump = (n - ur_k1).min(iw_k1 - ur_k1 - n);
                let rhs = base + Valuation::Finite(bump);
                if lhs != rhs {
                    return fail(format!(
                        "case-3 k2 agreement at n={n}: {lhs} != {base} + {bump}"
                    ));
                }
            }
        }
    }

    // final-segment identity: slopes past dim_iw(e+1) are e plus the k3 ones
    let ur_k = dims::dim_ur(params, char, k)?;
    let d_e1 = dims::dim_iw(params, char, cp.e + 1)? as i64;
    let ur_k3 = dims::dim_ur(params, cp.char3, cp.k3)?;
    if ur_k > 0 {
        let vk = np_seq(ctx, char, k, ur_k)?;
        let v3 = np_seq(ctx, cp.char3, cp.k3, ur_k3)?;
        let mut i = 1i64;
        while d_e1 + i <= ur_k as i64 && i <= v3.len() as i64 {
            let lhs = at(&vk, d_e1 + i);
            let rhs = at(&v3, i) + Rat::from_integer(cp.e);
            if lhs != rhs {
                return fail(format!("final segment at i={i}: {lhs} != {rhs}"));
            }
            i += 1;
        }
    }

    // lies-on-polygon claim for (k1, k) when its hypotheses hold
    let px = params.p.pow(slopes_algo::xyz_decompose(params.p, k)?.x);
    let hypotheses = cp.k1.abs() <= px
        && cp.k1.abs() < k
        && (k as i128) < (px as i128) * params.p as i128
        && (k - cp.k1) % (px / params.p) == 0;
    if hypotheses && ghost::multiplicity(ctx, char, ur_k, cp.k1)? == 0 {
        let mut window = (ur_k as i64).max(1);
        let vertex = loop {
            if window > ctx.enumeration_cap {
                return Err(Error::UncertifiedTruncation(format!(
                    "no certified vertex >= {ur_k} for eval weight {}",
                    cp.k1
                )));
            }
            let verts = newton::vertices_via_ns(ctx, char, cp.k1, window)?;
            if let Some(&v) = verts.iter().find(|&&v| v >= ur_k as i64) {
                break v;
            }
            window *= 2;
        };
        let mut points = Vec::with_capacity(vertex as usize + 1);
        for n in 0..=vertex {
            points.push((n, ghost::ghost_val(ctx, char, n as u64, cp.k1)?));
        }
        let hull = lower_hull(&points)?;
        let hull_y = hull
            .value_at(ur_k as i64)
            .ok_or_else(|| Error::Invariant("dim_ur outside hull range".into()))?;
        let point_y = ghost::ghost_val(ctx, char, ur_k, cp.k1)?
            .finite()
            .ok_or_else(|| Error::Invariant("infinite value with zero multiplicity".into()))?;
        if Rat::from_integer(point_y as i64) != hull_y {
            return fail(format!(
                "point at x=dim_ur={ur_k} off the polygon of w_{}: {point_y} vs hull {hull_y}",
                cp.k1
            ));
        }
    }

    Ok(CheckReport::pass(suite, tuple))
}

/// One recursion-vs-polygon comparison, reported with the first mismatching
/// weight as witness.
pub fn check_main(ctx: &Ctx, char: CharIndex, k: i64) -> Result<CheckReport> {
    let suite = "main";
    let tuple = tuple_str(&ctx.params, char, k);
    let ur = dims::dim_ur(&ctx.params, char, k)?;
    let var = slopes_algo::variant_slopes(ctx, char, k)?;
    if var.len() as u64 != ur {
        return Ok(CheckReport::fail(
            suite,
            tuple,
            format!("length {} != dim_ur {ur}", var.len()),
        ));
    }
    if ur == 0 {
        return Ok(CheckReport::pass(suite, tuple));
    }
    let np = np_seq(ctx, char, k, ur)?;
    if var.0 != np {
        let idx = var
            .0
            .iter()
            .zip(&np)
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        return Ok(CheckReport::fail(
            suite,
            tuple,
            format!(
                "first mismatch at index {}: recursive {} vs polygon {}",
                idx + 1,
                var.0[idx],
                np[idx]
            ),
        ));
    }
    Ok(CheckReport::pass(suite, tuple))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Main,
    Theta,
    AtkinLehner,
    Pstab,
    Duality,
    Gaps,
    Transfer,
    Ns,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Main,
        Suite::Theta,
        Suite::AtkinLehner,
        Suite::Pstab,
        Suite::Duality,
        Suite::Gaps,
        Suite::Transfer,
        Suite::Ns,
    ];
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "main" => Ok(Suite::Main),
            "theta" => Ok(Suite::Theta),
            "atkin-lehner" => Ok(Suite::AtkinLehner),
            "pstab" => Ok(Suite::Pstab),
            "duality" => Ok(Suite::Duality),
            "gaps" => Ok(Suite::Gaps),
            "transfer" => Ok(Suite::Transfer),
            "ns" => Ok(Suite::Ns),
            other => Err(Error::Parse(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub p_list: Vec<i64>,
    /// Empty means every even a in [2, p-5].
    pub a_list: Vec<i64>,
    /// Empty means every b in [0, p-2].
    pub b_list: Vec<i64>,
    pub k_max: i64,
    pub suites: Vec<Suite>,
    /// 0 means the default thread count.
    pub jobs: usize,
    pub flags: CompatFlags,
    /// Theta identities are checked for l = 1..theta_count.
    pub theta_count: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            p_list: vec![11, 13],
            a_list: Vec::new(),
            b_list: Vec::new(),
            k_max: 300,
            suites: Suite::ALL.to_vec(),
            jobs: 0,
            flags: CompatFlags::default(),
            theta_count: 10,
        }
    }
}

/// In-class even weights in [lo, hi] for the character.
fn in_class_even(params: &GhostParams, char: CharIndex, lo: i64, hi: i64) -> Vec<i64> {
    let ke = dims::k_eps(params, char);
    let mut k = ke;
    let mut out = Vec::new();
    while k <= hi {
        if k >= lo && k % 2 == 0 {
            out.push(k);
        }
        k += params.p - 1;
    }
    out
}

/// Run the requested suites over the parameter grid. Tasks are enumerated in
/// a fixed order and results collected positionally, so the report list is
/// identical for any thread count. Errors become fail reports.
pub fn sweep(cfg: &SweepConfig) -> Vec<CheckReport> {
    // one shared context per (p, a): the computations do not depend on b
    let mut ctxs: HashMap<(i64, i64), Arc<Ctx>> = HashMap::new();
    let mut tasks: Vec<(Suite, Arc<Ctx>, i64, i64, CharIndex)> = Vec::new();
    for &p in &cfg.p_list {
        let a_list: Vec<i64> = if cfg.a_list.is_empty() {
            (2..=p - 5).filter(|a| a % 2 == 0).collect()
        } else {
            cfg.a_list.clone()
        };
        let b_list: Vec<i64> = if cfg.b_list.is_empty() {
            (0..=p - 2).collect()
        } else {
            cfg.b_list.clone()
        };
        for &a in &a_list {
            let ctx = ctxs
                .entry((p, a))
                .or_insert_with(|| {
                    Arc::new(Ctx::with_flags(
                        GhostParams::new(p, a, 0).expect("grid params valid"),
                        cfg.flags,
                    ))
                })
                .clone();
            for &suite in &cfg.suites {
                for &b in &b_list {
                    for s_eps in 0..=p - 2 {
                        tasks.push((suite, Arc::clone(&ctx), a, b, CharIndex { s_eps }));
                    }
                }
            }
        }
    }

    let run = |(suite, ctx, _a, b, char): &(Suite, Arc<Ctx>, i64, i64, CharIndex)| {
        run_suite_cell(*suite, ctx, *b, *char, cfg)
    };
    let results: Vec<Vec<CheckReport>> = if cfg.jobs == 1 {
        tasks.iter().map(run).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| tasks.par_iter().map(run).collect())
    };
    results.into_iter().flatten().collect()
}

/// All reports for one (suite, p, a, b, s_eps) cell. The b value only labels
/// the tuple; it enters no formula.
fn run_suite_cell(
    suite: Suite,
    ctx: &Ctx,
    b: i64,
    char: CharIndex,
    cfg: &SweepConfig,
) -> Vec<CheckReport> {
    let labeled = GhostParams {
        b,
        ..ctx.params
    };
    let guard = |res: Result<CheckReport>, k: i64| -> CheckReport {
        match res {
            Ok(mut rep) => {
                rep.tuple = tuple_str(&labeled, char, k);
                rep
            }
            Err(err) => CheckReport::fail(
                suite_name(suite),
                tuple_str(&labeled, char, k),
                format!("error: {err}"),
            ),
        }
    };
    let params = &ctx.params;
    let mut out = Vec::new();
    match suite {
        Suite::Main => {
            for k in in_class_even(params, char, params.p + 3, cfg.k_max) {
                out.push(guard(check_main(ctx, char, k), k));
            }
        }
        Suite::Theta => {
            for k0 in 2..=cfg.k_max {
                out.push(guard(check_theta(ctx, char, k0, cfg.theta_count), k0));
            }
        }
        Suite::AtkinLehner => {
            for k0 in 2..=cfg.k_max {
                out.push(guard(check_atkin_lehner(ctx, char, k0), k0));
            }
        }
        Suite::Pstab => {
            for k0 in in_class_even(params, char, 2, cfg.k_max) {
                out.push(guard(check_pstab(ctx, char, k0), k0));
            }
        }
        Suite::Duality => {
            for k0 in in_class_even(params, char, 2, cfg.k_max) {
                out.push(guard(check_ghost_duality(ctx, char, k0), k0));
            }
        }
        Suite::Gaps => {
            for k in in_class_even(params, char, 2, cfg.k_max) {
                out.push(guard(check_delta_gaps(ctx, char, k), k));
            }
        }
        Suite::Transfer => {
            for k in in_class_even(params, char, params.p + 3, cfg.k_max) {
                out.push(guard(check_transfer_lemmas(ctx, char, k), k));
            }
        }
        Suite::Ns => {
            for kp in in_class_even(params, char, 2, cfg.k_max.min(200)) {
                let upto = dims::dim_iw(params, char, kp).unwrap_or(0) as i64;
                out.push(guard(check_ns(ctx, char, kp, upto), kp));
            }
            // negative evaluation weights, fixed window
            for j in 1..=5 {
                let kp = 4 - 10 * j;
                out.push(guard(check_ns(ctx, char, kp, 12), kp));
            }
        }
    }
    out
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Main => "main",
        Suite::Theta => "theta",
        Suite::AtkinLehner => "atkin-lehner",
        Suite::Pstab => "pstab",
        Suite::Duality => "duality",
        Suite::Gaps => "gaps",
        Suite::Transfer => "transfer",
        Suite::Ns => "ns",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(GhostParams::new(11, 2, 0).unwrap())
    }

    fn c0() -> CharIndex {
        CharIndex { s_eps: 0 }
    }

    #[test]
    fn theta_examples() {
        let ctx = ctx();
        assert!(check_theta(&ctx, c0(), 14, 3).unwrap().is_pass());
        assert!(check_theta(&ctx, c0(), 4, 1).unwrap().is_pass());
        assert!(check_theta(&ctx, c0(), 14, 0).unwrap().is_pass());
    }

    #[test]
    fn atkin_lehner_examples() {
        let ctx = ctx();
        assert!(check_atkin_lehner(&ctx, c0(), 16).unwrap().is_pass());
        assert!(matches!(
            check_atkin_lehner(&ctx, c0(), 14).unwrap().status,
            Status::Skipped { .. }
        ));
    }

    #[test]
    fn pstab_examples() {
        let ctx = ctx();
        assert!(check_pstab(&ctx, c0(), 14).unwrap().is_pass());
        assert!(check_pstab(&ctx, c0(), 4).unwrap().is_pass());
        let v = np_seq(&ctx, c0(), 14, 4).unwrap();
        assert_eq!(at(&v, 1) + at(&v, 4), Rat::from_integer(13));
    }

    #[test]
    fn duality_examples() {
        let ctx = ctx();
        assert!(check_ghost_duality(&ctx, c0(), 14).unwrap().is_pass());
        assert!(check_ghost_duality(&ctx, c0(), 44).unwrap().is_pass());
        assert!(matches!(
            check_ghost_duality(&ctx, c0(), 16).unwrap().status,
            Status::Skipped { .. }
        ));
    }

    #[test]
    fn gaps_examples() {
        let ctx = ctx();
        let rep = check_delta_gaps(&ctx, c0(), 14).unwrap();
        assert!(rep.is_pass(), "{rep:?}");
        let rep = check_delta_gaps(&ctx, c0(), 254).unwrap();
        assert!(rep.is_pass(), "{rep:?}");
    }

    #[test]
    fn log_gap_decision_procedure() {
        // p^sqrt(d/3) <= l with d = 3: sqrt(1) = 1, so the bound is l >= p
        assert!(log_gap_bound_holds(11, 11, Rat::from_integer(3)).unwrap());
        assert!(!log_gap_bound_holds(11, 10, Rat::from_integer(3)).unwrap());
        // d = 12: threshold l >= p^2
        assert!(log_gap_bound_holds(11, 121, Rat::from_integer(12)).unwrap());
        assert!(!log_gap_bound_holds(11, 120, Rat::from_integer(12)).unwrap());
        // irrational threshold: 11^sqrt(1/3) ~ 3.99
        assert!(log_gap_bound_holds(11, 4, Rat::from_integer(1)).unwrap());
        assert!(!log_gap_bound_holds(11, 3, Rat::from_integer(1)).unwrap());
        assert!(log_gap_bound_holds(11, 1, Rat::from_integer(0)).unwrap());
        assert!(!log_gap_bound_holds(11, 1, Rat::from_integer(1)).unwrap());
    }

    #[test]
    fn transfer_examples() {
        let ctx = ctx();
        let rep = check_transfer_lemmas(&ctx, c0(), 14).unwrap();
        assert!(rep.is_pass(), "{rep:?}");
        let rep = check_transfer_lemmas(&ctx, c0(), 134).unwrap();
        assert!(rep.is_pass(), "{rep:?}");
        assert!(matches!(
            check_transfer_lemmas(&ctx, c0(), 16).unwrap().status,
            Status::Skipped { .. }
        ));
    }

    #[test]
    fn ns_examples() {
        let ctx = ctx();
        for kp in [4i64, 14, 44] {
            let upto = dims::dim_iw(&ctx.params, c0(), kp).unwrap() as i64;
            let rep = check_ns(&ctx, c0(), kp, upto).unwrap();
            assert!(rep.is_pass(), "{rep:?}");
        }
        let rep = check_ns(&ctx, c0(), -6, 12).unwrap();
        assert!(rep.is_pass(), "{rep:?}");
    }

    #[test]
    fn sweep_empty_and_deterministic() {
        let cfg = SweepConfig {
            p_list: vec![11],
            a_list: vec![2],
            b_list: vec![0],
            k_max: 0,
            suites: vec![Suite::Main],
            ..Default::default()
        };
        assert!(sweep(&cfg).is_empty());

        let cfg = SweepConfig {
            p_list: vec![11],
            a_list: vec![2],
            b_list: vec![0],
            k_max: 60,
            suites: vec![Suite::Main, Suite::Pstab],
            jobs: 1,
            ..Default::default()
        };
        let seq = sweep(&cfg);
        assert!(seq.iter().all(|r| !r.is_fail()), "{seq:#?}");
        let par = sweep(&SweepConfig { jobs: 4, ..cfg });
        assert_eq!(seq, par);
    }

    #[test]
    fn report_serialization_round_trip() {
        let rep = CheckReport::fail("main", "p=11 a=2 b=0 s_eps=0 k=14".into(), "w".into());
        let line = rep.to_json_line();
        let back: CheckReport = serde_json::from_str(&line).unwrap();
        assert_eq!(rep, back);
    }
}
