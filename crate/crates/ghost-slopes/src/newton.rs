//! Lower convex hulls of valuation points, Newton-polygon slope extraction,
//! polygon stretching, the Delta profiles, near-Steinberg ranges, and the
//! certified slope-prefix computation.
//!
//! A finite-point hull prefix can change when more points arrive, so
//! [`np_slopes`] only accepts a prefix up to an x-coordinate certified as a
//! true vertex of the full polygon by the near-Steinberg characterisation
//! ([`vertices_via_ns`]).

use crate::arith::{ilog_p, wdiff_val, Valuation};
use crate::context::Ctx;
use crate::dims::{self, CharIndex};
use crate::ghost;
use crate::{Error, Rat, Result};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Slopes of a Newton polygon, nondecreasing, with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeSeq(pub Vec<Rat>);

impl SlopeSeq {
    /// 1-indexed access, matching the sequence convention s[i] = a_i.
    pub fn get1(&self, i: u64) -> Option<Rat> {
        self.0.get(i as usize - 1).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Lower convex hull vertices of a finite set of valuation points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Strictly increasing x, strictly increasing consecutive slopes.
    pub vertices: Vec<(i64, Rat)>,
}

impl NewtonPolygon {
    /// Segment slopes repeated once per unit of x they span.
    pub fn slopes(&self) -> SlopeSeq {
        let mut out = Vec::new();
        for pair in self.vertices.windows(2) {
            let (x0, y0) = pair[0];
            let (x1, y1) = pair[1];
            let slope = (y1 - y0) / Rat::from_integer(x1 - x0);
            for _ in 0..(x1 - x0) {
                out.push(slope);
            }
        }
        SlopeSeq(out)
    }

    /// Scale every vertex (x, y) to (m x, m y); each slope repeats m times.
    pub fn stretch(&self, m: i64) -> Result<NewtonPolygon> {
        if m < 1 {
            return Err(Error::InvalidParam(format!("stretch factor m = {m} must be >= 1")));
        }
        Ok(NewtonPolygon {
            vertices: self
                .vertices
                .iter()
                .map(|&(x, y)| (m * x, y * Rat::from_integer(m)))
                .collect(),
        })
    }

    /// Hull height at integer x (linear interpolation along the chain);
    /// `None` outside the x-range.
    pub fn value_at(&self, x: i64) -> Option<Rat> {
        chain_value_at(&self.vertices, x)
    }
}

/// Convex-minorant chain of (x, y) points with distinct x. Pure geometry;
/// callers filter infinite points first.
fn lower_chain(points: &[(i64, Rat)]) -> Vec<(i64, Rat)> {
    let mut pts: Vec<(i64, Rat)> = points.to_vec();
    pts.sort_by_key(|&(x, _)| x);
    let mut hull: Vec<(i64, Rat)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // pop unless slope(p1,p2) < slope(p2,p): keep strictly convex
            let lhs = (y2 - y1) * Rat::from_integer(x - x2);
            let rhs = (y - y2) * Rat::from_integer(x2 - x1);
            if lhs < rhs {
                break;
            }
            hull.pop();
        }
        hull.push((x, y));
    }
    hull
}

fn chain_value_at(chain: &[(i64, Rat)], x: i64) -> Option<Rat> {
    let first = chain.first()?;
    let last = chain.last()?;
    if x < first.0 || x > last.0 {
        return None;
    }
    for pair in chain.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        if x0 <= x && x <= x1 {
            let t = Rat::from_integer(x - x0) / Rat::from_integer(x1 - x0);
            return Some(y0 + t * (y1 - y0));
        }
    }
    Some(last.1)
}

/// Lower hull of valuation points; infinite points are never below any chord
/// and are skipped. Requires a finite point at x = 0.
pub fn lower_hull(points: &[(i64, Valuation)]) -> Result<NewtonPolygon> {
    if points.is_empty() {
        return Err(Error::Domain("lower_hull: empty input".into()));
    }
    let mut seen = BTreeSet::new();
    for &(x, _) in points {
        if !seen.insert(x) {
            return Err(Error::Domain(format!("lower_hull: duplicate x = {x}")));
        }
    }
    let has_origin = points
        .iter()
        .any(|&(x, v)| x == 0 && v.is_finite());
    if !has_origin {
        return Err(Error::Domain("lower_hull: missing finite point at x = 0".into()));
    }
    let finite: Vec<(i64, Rat)> = points
        .iter()
        .filter_map(|&(x, v)| v.finite().map(|y| (x, Rat::from_integer(y as i64))))
        .collect();
    Ok(NewtonPolygon {
        vertices: lower_chain(&finite),
    })
}

/// The raw and hull Delta profiles at an in-class weight k.
#[derive(Debug, Clone)]
pub struct DeltaProfile {
    pub k: i64,
    /// Half the l-range: l runs over [-half, half].
    pub half: i64,
    raw: Vec<Rat>,
    hull: Vec<Rat>,
}

impl DeltaProfile {
    pub fn raw(&self, l: i64) -> Rat {
        self.raw[(l + self.half) as usize]
    }

    pub fn hull(&self, l: i64) -> Rat {
        self.hull[(l + self.half) as usize]
    }

    /// Delta_{k,l} - Delta_{k,l-1} for l in [1 - half, half].
    pub fn hull_gap(&self, l: i64) -> Rat {
        self.hull(l) - self.hull(l - 1)
    }

    pub fn raw_gap(&self, l: i64) -> Rat {
        self.raw(l) - self.raw(l - 1)
    }
}

/// Delta'_{k,l} = v_p(g_{d_iw/2 + l, k-hat}(w_k)) - l (k-2)/2 for l in
/// [-d_new/2, d_new/2], together with its lower convex hull.
pub fn delta_profile(ctx: &Ctx, char: CharIndex, k: i64) -> Result<Arc<DeltaProfile>> {
    let params = &ctx.params;
    if k < 2 || !dims::in_class(params, char, k) {
        return Err(Error::Domain(format!(
            "delta_profile requires an in-class weight k >= 2, got {k}"
        )));
    }
    let key = (char.s_eps, k);
    if let Some(p) = ctx.profiles.lock().unwrap().get(&key) {
        return Ok(Arc::clone(p));
    }
    let iw = dims::dim_iw(params, char, k)? as i64;
    let new = dims::dim_new(params, char, k)? as i64;
    debug_assert_eq!(iw % 2, 0);
    debug_assert_eq!(new % 2, 0);
    let half = new / 2;
    let mid = iw / 2;
    let mut raw = Vec::with_capacity((2 * half + 1) as usize);
    for l in -half..=half {
        let n = (mid + l) as u64;
        let v = ghost::ghost_val_hat(ctx, char, n, k)?
            .finite()
            .ok_or_else(|| {
                Error::Invariant(format!("infinite hatted ghost valuation at k = {k}, n = {n}"))
            })?;
        raw.push(Rat::from_integer(v as i64) - Rat::new(k - 2, 2) * Rat::from_integer(l));
    }
    let pts: Vec<(i64, Rat)> = raw
        .iter()
        .enumerate()
        .map(|(i, &y)| (i as i64 - half, y))
        .collect();
    let chain = lower_chain(&pts);
    let hull: Vec<Rat> = (-half..=half)
        .map(|l| chain_value_at(&chain, l).expect("l within chain range"))
        .collect();
    let profile = Arc::new(DeltaProfile { k, half, raw, hull });
    ctx.profiles
        .lock()
        .unwrap()
        .insert(key, Arc::clone(&profile));
    Ok(profile)
}

/// Near-Steinberg range for the pair (w_{k'}, k): the open interval about
/// d_iw/2 of radius L, or empty when no admissible L exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NsRange {
    pub k: i64,
    /// Open interval endpoints (lo, hi); None when empty.
    pub interval: Option<(i64, i64)>,
}

pub fn ns_range(ctx: &Ctx, char: CharIndex, eval_weight: i64, k: i64) -> Result<NsRange> {
    let params = &ctx.params;
    if k < 2 || !dims::in_class(params, char, k) {
        return Err(Error::Domain(format!(
            "ns_range requires an in-class weight k >= 2, got {k}"
        )));
    }
    let val = wdiff_val(eval_weight, k, params.p);
    if val == Valuation::Infinity {
        // Evaluation at w_k itself: every n with positive multiplicity is
        // near-Steinberg, so the range is the exact open multiplicity
        // interval (d_ur, d_iw - d_ur), regardless of parity.
        let ur = dims::dim_ur(params, char, k)? as i64;
        let iw = dims::dim_iw(params, char, k)? as i64;
        return Ok(NsRange {
            k,
            interval: if iw - ur > ur + 1 {
                Some((ur, iw - ur))
            } else {
                None
            },
        });
    }
    let profile = delta_profile(ctx, char, k)?;
    // Hull gaps are nondecreasing in l, so scan up while the valuation
    // still clears the gap.
    let mut best = None;
    for l in 1..=profile.half {
        if val.ge_rat(profile.hull_gap(l)) {
            best = Some(l);
        } else {
            break;
        }
    }
    let mid = dims::dim_iw(params, char, k)? as i64 / 2;
    Ok(NsRange {
        k,
        interval: best.map(|l| (mid - l, mid + l)),
    })
}

/// All n in [0, upto] that lie in no near-Steinberg range: exactly the
/// x-coordinates of vertices of NP(G(w_{k'}, -)) in that window.
///
/// The candidate-weight enumeration stops once d_iw(k)/2 provably exceeds
/// the largest reachable interval endpoint: the hull-gap lower bound
/// Delta_{k,l} - Delta_{k,l-1} >= l forces L <= v_p(w_{k'} - w_k)
/// <= 2 + log_p(k + |k'| + 1).
pub fn vertices_via_ns(
    ctx: &Ctx,
    char: CharIndex,
    eval_weight: i64,
    upto: i64,
) -> Result<BTreeSet<i64>> {
    if upto < 0 {
        return Err(Error::InvalidParam(format!("upto = {upto} must be >= 0")));
    }
    let intervals = ns_intervals(ctx, char, eval_weight, upto)?;
    let mut out = BTreeSet::new();
    'outer: for n in 0..=upto {
        for &(lo, hi) in &intervals {
            if lo < n && n < hi {
                continue 'outer;
            }
        }
        out.insert(n);
    }
    Ok(out)
}

/// Nonempty NS intervals whose enumeration window covers [0, upto].
pub(crate) fn ns_intervals(
    ctx: &Ctx,
    char: CharIndex,
    eval_weight: i64,
    upto: i64,
) -> Result<Vec<(i64, i64)>> {
    let params = &ctx.params;
    let mut intervals = Vec::new();
    let mut k = dims::k_eps(params, char);
    loop {
        let half_iw = dims::dim_iw(params, char, k)? as i64 / 2;
        let slack = 2 + ilog_p(k + eval_weight.abs() + 1, params.p) + 1;
        if half_iw > upto + slack {
            break;
        }
        if let NsRange {
            interval: Some((lo, hi)),
            ..
        } = ns_range(ctx, char, eval_weight, k)?
        {
            if lo < upto {
                intervals.push((lo, hi));
            }
        }
        k += params.p - 1;
    }
    // The enumeration bound above rests on v_p(w_{k'} - w_k) being finite,
    // which fails exactly at k = k'. If the evaluation weight is itself an
    // in-class weight past the window, add its own range explicitly.
    if eval_weight >= k && dims::in_class(params, char, eval_weight) {
        if let NsRange {
            interval: Some((lo, hi)),
            ..
        } = ns_range(ctx, char, eval_weight, eval_weight)?
        {
            if lo < upto {
                intervals.push((lo, hi));
            }
        }
    }
    Ok(intervals)
}

/// First `count` slopes (with multiplicity) of NP(G(w_{k'}, -)), exact.
///
/// Points are enumerated up to a certified vertex V >= count; the hull of
/// the prefix [0, V] then agrees with the full polygon there. Failure to
/// certify within the enumeration cap is an explicit error.
pub fn np_slopes(ctx: &Ctx, char: CharIndex, eval_weight: i64, count: u64) -> Result<SlopeSeq> {
    if count < 1 {
        return Err(Error::InvalidParam("np_slopes requires count >= 1".into()));
    }
    let key = (char.s_eps, eval_weight, count);
    if let Some(s) = ctx.np_memo.lock().unwrap().get(&key) {
        return Ok(SlopeSeq((**s).clone()));
    }
    let mut upto = count as i64 + 8;
    let vertex = loop {
        if upto > ctx.enumeration_cap {
            return Err(Error::UncertifiedTruncation(format!(
                "no certified vertex >= {count} found for eval weight {eval_weight} within cap {}",
                ctx.enumeration_cap
            )));
        }
        let verts = vertices_via_ns(ctx, char, eval_weight, upto)?;
        if let Some(&v) = verts.iter().find(|&&v| v >= count as i64) {
            break v;
        }
        upto *= 2;
    };
    let mut points = Vec::with_capacity(vertex as usize + 1);
    for n in 0..=vertex {
        points.push((n, ghost::ghost_val(ctx, char, n as u64, eval_weight)?));
    }
    let hull = lower_hull(&points)?;
    let last_x = hull.vertices.last().map(|&(x, _)| x);
    if last_x != Some(vertex) {
        return Err(Error::Invariant(format!(
            "certified vertex {vertex} not on prefix hull (last x = {last_x:?})"
        )));
    }
    let slopes = hull.slopes();
    let out: Vec<Rat> = slopes.0[..count as usize].to_vec();
    ctx.np_memo
        .lock()
        .unwrap()
        .insert(key, Arc::new(out.clone()));
    Ok(SlopeSeq(out))
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

    fn r(n: i64) -> Rat {
        Rat::from_integer(n)
    }

    fn fin(v: u64) -> Valuation {
        Valuation::Finite(v)
    }

    #[test]
    fn hull_examples() {
        let np = lower_hull(&[(0, fin(0)), (1, fin(0)), (2, fin(3))]).unwrap();
        assert_eq!(np.vertices, vec![(0, r(0)), (1, r(0)), (2, r(3))]);
        assert_eq!(np.slopes().0, vec![r(0), r(3)]);

        let np = lower_hull(&[(0, fin(0)), (1, fin(2)), (2, fin(2))]).unwrap();
        assert_eq!(np.vertices, vec![(0, r(0)), (2, r(2))]);
        assert_eq!(np.slopes().0, vec![r(1), r(1)]);

        let np = lower_hull(&[(0, fin(0)), (1, Valuation::Infinity), (2, fin(4))]).unwrap();
        assert_eq!(np.vertices, vec![(0, r(0)), (2, r(4))]);
        assert_eq!(np.slopes().0, vec![r(2), r(2)]);
    }

    #[test]
    fn hull_input_validation() {
        assert!(lower_hull(&[]).is_err());
        assert!(lower_hull(&[(1, fin(0))]).is_err());
        assert!(lower_hull(&[(0, Valuation::Infinity), (1, fin(0))]).is_err());
        assert!(lower_hull(&[(0, fin(0)), (0, fin(1))]).is_err());
    }

    #[test]
    fn stretch_examples() {
        let np = lower_hull(&[(0, fin(0)), (1, fin(0)), (2, fin(3))]).unwrap();
        let st = np.stretch(2).unwrap();
        assert_eq!(st.slopes().0, vec![r(0), r(0), r(3), r(3)]);
        assert_eq!(np.stretch(1).unwrap(), np);
        let np2 = lower_hull(&[(0, fin(0)), (2, fin(2))]).unwrap();
        assert_eq!(np2.stretch(3).unwrap().vertices, vec![(0, r(0)), (6, r(6))]);
        assert!(np.stretch(0).is_err());
    }

    #[test]
    fn slopes_nondecreasing() {
        let np = lower_hull(&[
            (0, fin(0)),
            (1, fin(0)),
            (2, fin(3)),
            (3, fin(9)),
            (4, fin(20)),
        ])
        .unwrap();
        let s = np.slopes().0;
        assert!(s.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn delta_profile_examples() {
        let ctx = ctx();
        let prof = delta_profile(&ctx, c0(), 14).unwrap();
        assert_eq!(prof.half, 1);
        assert_eq!(prof.raw(0), r(2));
        assert_eq!(prof.raw(1), r(6));
        assert_eq!(prof.raw(-1), r(6));
        let prof4 = delta_profile(&ctx, c0(), 4).unwrap();
        assert_eq!(prof4.half, 0);
    }

    #[test]
    fn ns_range_examples() {
        let ctx = ctx();
        let ns = ns_range(&ctx, c0(), 4, 14).unwrap();
        assert_eq!(ns.interval, None);
        let ns = ns_range(&ctx, c0(), 14, 14).unwrap();
        assert_eq!(ns.interval, Some((1, 3)));
        let ns = ns_range(&ctx, c0(), 4, 4).unwrap();
        assert_eq!(ns.interval, None);
    }

    #[test]
    fn vertices_via_ns_examples() {
        let ctx = ctx();
        let v = vertices_via_ns(&ctx, c0(), 4, 2).unwrap();
        assert_eq!(v.into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        let v = vertices_via_ns(&ctx, c0(), 14, 3).unwrap();
        assert_eq!(v.into_iter().collect::<Vec<_>>(), vec![0, 1, 3]);
        let v = vertices_via_ns(&ctx, c0(), 24, 0).unwrap();
        assert_eq!(v.into_iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn np_slopes_examples() {
        let ctx = ctx();
        assert_eq!(np_slopes(&ctx, c0(), 4, 1).unwrap().0, vec![r(0)]);
        assert_eq!(np_slopes(&ctx, c0(), 14, 1).unwrap().0, vec![r(0)]);
        assert_eq!(np_slopes(&ctx, c0(), 4, 2).unwrap().0, vec![r(0), r(3)]);
    }

    #[test]
    fn guaranteed_vertex_at_dim_iw() {
        let ctx = ctx();
        for k in [4i64, 14, 24, 44, 104] {
            let d = dims::dim_iw(&ctx.params, c0(), k).unwrap() as i64;
            let verts = vertices_via_ns(&ctx, c0(), k, d).unwrap();
            assert!(verts.contains(&d), "x = dim_iw = {d} not a vertex at k = {k}");
        }
    }

    #[test]
    fn ns_ranges_nested() {
        let ctx = ctx();
        for kp in [4i64, 14, 44, -6] {
            let intervals = ns_intervals(&ctx, c0(), kp, 40).unwrap();
            for (i, &(a1, b1)) in intervals.iter().enumerate() {
                for &(a2, b2) in &intervals[i + 1..] {
                    let disjoint = b1 <= a2 || b2 <= a1;
                    let nested =
                        (a1 <= a2 && b2 <= b1) || (a2 <= a1 && b1 <= b2);
                    assert!(disjoint || nested, "kp={kp}: ({a1},{b1}) vs ({a2},{b2})");
                }
            }
        }
    }
}
