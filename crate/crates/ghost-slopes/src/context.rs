//! Shared computation context: parameters, compatibility flags, and the
//! memoization caches behind the ghost, Newton-polygon, and slope-algorithm
//! layers.
//!
//! All caches are behave-as-if-absent: a cache hit returns exactly what a
//! fresh computation would. Locks guard get-or-compute only; results are
//! immutable once published, so a `Ctx` can be shared freely across threads.

use crate::arith::Valuation;
use crate::dims::GhostParams;
use crate::newton::DeltaProfile;
use crate::slopes_algo::CompatFlags;
use crate::Rat;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub struct Ctx {
    pub params: GhostParams,
    pub flags: CompatFlags,
    /// Cap on Newton-polygon point enumeration before an uncertified
    /// truncation error is raised.
    pub enumeration_cap: i64,
    pub(crate) ghost_vals: Mutex<HashMap<(i64, u64, i64), Valuation>>,
    pub(crate) support_bounds: Mutex<HashMap<(i64, u64), i64>>,
    pub(crate) profiles: Mutex<HashMap<(i64, i64), Arc<DeltaProfile>>>,
    pub(crate) slope_memo: Mutex<HashMap<(i64, i64), Arc<Vec<Rat>>>>,
    pub(crate) np_memo: Mutex<HashMap<(i64, i64, u64), Arc<Vec<Rat>>>>,
}

impl Ctx {
    pub fn new(params: GhostParams) -> Self {
        Self::with_flags(params, CompatFlags::default())
    }

    pub fn with_flags(params: GhostParams, flags: CompatFlags) -> Self {
        Ctx {
            params,
            flags,
            enumeration_cap: 1 << 16,
            ghost_vals: Mutex::new(HashMap::new()),
            support_bounds: Mutex::new(HashMap::new()),
            profiles: Mutex::new(HashMap::new()),
            slope_memo: Mutex::new(HashMap::new()),
            np_memo: Mutex::new(HashMap::new()),
        }
    }

    /// Snapshot of the variant-slope memo, for cache persistence.
    pub fn slope_memo_entries(&self) -> Vec<((i64, i64), Vec<Rat>)> {
        let guard = self.slope_memo.lock().unwrap();
        let mut out: Vec<_> = guard.iter().map(|(k, v)| (*k, (**v).clone())).collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }

    /// Preload variant-slope memo entries (from a persisted cache).
    pub fn preload_slope_memo(&self, entries: Vec<((i64, i64), Vec<Rat>)>) {
        let mut guard = self.slope_memo.lock().unwrap();
        for (key, seq) in entries {
            guard.entry(key).or_insert_with(|| Arc::new(seq));
        }
    }
}
