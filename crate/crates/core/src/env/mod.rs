//! Cookie laws and replayable arrow environments.

mod leftovers;
mod profile;
mod walls;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub use leftovers::{
    iterated_leftover, leftover_with_starts, stationary_leftover_window, LeftoverWindow,
};
pub use profile::LocalTimeProfile;
pub use walls::{GapLaw, WallsEnv};

/// Lane of the arrow stream; shared by sampled and walls environments so a
/// walls environment with a wall on every site reproduces the sampled one.
pub(crate) const ARROW_LANE: u64 = 1;

/// One instruction. `Right` plays the role of `+1`/`1`, `Left` of `-1`/`0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arrow {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Arrow {
    #[inline(always)]
    pub fn step(self) -> i64 {
        match self {
            Arrow::Left => -1,
            Arrow::Right => 1,
        }
    }

    pub fn flip(self) -> Arrow {
        match self {
            Arrow::Left => Arrow::Right,
            Arrow::Right => Arrow::Left,
        }
    }

    pub fn from_char(c: char) -> Option<Arrow> {
        match c {
            'L' | 'l' | '0' => Some(Arrow::Left),
            'R' | 'r' | '1' => Some(Arrow::Right),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Arrow::Left => 'L',
            Arrow::Right => 'R',
        }
    }
}

impl From<CookieSpec> for Vec<f64> {
    fn from(s: CookieSpec) -> Self {
        s.p
    }
}

impl TryFrom<Vec<f64>> for CookieSpec {
    type Error = Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        CookieSpec::new(p)
    }
}

/// Per-site cookie law: the `i`-th departure from a site goes right with
/// probability `p[i-1]` for `i <= M` and with probability 1/2 afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct CookieSpec {
    p: Vec<f64>,
    thresholds: Vec<u64>,
}

impl CookieSpec {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidParameter("M must be at least 1".into()));
        }
        if let Some(bad) = p.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "cookie strength {bad} is not inside (0,1)"
            )));
        }
        let thresholds = p.iter().map(|&q| rng::threshold(q)).collect();
        Ok(Self { p, thresholds })
    }

    /// `M` cookies of equal strength `p`.
    pub fn homogeneous(m: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; m])
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Expected total drift per site, `sum (2 p_i - 1)`.
    pub fn delta(&self) -> f64 {
        self.p.iter().map(|q| 2.0 * q - 1.0).sum()
    }

    /// The law with every cookie strength replaced by `1 - p_i`.
    pub fn reversed(&self) -> CookieSpec {
        CookieSpec::new(self.p.iter().map(|q| 1.0 - q).collect()).expect("valid spec")
    }

    pub(crate) fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }
}

/// `sum (2 p_i - 1)`.
pub fn delta(spec: &CookieSpec) -> f64 {
    spec.delta()
}

/// Result of scanning a row for a number of arrows of one kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowScan {
    /// `count` counted arrows precede the target; `used` arrows were read
    /// including the target.
    Found { count: u64, used: u64 },
    /// The row provably never contains the target (all-`Right` tail).
    Never,
}

#[inline(always)]
pub(crate) fn cookie_row_arrow(lane: u64, thr: &[u64], x: i64, i: u64) -> Arrow {
    let key = rng::row_key(lane, x);
    let m = thr.len() as u64;
    let right = if i <= m {
        rng::stream(key, i) < thr[(i - 1) as usize]
    } else {
        let b = i - m - 1;
        (rng::tail_word(key, b >> 6) >> (b & 63)) & 1 == 1
    };
    if right {
        Arrow::Right
    } else {
        Arrow::Left
    }
}

pub(crate) fn cookie_row_scan(
    lane: u64,
    thr: &[u64],
    x: i64,
    start: u64,
    need: u64,
    counted: Arrow,
    cap: u64,
) -> Result<RowScan> {
    if need == 0 {
        return Ok(RowScan::Found { count: 0, used: 0 });
    }
    let key = rng::row_key(lane, x);
    let m = thr.len() as u64;
    let mut count = 0u64;
    let mut remaining = need;
    let mut used = 0u64;
    let mut i = start;
    while i <= m {
        if used >= cap {
            return Err(Error::ScanCap { site: x, cap });
        }
        let a = if rng::stream(key, i) < thr[(i - 1) as usize] {
            Arrow::Right
        } else {
            Arrow::Left
        };
        used += 1;
        if a == counted {
            count += 1;
        } else {
            remaining -= 1;
            if remaining == 0 {
                return Ok(RowScan::Found { count, used });
            }
        }
        i += 1;
    }
    let b = i - m - 1;
    let mut w = b >> 6;
    let invert = counted == Arrow::Left;
    let words = || {
        let v = rng::tail_word(key, w);
        w += 1;
        if invert {
            !v
        } else {
            v
        }
    };
    match rng::ones_before_nth_zero(words, remaining, (b & 63) as u32, cap.saturating_sub(used)) {
        rng::BitScan::Found { ones, consumed } => Ok(RowScan::Found {
            count: count + ones,
            used: used + consumed,
        }),
        rng::BitScan::Capped { .. } => Err(Error::ScanCap { site: x, cap }),
    }
}

/// Lazily sampled i.i.d. cookie environment.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledEnv {
    pub spec: CookieSpec,
    pub seed: u64,
    lane: u64,
}

impl SampledEnv {
    pub fn new(spec: CookieSpec, seed: u64) -> Self {
        Self {
            spec,
            seed,
            lane: rng::lane_key(seed, ARROW_LANE),
        }
    }
}

/// Explicit table on `[lo, hi] x [1, depth]`, all `Right` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteEnv {
    lo: i64,
    hi: i64,
    depth: u64,
    rows: Arc<Vec<Vec<Arrow>>>,
}

impl FiniteEnv {
    /// `rows[x - lo]` holds the first arrows of site `x`; short rows are
    /// padded with `Right`.
    pub fn new(lo: i64, hi: i64, depth: u64, rows: Vec<Vec<Arrow>>) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidParameter(format!(
                "empty window [{lo}, {hi}]"
            )));
        }
        if rows.len() as i64 != hi - lo + 1 {
            return Err(Error::InvalidParameter(format!(
                "window [{lo}, {hi}] needs {} rows, got {}",
                hi - lo + 1,
                rows.len()
            )));
        }
        let mut rows = rows;
        for r in rows.iter_mut() {
            if r.len() as u64 > depth {
                return Err(Error::InvalidParameter(format!(
                    "row of length {} exceeds depth {depth}",
                    r.len()
                )));
            }
            r.resize(depth as usize, Arrow::Right);
        }
        Ok(Self {
            lo,
            hi,
            depth,
            rows: Arc::new(rows),
        })
    }

    pub fn all_right(lo: i64, hi: i64, depth: u64) -> Self {
        Self::new(lo, hi, depth, vec![Vec::new(); (hi - lo + 1) as usize]).expect("valid")
    }

    /// Builds a table from strings such as `"RLRR"`, one per site.
    pub fn from_strings(lo: i64, depth: u64, rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|s| {
                s.chars()
                    .map(|c| {
                        Arrow::from_char(c)
                            .ok_or_else(|| Error::InvalidParameter(format!("bad arrow {c:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(lo, lo + rows.len() as i64 - 1, depth, parsed)
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    /// Stored arrows of site `x` (all `Right` outside the window).
    pub fn row(&self, x: i64) -> Vec<Arrow> {
        if x < self.lo || x > self.hi {
            vec![Arrow::Right; self.depth as usize]
        } else {
            self.rows[(x - self.lo) as usize].clone()
        }
    }

    #[inline(always)]
    fn arrow(&self, x: i64, i: u64) -> Arrow {
        if x < self.lo || x > self.hi || i > self.depth {
            Arrow::Right
        } else {
            self.rows[(x - self.lo) as usize][(i - 1) as usize]
        }
    }

    fn scan(&self, x: i64, start: u64, need: u64, counted: Arrow) -> RowScan {
        if need == 0 {
            return RowScan::Found { count: 0, used: 0 };
        }
        let mut count = 0;
        let mut remaining = need;
        let mut used = 0;
        let mut i = start;
        while i <= self.depth {
            let a = self.arrow(x, i);
            used += 1;
            if a == counted {
                count += 1;
            } else {
                remaining -= 1;
                if remaining == 0 {
                    return RowScan::Found { count, used };
                }
            }
            i += 1;
        }
        match counted {
            // The tail is all `Right`: the next `remaining` arrows finish.
            Arrow::Left => RowScan::Found {
                count,
                used: used + remaining,
            },
            Arrow::Right => RowScan::Never,
        }
    }

    fn shifted(&self, l: &LocalTimeProfile) -> FiniteEnv {
        let rows = (self.lo..=self.hi)
            .map(|x| {
                let s = l.get(x);
                (1..=self.depth).map(|n| self.arrow(x, n + s)).collect()
            })
            .collect();
        FiniteEnv {
            lo: self.lo,
            hi: self.hi,
            depth: self.depth,
            rows: Arc::new(rows),
        }
    }
}

/// An environment read through a per-site index shift.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedEnv {
    base: Arc<ArrowEnvironment>,
    shift: LocalTimeProfile,
}

impl ShiftedEnv {
    pub fn base(&self) -> &ArrowEnvironment {
        &self.base
    }

    pub fn shift(&self) -> &LocalTimeProfile {
        &self.shift
    }
}

/// A replayable map `(site, index) -> Arrow`.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrowEnvironment {
    Sampled(SampledEnv),
    Finite(FiniteEnv),
    Walls(WallsEnv),
    Shifted(ShiftedEnv),
}

impl ArrowEnvironment {
    pub fn sampled(spec: CookieSpec, seed: u64) -> Self {
        ArrowEnvironment::Sampled(SampledEnv::new(spec, seed))
    }

    pub fn finite(env: FiniteEnv) -> Self {
        ArrowEnvironment::Finite(env)
    }

    /// The `i`-th arrow (1-based) above site `x`.
    pub fn arrow(&self, x: i64, i: u64) -> Result<Arrow> {
        if i == 0 {
            return Err(Error::ArrowIndex(0));
        }
        Ok(self.arrow_at(x, i))
    }

    /// Like [`arrow`](Self::arrow) without the index check; `i >= 1`.
    #[inline]
    pub fn arrow_at(&self, x: i64, i: u64) -> Arrow {
        debug_assert!(i >= 1);
        match self {
            ArrowEnvironment::Sampled(s) => cookie_row_arrow(s.lane, s.spec.thresholds(), x, i),
            ArrowEnvironment::Finite(f) => f.arrow(x, i),
            ArrowEnvironment::Walls(w) => w.arrow(x, i),
            ArrowEnvironment::Shifted(s) => s.base.arrow_at(x, i + s.shift.get(x)),
        }
    }

    /// Scans row `x` from index `start`, counting `counted` arrows before the
    /// `need`-th arrow of the other kind. Reading more than `cap` arrows is an
    /// error; finite tables answer [`RowScan::Never`] instead of looping.
    pub fn scan_row(
        &self,
        x: i64,
        start: u64,
        need: u64,
        counted: Arrow,
        cap: u64,
    ) -> Result<RowScan> {
        if start == 0 {
            return Err(Error::ArrowIndex(0));
        }
        match self {
            ArrowEnvironment::Sampled(s) => {
                cookie_row_scan(s.lane, s.spec.thresholds(), x, start, need, counted, cap)
            }
            ArrowEnvironment::Finite(f) => Ok(f.scan(x, start, need, counted)),
            ArrowEnvironment::Walls(w) => w.scan(x, start, need, counted, cap),
            ArrowEnvironment::Shifted(s) => {
                s.base
                    .scan_row(x, start + s.shift.get(x), need, counted, cap)
            }
        }
    }

    /// For finite tables, the right edge beyond which every arrow is `Right`.
    pub fn escape_edge(&self) -> Option<i64> {
        match self {
            ArrowEnvironment::Finite(f) => Some(f.hi),
            _ => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteEnv> {
        match self {
            ArrowEnvironment::Finite(f) => Some(f),
            _ => None,
        }
    }

    /// Leftover environment `(x, n) -> self(x, n + l(x))`.
    ///
    /// Finite tables stay finite tables; other kinds are wrapped in a shift,
    /// and nested shifts are merged.
    pub fn leftover(&self, l: &LocalTimeProfile) -> ArrowEnvironment {
        if l.is_zero() {
            return self.clone();
        }
        match self {
            ArrowEnvironment::Finite(f) => ArrowEnvironment::Finite(f.shifted(l)),
            ArrowEnvironment::Shifted(s) => ArrowEnvironment::Shifted(ShiftedEnv {
                base: s.base.clone(),
                shift: s.shift.add(l),
            }),
            other => ArrowEnvironment::Shifted(ShiftedEnv {
                base: Arc::new(other.clone()),
                shift: l.clone(),
            }),
        }
    }

    pub fn from_spec(spec: &EnvSpec) -> Result<Self> {
        match spec {
            EnvSpec::Sampled { seed, m, p } => {
                let p = expand_p(*m, p)?;
                Ok(Self::sampled(CookieSpec::new(p)?, *seed))
            }
            EnvSpec::Finite {
                window,
                depth,
                table,
            } => {
                let [lo, hi] = *window;
                if hi < lo {
                    return Err(Error::InvalidParameter(format!(
                        "empty window [{lo}, {hi}]"
                    )));
                }
                let mut rows = vec![Vec::new(); (hi - lo + 1) as usize];
                for (key, row) in table {
                    let x: i64 = key.trim().parse().map_err(|_| {
                        Error::InvalidParameter(format!("table key {key:?} is not a site"))
                    })?;
                    if x < lo || x > hi {
                        return Err(Error::InvalidParameter(format!(
                            "table site {x} outside window [{lo}, {hi}]"
                        )));
                    }
                    rows[(x - lo) as usize] = row
                        .chars()
                        .map(|c| {
                            Arrow::from_char(c).ok_or_else(|| {
                                Error::InvalidParameter(format!("bad arrow {c:?} at site {x}"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                }
                Ok(Self::Finite(FiniteEnv::new(lo, hi, *depth, rows)?))
            }
            EnvSpec::Walls {
                seed,
                gap,
                height,
                wall_p,
                extent,
            } => Ok(Self::Walls(WallsEnv::new(
                *seed,
                gap.clone(),
                *height,
                *wall_p,
                extent.unwrap_or(walls::DEFAULT_EXTENT),
            )?)),
        }
    }

    /// Serializable description; `None` for shifted environments.
    pub fn to_spec(&self) -> Option<EnvSpec> {
        match self {
            ArrowEnvironment::Sampled(s) => Some(EnvSpec::Sampled {
                seed: s.seed,
                m: s.spec.m(),
                p: s.spec.p().to_vec(),
            }),
            ArrowEnvironment::Finite(f) => Some(EnvSpec::Finite {
                window: [f.lo, f.hi],
                depth: f.depth,
                table: (f.lo..=f.hi)
                    .map(|x| {
                        (
                            x.to_string(),
                            f.row(x).iter().map(|a| a.as_char()).collect(),
                        )
                    })
                    .collect(),
            }),
            ArrowEnvironment::Walls(w) => Some(w.to_spec()),
            ArrowEnvironment::Shifted(_) => None,
        }
    }
}

/// A single `p` is repeated `M` times; otherwise the list must have length `M`.
pub fn expand_p(m: usize, p: &[f64]) -> Result<Vec<f64>> {
    match p.len() {
        1 => Ok(vec![p[0]; m]),
        n if n == m => Ok(p.to_vec()),
        n => Err(Error::InvalidParameter(format!(
            "M = {m} but {n} cookie strengths were given"
        ))),
    }
}

/// JSON form of an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvSpec {
    Sampled {
        seed: u64,
        #[serde(rename = "M")]
        m: usize,
        p: Vec<f64>,
    },
    Finite {
        window: [i64; 2],
        depth: u64,
        /// Site -> arrow string such as `"RLR"`.
        table: BTreeMap<String, String>,
    },
    Walls {
        seed: u64,
        gap: GapLaw,
        height: u32,
        wall_p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        extent: Option<i64>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        assert_eq!(CookieSpec::new(vec![0.5]).unwrap().delta(), 0.0);
        assert!((CookieSpec::homogeneous(4, 0.8).unwrap().delta() - 2.4).abs() < 1e-12);
        assert!((CookieSpec::homogeneous(5, 0.85).unwrap().delta() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(CookieSpec::new(vec![]).is_err());
        assert!(CookieSpec::new(vec![1.0]).is_err());
        assert!(CookieSpec::new(vec![0.0]).is_err());
        assert!(CookieSpec::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn zero_index_is_rejected() {
        let env = ArrowEnvironment::sampled(CookieSpec::new(vec![0.7]).unwrap(), 3);
        assert_eq!(env.arrow(0, 0), Err(Error::ArrowIndex(0)));
    }

    #[test]
    fn finite_table_and_tail() {
        let f = FiniteEnv::from_strings(0, 3, &["LRL"]).unwrap();
        let env = ArrowEnvironment::finite(f);
        assert_eq!(env.arrow(0, 1).unwrap(), Arrow::Left);
        assert_eq!(env.arrow(0, 2).unwrap(), Arrow::Right);
        assert_eq!(env.arrow(0, 4).unwrap(), Arrow::Right);
        assert_eq!(env.arrow(1, 1).unwrap(), Arrow::Right);
        assert_eq!(env.arrow(-1, 1).unwrap(), Arrow::Right);
    }

    #[test]
    fn sampled_is_replayable() {
        let env = ArrowEnvironment::sampled(CookieSpec::homogeneous(2, 0.6).unwrap(), 99);
        let a: Vec<Arrow> = (1..200).map(|i| env.arrow_at(5, i)).collect();
        let _ = env.arrow_at(-4, 7);
        let b: Vec<Arrow> = (1..200).rev().map(|i| env.arrow_at(5, i)).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
    }

    #[test]
    fn leftover_shift_example() {
        let f = FiniteEnv::from_strings(0, 4, &["RLRR"]).unwrap();
        let env = ArrowEnvironment::finite(f);
        let l = LocalTimeProfile::new(0, vec![2], 0);
        let left = env.leftover(&l);
        let row: Vec<Arrow> = (1..=4).map(|i| left.arrow_at(0, i)).collect();
        assert_eq!(row, vec![Arrow::Right; 4]);
        assert_eq!(env.leftover(&LocalTimeProfile::zero()), env);
    }

    #[test]
    fn scan_finite_rows() {
        let f = FiniteEnv::from_strings(0, 5, &["RRLRL"]).unwrap();
        let env = ArrowEnvironment::finite(f);
        assert_eq!(
            env.scan_row(0, 1, 1, Arrow::Right, 100).unwrap(),
            RowScan::Found { count: 2, used: 3 }
        );
        assert_eq!(
            env.scan_row(0, 1, 2, Arrow::Right, 100).unwrap(),
            RowScan::Found { count: 3, used: 5 }
        );
        assert_eq!(
            env.scan_row(0, 1, 3, Arrow::Right, 100).unwrap(),
            RowScan::Never
        );
        assert_eq!(
            env.scan_row(7, 1, 1, Arrow::Right, 100).unwrap(),
            RowScan::Never
        );
        assert_eq!(
            env.scan_row(0, 3, 1, Arrow::Left, 100).unwrap(),
            RowScan::Found { count: 1, used: 2 }
        );
    }

    #[test]
    fn sampled_scan_matches_arrow_by_arrow() {
        let spec = CookieSpec::new(vec![0.9, 0.2, 0.7]).unwrap();
        for seed in 0..30u64 {
            let env = ArrowEnvironment::sampled(spec.clone(), seed);
            for x in -3..3 {
                for start in [1u64, 2, 4, 70, 130] {
                    for need in [1u64, 3, 40, 100] {
                        for counted in [Arrow::Right, Arrow::Left] {
                            let got = env.scan_row(x, start, need, counted, 1_000_000).unwrap();
                            let mut count = 0;
                            let mut seen = 0;
                            let mut i = start;
                            loop {
                                let a = env.arrow_at(x, i);
                                if a == counted {
                                    count += 1;
                                } else {
                                    seen += 1;
                                    if seen == need {
                                        break;
                                    }
                                }
                                i += 1;
                            }
                            assert_eq!(
                                got,
                                RowScan::Found {
                                    count,
                                    used: i - start + 1
                                }
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{"kind":"finite","window":[-1,1],"depth":3,"table":{"-1":"L","0":"RLR"}}"#;
        let spec: EnvSpec = serde_json::from_str(json).unwrap();
        let env = ArrowEnvironment::from_spec(&spec).unwrap();
        assert_eq!(env.arrow_at(-1, 1), Arrow::Left);
        assert_eq!(env.arrow_at(0, 2), Arrow::Left);
        let back = env.to_spec().unwrap();
        let again = ArrowEnvironment::from_spec(&back).unwrap();
        assert_eq!(env, again);

        let s = r#"{"kind":"sampled","seed":7,"M":4,"p":[0.8]}"#;
        let spec: EnvSpec = serde_json::from_str(s).unwrap();
        let env = ArrowEnvironment::from_spec(&spec).unwrap();
        let back: EnvSpec =
            serde_json::from_str(&serde_json::to_string(&env.to_spec().unwrap()).unwrap()).unwrap();
        assert_eq!(ArrowEnvironment::from_spec(&back).unwrap(), env);
    }
}
