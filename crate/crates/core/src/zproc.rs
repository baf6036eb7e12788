//! The z-process: `z_0 = k` and `z_{n+1}` counts the `Right` arrows of row
//! `n` before its `(z_n - k + 1)`-th `Left` (zero once `z_n <= k - 1`).
//! Absorption at 0 is equivalent to the k-minimum walk from 0 hitting -1.

use serde::{Deserialize, Serialize};

use crate::env::{Arrow, ArrowEnvironment, RowScan};
use crate::error::{Error, Result};
use crate::mob::{min_walk, MobTrace, StopRule};

/// Per-row scan cap for sampled environments.
pub const SCAN_CAP: u64 = 1_000_000;

/// A z value; `Infinite` arises on finite tables whose row runs out of
/// `Left` arrows (the all-`Right` tail never supplies more).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZValue {
    Finite(u64),
    Infinite,
}

impl ZValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            ZValue::Finite(v) => Some(v),
            ZValue::Infinite => None,
        }
    }
}

impl Serialize for ZValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ZValue::Finite(v) => s.serialize_u64(*v),
            ZValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ZValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(v) => Ok(ZValue::Finite(v)),
            Raw::S(s) if s == "inf" => Ok(ZValue::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad z value {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZTrace {
    pub k: usize,
    pub z: Vec<ZValue>,
    pub absorbed: bool,
    /// Rows read.
    pub sites_consumed: usize,
}

impl ZTrace {
    /// `z_n`, with zeros after absorption and the last value repeated past
    /// an infinite one.
    pub fn get(&self, n: usize) -> ZValue {
        match self.z.get(n) {
            Some(v) => *v,
            None if self.absorbed => ZValue::Finite(0),
            None => *self.z.last().expect("z_0 is present"),
        }
    }
}

/// One step from a row given as an arrow sequence. `cap` bounds the number
/// of arrows read; a row that ends before enough `Left` arrows is a cap
/// breach.
pub fn z_step(row: impl IntoIterator<Item = Arrow>, z: u64, k: usize, cap: u64) -> Result<u64> {
    if z < k as u64 {
        return Ok(0);
    }
    let need = z - (k as u64 - 1);
    let mut seen = 0;
    let mut rights = 0;
    for (n, a) in row.into_iter().enumerate() {
        if n as u64 >= cap {
            break;
        }
        match a {
            Arrow::Right => rights += 1,
            Arrow::Left => {
                seen += 1;
                if seen == need {
                    return Ok(rights);
                }
            }
        }
    }
    Err(Error::ScanCap { site: -1, cap })
}

/// One step using row `n` of an environment.
pub fn z_step_env(env: &ArrowEnvironment, n: i64, z: ZValue, k: usize, cap: u64) -> Result<ZValue> {
    let ZValue::Finite(z) = z else {
        return Ok(ZValue::Infinite);
    };
    if z < k as u64 {
        return Ok(ZValue::Finite(0));
    }
    let need = z - (k as u64 - 1);
    match env.scan_row(n, 1, need, Arrow::Right, cap)? {
        RowScan::Found { count, .. } => Ok(ZValue::Finite(count)),
        RowScan::Never => Ok(ZValue::Infinite),
    }
}

/// Iterates rows `0..site_horizon` until absorption, an infinite value or
/// the horizon.
pub fn simulate_z(env: &ArrowEnvironment, k: usize, site_horizon: usize) -> Result<ZTrace> {
    simulate_z_capped(env, k, site_horizon, SCAN_CAP)
}

pub fn simulate_z_capped(
    env: &ArrowEnvironment,
    k: usize,
    site_horizon: usize,
    cap: u64,
) -> Result<ZTrace> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut z = vec![ZValue::Finite(k as u64)];
    let mut absorbed = false;
    for n in 0..site_horizon {
        let next = z_step_env(env, n as i64, z[n], k, cap)?;
        z.push(next);
        if next == ZValue::Finite(0) {
            absorbed = true;
            break;
        }
        if next == ZValue::Infinite {
            break;
        }
    }
    let sites_consumed = z.len() - 1;
    Ok(ZTrace {
        k,
        z,
        absorbed,
        sites_consumed,
    })
}

/// Survival indicator of the z-process without storing the trace: returns
/// the first absorbed index, or `None` if alive after `site_horizon` rows.
pub fn z_absorption_site(
    env: &ArrowEnvironment,
    k: usize,
    site_horizon: usize,
    cap: u64,
) -> Result<Option<usize>> {
    let mut z = ZValue::Finite(k as u64);
    for n in 0..site_horizon {
        z = z_step_env(env, n as i64, z, k, cap)?;
        match z {
            ZValue::Finite(0) => return Ok(Some(n + 1)),
            ZValue::Infinite => return Ok(None),
            _ => {}
        }
    }
    Ok(None)
}

/// Crossing counts `w_n` of a minimum-walk trace from 0: `w_0 = k` and
/// `w_n` is the number of right jumps from `n - 1` before the minimum
/// position first reaches -1 (over the whole run if it never does).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WCounts {
    pub w: Vec<u64>,
    pub t_minus1: Option<u64>,
    /// Largest minimum position before `t_-1` (unbounded when it is infinite).
    pub max_before: Option<i64>,
}

pub fn w_counts(trace: &MobTrace) -> Result<WCounts> {
    if trace.starts.iter().any(|&s| s != 0) {
        return Err(Error::Precondition("w counts need all walkers at 0".into()));
    }
    let k = trace.k as u64;
    let mut w = vec![k];
    match &trace.before_minus1 {
        Some(snap) => {
            for n in 1..=(snap.max_before_end() + 1) {
                let x = n - 1;
                w.push(snap.local_time.get(x) - snap.lefts.get(x));
            }
            Ok(WCounts {
                w,
                t_minus1: trace.hit_minus1,
                max_before: Some(snap.max_min),
            })
        }
        None => {
            if !trace.censor.is_complete() {
                return Err(Error::Censored(format!(
                    "t_-1 is undetermined on a censored trace ({:?})",
                    trace.censor
                )));
            }
            let end = trace.local_time.end().max(trace.lefts.end()) + 1;
            for n in 1..=end {
                w.push(trace.rights(n - 1));
            }
            Ok(WCounts {
                w,
                t_minus1: None,
                max_before: None,
            })
        }
    }
}

impl crate::mob::Snapshot {
    fn max_before_end(&self) -> i64 {
        (self.max_min + 2).max(self.local_time.end())
    }
}

/// Outcome of comparing the walk and z sides on a finite environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TznCheck {
    pub t_minus1_finite: bool,
    pub z_absorbed: bool,
    pub agree: bool,
    /// `z_n = w_n` when `t_-1` is finite, `z_n >= w_n` otherwise.
    pub z_vs_w: bool,
    /// The crossing identities for `w_n`.
    pub crossings: bool,
}

/// Runs the minimum walk and the z-process on the same finite table.
pub fn check_tzn(env: &ArrowEnvironment, k: usize) -> Result<TznCheck> {
    let f = env
        .as_finite()
        .ok_or_else(|| Error::Unsupported("check_tzn needs a finite environment".into()))?;
    let (trace, _) = min_walk(env, k, &StopRule::steps(u64::MAX))?;
    if trace.censor != crate::mob::Censor::Escaped {
        return Err(Error::Invariant(format!(
            "finite environment did not escape: {:?}",
            trace.censor
        )));
    }
    let (_, hi) = f.window();
    let horizon = (hi.max(0) + 3) as usize;
    let z = simulate_z(env, k, horizon)?;
    let w = w_counts(&trace)?;
    let t_minus1_finite = trace.hit_minus1.is_some();
    let n_max = w.w.len().max(z.z.len()) + 2;
    let w_at = |n: usize| w.w.get(n).copied().unwrap_or(0);
    let z_vs_w = (0..n_max).all(|n| match z.get(n) {
        ZValue::Infinite => !t_minus1_finite,
        ZValue::Finite(v) => {
            if t_minus1_finite {
                v == w_at(n)
            } else {
                v >= w_at(n)
            }
        }
    });
    Ok(TznCheck {
        t_minus1_finite,
        z_absorbed: z.absorbed,
        agree: t_minus1_finite == z.absorbed,
        z_vs_w,
        crossings: crossing_identities(&trace, &w, k),
    })
}

/// `w_n = k + lefts(n)` for all `n` when `t_-1` is infinite;
/// `w_n = k - 1 + lefts before t_-1 (n)` for `0 <= n <= M` and
/// `w_{M+1} <= k - 1` otherwise, with `M` the largest minimum before `t_-1`.
pub fn crossing_identities(trace: &MobTrace, w: &WCounts, k: usize) -> bool {
    let k = k as u64;
    match (&trace.before_minus1, w.max_before) {
        (Some(snap), Some(m)) => {
            let w_at = |n: i64| w.w.get(n as usize).copied().unwrap_or(0);
            (0..=m).all(|n| w_at(n) == k - 1 + snap.lefts.get(n)) && w_at(m + 1) < k
        }
        _ => {
            w.w.iter()
                .enumerate()
                .all(|(n, &wn)| wn == k + trace.lefts.get(n as i64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CookieSpec, FiniteEnv};
    use Arrow::{Left as L, Right as R};

    #[test]
    fn z_step_examples() {
        assert_eq!(z_step([L, R], 1, 1, 10).unwrap(), 0);
        assert_eq!(z_step([R, R, L, R], 1, 1, 10).unwrap(), 2);
        assert_eq!(z_step([R, R, L], 1, 2, 10).unwrap(), 0);
        assert!(z_step([R, R, R], 1, 1, 10).is_err());
    }

    #[test]
    fn all_left_row_absorbs() {
        let env = ArrowEnvironment::finite(FiniteEnv::from_strings(0, 4, &["LLLL"]).unwrap());
        let z = simulate_z(&env, 1, 10).unwrap();
        assert_eq!(z.z, vec![ZValue::Finite(1), ZValue::Finite(0)]);
        assert!(z.absorbed);
    }

    #[test]
    fn all_right_finite_is_infinite() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 3, 2));
        let z = simulate_z(&env, 2, 10).unwrap();
        assert_eq!(z.z.last(), Some(&ZValue::Infinite));
        assert!(!z.absorbed);
    }

    #[test]
    fn tzn_examples() {
        let env = ArrowEnvironment::finite(FiniteEnv::from_strings(0, 2, &["LR"]).unwrap());
        let c = check_tzn(&env, 1).unwrap();
        assert!(c.t_minus1_finite && c.z_absorbed && c.agree && c.z_vs_w && c.crossings);
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(-2, 4, 3));
        for k in 1..4 {
            let c = check_tzn(&env, k).unwrap();
            assert!(!c.t_minus1_finite && !c.z_absorbed && c.agree && c.z_vs_w && c.crossings);
        }
    }

    #[test]
    fn w_counts_all_right() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 5, 2));
        let (tr, _) = min_walk(&env, 2, &StopRule::default()).unwrap();
        let w = w_counts(&tr).unwrap();
        assert!(w.w.iter().all(|&v| v == 2));
    }

    #[test]
    fn w_counts_immediate_hit() {
        let env = ArrowEnvironment::finite(FiniteEnv::from_strings(0, 1, &["L"]).unwrap());
        let (tr, _) = min_walk(&env, 1, &StopRule::default()).unwrap();
        let w = w_counts(&tr).unwrap();
        assert_eq!(w.t_minus1, Some(1));
        assert_eq!(w.max_before, Some(0));
        assert_eq!(w.w[..2], [1, 0]);
    }

    #[test]
    fn json_export() {
        let t = ZTrace {
            k: 1,
            z: vec![ZValue::Finite(1), ZValue::Infinite],
            absorbed: false,
            sites_consumed: 1,
        };
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<ZTrace>(&s).unwrap(), t);
    }

    #[test]
    fn sampled_z_deterministic() {
        let env = ArrowEnvironment::sampled(CookieSpec::homogeneous(4, 0.8).unwrap(), 9);
        assert_eq!(
            simulate_z(&env, 1, 200).unwrap(),
            simulate_z(&env, 1, 200).unwrap()
        );
    }
}
