//! Exact property suites over randomized finite fixtures.

use serde::{Deserialize, Serialize};

use crate::env::stationary_leftover_window;
use crate::error::{Error, Result};
use crate::fixtures::{fixtures, random_starts, Fixture};
use crate::mob::{
    excursion_decompose, run_mob, run_mob_from, run_sequential, run_single, trace_path, MobTrace,
    Scheduling, StopRule,
};
use crate::zproc::check_tzn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exchangeability,
    Tzn,
    Crossings,
    Monotonicity,
    Window,
    Excursions,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Exchangeability,
        Suite::Tzn,
        Suite::Crossings,
        Suite::Monotonicity,
        Suite::Window,
        Suite::Excursions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Exchangeability => "exchangeability",
            Suite::Tzn => "tzn",
            Suite::Crossings => "crossings",
            Suite::Monotonicity => "monotonicity",
            Suite::Window => "window",
            Suite::Excursions => "excursions",
        }
    }

    /// `"all"` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',')
            .map(|p| {
                Suite::ALL
                    .into_iter()
                    .find(|x| x.name() == p.trim())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {p:?}")))
            })
            .collect()
    }

    pub fn check(self, f: &Fixture) -> Result<bool> {
        match self {
            Suite::Exchangeability => exchangeability(f),
            Suite::Tzn => check_tzn(&f.env, f.k).map(|c| c.agree),
            Suite::Crossings => check_tzn(&f.env, f.k).map(|c| c.z_vs_w && c.crossings),
            Suite::Monotonicity => monotonicity(f),
            Suite::Window => window_stability(f),
            Suite::Excursions => excursions(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub fixtures: u64,
    pub passed: u64,
    /// Indices of failing fixtures (first 20).
    pub failures: Vec<u64>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.fixtures
    }
}

pub fn run_suite(suite: Suite, seed: u64, count: u64) -> Result<SuiteReport> {
    let mut passed = 0;
    let mut failures = Vec::new();
    for f in fixtures(seed, count) {
        if suite.check(&f)? {
            passed += 1;
        } else if failures.len() < 20 {
            failures.push(f.index);
        }
    }
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        fixtures: count,
        passed,
        failures,
    })
}

fn rule() -> StopRule {
    StopRule::steps(u64::MAX)
}

fn complete(tr: MobTrace) -> Result<MobTrace> {
    if !tr.censor.is_complete() {
        return Err(Error::Invariant(format!(
            "fixture run did not escape: {:?}",
            tr.censor
        )));
    }
    Ok(tr)
}

/// Final local times agree across the minimum, round-robin, two priority
/// and the sequential-blocks schedulings and the stage-wise sequential
/// walk; in-degree brackets local time.
pub fn exchangeability(f: &Fixture) -> Result<bool> {
    let k = f.k;
    let forward: Vec<usize> = (0..k).collect();
    let backward: Vec<usize> = (0..k).rev().collect();
    let schedulings = vec![
        Scheduling::Minimum,
        Scheduling::RoundRobin,
        Scheduling::Priority(forward),
        Scheduling::Priority(backward),
        Scheduling::SequentialBlocks,
    ];
    let (_, reference) = run_sequential(&f.env, k, &rule())?;
    for s in schedulings {
        let tr = complete(run_mob(&f.env, k, s, &rule())?)?;
        if tr.local_time != reference {
            return Ok(false);
        }
        let (lo, hi) = f.finite().window();
        for x in lo - 2..=hi + 2 {
            let (l, i) = (tr.local_time.get(x), tr.in_degree.get(x));
            if l > i || i > l + k as u64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Moving starting positions to the right cannot increase local times.
pub fn monotonicity(f: &Fixture) -> Result<bool> {
    let xs = random_starts(f, 11);
    let shifts = random_starts(f, 12);
    let (lo, _) = f.finite().window();
    let ys: Vec<i64> = xs.iter().zip(&shifts).map(|(x, s)| x + (s - lo)).collect();
    let lx = complete(run_mob_from(&f.env, &xs, Scheduling::Minimum, &rule())?)?.local_time;
    let ly = complete(run_mob_from(&f.env, &ys, Scheduling::Minimum, &rule())?)?.local_time;
    Ok(ly.le(&lx))
}

/// The leftover on `[n, inf)` does not depend on where left of `n` the
/// walkers start.
pub fn window_stability(f: &Fixture) -> Result<bool> {
    let (lo, hi) = f.finite().window();
    let n = lo + 1 + (f.index as i64).rem_euclid(hi - lo);
    let depth = f.finite().depth();
    let near = stationary_leftover_window(&f.env, f.k, n, n - 1, &rule())?;
    let far = stationary_leftover_window(&f.env, f.k, n, lo - 3, &rule())?;
    Ok(near.rows(hi + 1, depth + 2) == far.rows(hi + 1, depth + 2))
}

/// The excursion decomposition of the walk from 0 reassembles its path, and
/// the predicted path from 1 is the actual walk from 1.
pub fn excursions(f: &Fixture) -> Result<bool> {
    let rec = StopRule {
        record_steps: true,
        ..rule()
    };
    let from0 = complete(run_single(&f.env, 0, &rec)?)?;
    let from1 = complete(run_single(&f.env, 1, &rec)?)?;
    let ex = excursion_decompose(&from0)?;
    Ok(ex.reassemble() == trace_path(&from0)? && ex.predicted_from_one == trace_path(&from1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_few_fixtures() {
        for s in Suite::ALL {
            let r = run_suite(s, 42, 40).unwrap();
            assert!(r.all_passed(), "{r:?}");
        }
    }

    #[test]
    fn parse() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 6);
        assert_eq!(
            Suite::parse_list("tzn,window").unwrap(),
            vec![Suite::Tzn, Suite::Window]
        );
        assert!(Suite::parse_list("nope").is_err());
    }
}
