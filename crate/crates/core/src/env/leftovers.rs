use super::{Arrow, ArrowEnvironment, LocalTimeProfile};
use crate::error::{Error, Result};
use crate::mob::{run_mob_from, run_single, Scheduling, StopRule};

/// `a_k` together with the stage local times `L^(1), ..., L^(k)`, where
/// `a_j` is the leftover of a single walk from 0 on `a_{j-1}`.
pub fn iterated_leftover(
    env: &ArrowEnvironment,
    k: usize,
    rule: &StopRule,
) -> Result<(ArrowEnvironment, Vec<LocalTimeProfile>)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut cur = env.clone();
    let mut stages = Vec::with_capacity(k);
    for j in 0..k {
        let tr = run_single(&cur, 0, rule)?;
        if !tr.censor.is_complete() {
            return Err(Error::Censored(format!(
                "stage {} did not certify transience ({:?})",
                j + 1,
                tr.censor
            )));
        }
        cur = cur.leftover(&tr.local_time);
        stages.push(tr.local_time);
    }
    Ok((cur, stages))
}

/// Leftover of `k` walkers started at `starts` (minimum scheduling).
pub fn leftover_with_starts(
    env: &ArrowEnvironment,
    starts: &[i64],
    rule: &StopRule,
) -> Result<ArrowEnvironment> {
    let tr = run_mob_from(env, starts, Scheduling::Minimum, rule)?;
    if !tr.censor.is_complete() {
        return Err(Error::Censored(format!(
            "walkers from {starts:?} did not certify transience ({:?})",
            tr.censor
        )));
    }
    Ok(env.leftover(&tr.local_time))
}

/// A leftover environment readable only on `[from, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftoverWindow {
    pub from: i64,
    env: ArrowEnvironment,
}

impl LeftoverWindow {
    pub fn arrow(&self, x: i64, i: u64) -> Result<Arrow> {
        if x < self.from {
            return Err(Error::Precondition(format!(
                "site {x} is left of the window start {}",
                self.from
            )));
        }
        self.env.arrow(x, i)
    }

    /// Rows `from..=to`, first `depth` arrows each.
    pub fn rows(&self, to: i64, depth: u64) -> Vec<Vec<Arrow>> {
        (self.from..=to)
            .map(|x| (1..=depth).map(|i| self.env.arrow_at(x, i)).collect())
            .collect()
    }
}

/// Leftover of `k` walkers all started at `probe_start`, restricted to
/// sites `>= n`; the restriction does not depend on `probe_start < n`.
pub fn stationary_leftover_window(
    env: &ArrowEnvironment,
    k: usize,
    n: i64,
    probe_start: i64,
    rule: &StopRule,
) -> Result<LeftoverWindow> {
    if probe_start >= n {
        return Err(Error::Precondition(format!(
            "probe start {probe_start} must be left of the window start {n}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let env = leftover_with_starts(env, &vec![probe_start; k], rule)?;
    Ok(LeftoverWindow { from: n, env })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::FiniteEnv;

    #[test]
    fn all_right_iterated() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(-2, 4, 6));
        let (a2, stages) = iterated_leftover(&env, 2, &StopRule::default()).unwrap();
        for l in &stages {
            assert_eq!(*l, LocalTimeProfile::new(0, vec![], 1));
        }
        assert_eq!(a2, env);
    }

    #[test]
    fn starts_minus_one_and_zero() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(-3, 3, 2));
        let tr = run_mob_from(&env, &[-1, 0], Scheduling::Minimum, &StopRule::default()).unwrap();
        assert_eq!(tr.local_time.get(-1), 1);
        assert_eq!(tr.local_time.get(0), 2);
        assert_eq!(tr.local_time.get(50), 2);
        assert_eq!(tr.local_time.get(-2), 0);
    }

    #[test]
    fn window_needs_left_probe() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(-3, 3, 2));
        assert!(stationary_leftover_window(&env, 1, 0, 0, &StopRule::default()).is_err());
        let w = stationary_leftover_window(&env, 2, 0, -5, &StopRule::default()).unwrap();
        assert!(w.arrow(-1, 1).is_err());
        let far = stationary_leftover_window(&env, 2, 0, -50, &StopRule::default()).unwrap();
        assert_eq!(w.rows(5, 4), far.rows(5, 4));
    }
}
