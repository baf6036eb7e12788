//! Single walks and k-particle mob walks on arrow environments.

mod blocks;
mod excursion;
mod regen;
mod sites;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::{Arrow, ArrowEnvironment, LocalTimeProfile};
use crate::error::{Error, Result};

pub use excursion::{excursion_decompose, trace_path, Excursions, Segment, SegmentKind};
pub use regen::{regenerations, Block, RegenerationRecord};
pub(crate) use sites::SiteVec;

/// What the scheduler may look at: the visible history, never future arrows.
pub struct MobView<'a> {
    pub t: u64,
    pub positions: &'a [i64],
    pub frozen: &'a [bool],
    local: &'a SiteVec<u32>,
}

impl MobView<'_> {
    pub fn local_time(&self, x: i64) -> u64 {
        self.local.get(x) as u64
    }
}

/// Picks the next particle from the visible history; `None` halts the run.
pub type CustomScheduler = Box<dyn FnMut(&MobView<'_>) -> Option<usize> + Send>;

/// Which particle moves next.
pub enum Scheduling {
    /// Leftmost particle, lowest index on ties.
    Minimum,
    /// Particles `0, 1, ..., k-1, 0, ...`.
    RoundRobin,
    /// Cyclic schedule in which the particle ranked `r` (0-based) in the
    /// given order gets `k - r` consecutive moves per cycle.
    Priority(Vec<usize>),
    /// The block construction that lets particle `j` walk on the leftover of
    /// particles `0..j`; finite environments with a common start only.
    SequentialBlocks,
    Custom(CustomScheduler),
}

impl fmt::Debug for Scheduling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduling::Minimum => write!(f, "Minimum"),
            Scheduling::RoundRobin => write!(f, "RoundRobin"),
            Scheduling::Priority(o) => write!(f, "Priority({o:?})"),
            Scheduling::SequentialBlocks => write!(f, "SequentialBlocks"),
            Scheduling::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// When to stop a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_steps: u64,
    /// Sites kept between the certified region and the slowest particle.
    pub margin: i64,
    /// A particle reaching `min(starts) - left_wall - 1` censors the run.
    pub left_wall: i64,
    /// Stop (certified) once every particle is at or beyond this site.
    pub right_target: Option<i64>,
    /// Particles leaving `[a, b]` are frozen where they land.
    pub interval: Option<(i64, i64)>,
    /// Particles that never move (non-proper scheduling).
    pub frozen: Vec<usize>,
    pub record_steps: bool,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_steps: 1_000_000,
            margin: 64,
            left_wall: 1_000,
            right_target: None,
            interval: None,
            frozen: Vec::new(),
            record_steps: false,
        }
    }
}

impl StopRule {
    pub fn steps(max_steps: u64) -> Self {
        Self {
            max_steps,
            ..Self::default()
        }
    }

    /// Certification of the window `[.., n]`: run until every particle is
    /// beyond `n + margin`.
    pub fn certify_to(n: i64) -> Self {
        let d = Self::default();
        Self {
            right_target: Some(n + d.margin),
            max_steps: u64::MAX,
            ..d
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Censor {
    /// Finite environment: every particle passed the table, the asymptotic
    /// quantities are exact.
    Escaped,
    /// Every particle left the stop interval.
    Exited,
    /// Every particle reached the right target; sites up to `upto` certified.
    Certified { upto: i64 },
    /// Step budget used up; `certified_upto` is the slowest position minus the margin.
    Exhausted { certified_upto: i64 },
    /// A particle reached the left wall at step `at`.
    LeftWall { at: u64 },
    /// A custom scheduler stopped the run.
    Halted,
}

impl Censor {
    /// Whether asymptotic quantities on the certified window are trustworthy.
    pub fn is_complete(&self) -> bool {
        matches!(
            self,
            Censor::Escaped | Censor::Exited | Censor::Certified { .. }
        )
    }

    pub fn certified_upto(&self) -> Option<i64> {
        match self {
            Censor::Escaped => Some(i64::MAX),
            Censor::Certified { upto } => Some(*upto),
            Censor::Exhausted { certified_upto } => Some(*certified_upto),
            _ => None,
        }
    }
}

/// One move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub t: u64,
    pub j: usize,
    pub from: i64,
    pub to: i64,
}

/// First time the minimum position reached each site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitTimes {
    origin: i64,
    times: Vec<Option<u64>>,
}

impl HitTimes {
    pub fn get(&self, x: i64) -> Option<u64> {
        if x < self.origin {
            return None;
        }
        self.times
            .get((x - self.origin) as usize)
            .copied()
            .flatten()
    }
}

/// Counts frozen at the first time the minimum position reaches `-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub local_time: LocalTimeProfile,
    pub lefts: LocalTimeProfile,
    /// Largest minimum position before that time.
    pub max_min: i64,
}

/// Full record of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MobTrace {
    pub k: usize,
    pub starts: Vec<i64>,
    #[serde(skip)]
    pub steps: Option<Vec<Step>>,
    pub final_positions: Vec<i64>,
    /// Departures per site (asymptotic on finite environments).
    pub local_time: LocalTimeProfile,
    /// Arrivals per site plus initial occupation.
    pub in_degree: LocalTimeProfile,
    /// Left jumps per site.
    pub lefts: LocalTimeProfile,
    pub min_hit: HitTimes,
    pub hit_minus1: Option<u64>,
    pub before_minus1: Option<Snapshot>,
    pub censor: Censor,
    pub proper: bool,
    pub total_steps: u64,
    /// Minimum position when the run stopped.
    pub final_min: i64,
}

impl MobTrace {
    pub fn rights(&self, x: i64) -> u64 {
        self.local_time.get(x) - self.lefts.get(x)
    }

    /// Trace steps as JSON lines.
    pub fn steps_jsonl(&self) -> String {
        let mut s = String::new();
        for st in self.steps.iter().flatten() {
            s.push_str(&serde_json::to_string(st).expect("serializable"));
            s.push('\n');
        }
        s
    }
}

enum SchedState {
    Minimum,
    RoundRobin { next: usize },
    Cycle { order: Vec<usize>, idx: usize },
    Blocks(blocks::BlockSchedule),
    Custom(CustomScheduler),
}

/// Step-by-step executor; [`run_mob`] and friends wrap it.
pub struct MobRunner<'e> {
    env: &'e ArrowEnvironment,
    k: usize,
    starts: Vec<i64>,
    pos: Vec<i64>,
    sched: SchedState,
    rule: StopRule,
    edge: Option<i64>,
    wall: i64,
    lt: SiteVec<u32>,
    lefts: SiteVec<u32>,
    indeg: SiteVec<u32>,
    min_hit: SiteVec<u64>,
    frozen: Vec<bool>,
    done: Vec<bool>,
    n_done: usize,
    t: u64,
    idle: u64,
    cur_min: i64,
    run_max: i64,
    check_structure: bool,
    hit_minus1: Option<u64>,
    before_minus1: Option<Snapshot>,
    steps: Option<Vec<Step>>,
    series: Option<Vec<i64>>,
    censor: Option<Censor>,
}

const NO_HIT: u64 = u64::MAX;

impl<'e> MobRunner<'e> {
    pub fn new(
        env: &'e ArrowEnvironment,
        starts: &[i64],
        scheduling: Scheduling,
        rule: StopRule,
    ) -> Result<Self> {
        let k = starts.len();
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if let Some(&j) = rule.frozen.iter().find(|&&j| j >= k) {
            return Err(Error::InvalidParameter(format!(
                "frozen particle {j} >= k = {k}"
            )));
        }
        if let Some((a, b)) = rule.interval {
            if a > b {
                return Err(Error::InvalidParameter(format!(
                    "empty interval [{a}, {b}]"
                )));
            }
        }
        let sched = match scheduling {
            Scheduling::Minimum => SchedState::Minimum,
            Scheduling::RoundRobin => SchedState::RoundRobin { next: 0 },
            Scheduling::Priority(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != (0..k).collect::<Vec<_>>() {
                    return Err(Error::InvalidParameter(format!(
                        "priority order {order:?} is not a permutation of 0..{k}"
                    )));
                }
                let cycle = order
                    .iter()
                    .enumerate()
                    .flat_map(|(r, &j)| std::iter::repeat_n(j, k - r))
                    .collect();
                SchedState::Cycle {
                    order: cycle,
                    idx: 0,
                }
            }
            Scheduling::SequentialBlocks => {
                SchedState::Blocks(blocks::BlockSchedule::new(env, starts)?)
            }
            Scheduling::Custom(f) => SchedState::Custom(f),
        };
        let min_start = *starts.iter().min().expect("k >= 1");
        let edge = env.escape_edge();
        let mut frozen = vec![false; k];
        for &j in &rule.frozen {
            frozen[j] = true;
        }
        let mut r = Self {
            env,
            k,
            starts: starts.to_vec(),
            pos: starts.to_vec(),
            sched,
            wall: min_start - rule.left_wall - 1,
            edge,
            lt: SiteVec::new(min_start, 0),
            lefts: SiteVec::new(min_start, 0),
            indeg: SiteVec::new(min_start, 0),
            min_hit: SiteVec::new(min_start, NO_HIT),
            done: vec![false; k],
            frozen,
            n_done: 0,
            t: 0,
            idle: 0,
            cur_min: min_start,
            run_max: min_start,
            check_structure: false,
            hit_minus1: None,
            before_minus1: None,
            steps: rule.record_steps.then(Vec::new),
            series: None,
            censor: None,
            rule,
        };
        for (j, &s) in starts.iter().enumerate() {
            *r.indeg.slot(s) += 1;
            r.refresh_done(j);
        }
        *r.min_hit.slot(min_start) = 0;
        if min_start == -1 {
            r.mark_minus1();
        }
        Ok(r)
    }

    /// Asserts on every step that at most one particle is strictly left of
    /// the running maximum of the minimum position.
    pub fn check_min_structure(mut self, on: bool) -> Self {
        self.check_structure = on;
        self
    }

    /// Records the minimum position after every step.
    pub fn record_min_series(mut self) -> Self {
        self.series = Some(vec![self.cur_min]);
        self
    }

    pub fn positions(&self) -> &[i64] {
        &self.pos
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn min_position(&self) -> i64 {
        self.cur_min
    }

    pub fn local_time(&self, x: i64) -> u64 {
        self.lt.get(x) as u64
    }

    pub fn in_degree(&self, x: i64) -> u64 {
        self.indeg.get(x) as u64
    }

    /// First time the minimum position reached `x`, if it has.
    pub fn min_hit(&self, x: i64) -> Option<u64> {
        match self.min_hit.get(x) {
            NO_HIT => None,
            t => Some(t),
        }
    }

    pub fn lefts(&self, x: i64) -> u64 {
        self.lefts.get(x) as u64
    }

    pub fn rule_mut(&mut self) -> &mut StopRule {
        self.censor = None;
        &mut self.rule
    }

    fn refresh_done(&mut self, j: usize) {
        let d = self.frozen[j]
            || match (self.rule.interval, self.edge) {
                (None, Some(edge)) => self.pos[j] > edge,
                _ => false,
            };
        if d && !self.done[j] {
            self.done[j] = true;
            self.n_done += 1;
        }
    }

    fn mark_minus1(&mut self) {
        self.hit_minus1 = Some(self.t);
        self.before_minus1 = Some(Snapshot {
            local_time: self.lt.to_profile(0),
            lefts: self.lefts.to_profile(0),
            max_min: self.run_max.max(self.cur_min),
        });
    }

    fn pick(&mut self) -> Option<usize> {
        let k = self.k;
        match &mut self.sched {
            SchedState::Minimum => {
                let mut best: Option<usize> = None;
                for j in 0..k {
                    if self.frozen[j] {
                        continue;
                    }
                    if best.is_none_or(|b| self.pos[j] < self.pos[b]) {
                        best = Some(j);
                    }
                }
                best
            }
            SchedState::RoundRobin { next } => {
                for _ in 0..k {
                    let j = *next;
                    *next = (*next + 1) % k;
                    if !self.frozen[j] {
                        return Some(j);
                    }
                }
                None
            }
            SchedState::Cycle { order, idx } => {
                for _ in 0..order.len() {
                    let j = order[*idx];
                    *idx = (*idx + 1) % order.len();
                    if !self.frozen[j] {
                        return Some(j);
                    }
                }
                None
            }
            SchedState::Blocks(b) => Some(b.next()),
            SchedState::Custom(f) => {
                let view = MobView {
                    t: self.t,
                    positions: &self.pos,
                    frozen: &self.frozen,
                    local: &self.lt,
                };
                f(&view)
            }
        }
    }

    /// Stop condition that holds before the next move, if any.
    fn stop_now(&self) -> Option<Censor> {
        if self.n_done == self.k {
            return Some(if self.rule.interval.is_some() {
                Censor::Exited
            } else if self.edge.is_some() {
                Censor::Escaped
            } else {
                Censor::Halted
            });
        }
        if let Some(target) = self.rule.right_target {
            if self.cur_min >= target {
                return Some(Censor::Certified {
                    upto: target - self.rule.margin,
                });
            }
        }
        if self.t >= self.rule.max_steps || self.idle > self.rule.max_steps {
            return Some(Censor::Exhausted {
                certified_upto: self.cur_min - self.rule.margin,
            });
        }
        None
    }

    /// Performs one move unless a stop condition holds.
    pub fn step(&mut self) -> Result<Option<Censor>> {
        if let Some(c) = self.censor {
            return Ok(Some(c));
        }
        if let Some(c) = self.stop_now() {
            self.censor = Some(c);
            return Ok(Some(c));
        }
        let Some(j) = self.pick() else {
            self.censor = Some(Censor::Halted);
            return Ok(Some(Censor::Halted));
        };
        if j >= self.k {
            return Err(Error::InvalidParameter(format!(
                "scheduler picked particle {j} of {}",
                self.k
            )));
        }
        if self.frozen[j] {
            self.idle += 1;
            return Ok(None);
        }
        self.move_particle(j)?;
        Ok(self.censor)
    }

    #[inline]
    fn move_particle(&mut self, j: usize) -> Result<()> {
        let x = self.pos[j];
        let l = self.lt.inc(x);
        let a = self.env.arrow_at(x, l as u64);
        if a == Arrow::Left {
            self.lefts.inc(x);
        }
        let y = x + a.step();
        self.indeg.inc(y);
        self.pos[j] = y;
        if let Some(s) = self.steps.as_mut() {
            s.push(Step {
                t: self.t,
                j,
                from: x,
                to: y,
            });
        }
        self.t += 1;
        if x == self.cur_min || y < self.cur_min {
            let m = *self.pos.iter().min().expect("k >= 1");
            if m != self.cur_min {
                self.cur_min = m;
                let slot = self.min_hit.slot(m);
                if *slot == NO_HIT {
                    *slot = self.t;
                }
                if m > self.run_max {
                    self.run_max = m;
                }
                if m == -1 && self.hit_minus1.is_none() {
                    self.mark_minus1();
                }
            }
        }
        if let Some(s) = self.series.as_mut() {
            s.push(self.cur_min);
        }
        if let Some((lo, hi)) = self.rule.interval {
            if y < lo || y > hi {
                self.frozen[j] = true;
            }
        }
        self.refresh_done(j);
        if y <= self.wall {
            self.censor = Some(Censor::LeftWall { at: self.t });
        }
        if self.check_structure {
            let behind = self.pos.iter().filter(|&&p| p < self.run_max).count();
            if behind > 1 {
                return Err(Error::Invariant(format!(
                    "{behind} particles left of the running maximum {} at step {}",
                    self.run_max, self.t
                )));
            }
        }
        Ok(())
    }

    /// Runs until a stop condition holds.
    pub fn run(&mut self) -> Result<Censor> {
        loop {
            if let Some(c) = self.step()? {
                return Ok(c);
            }
        }
    }

    /// Stops and produces the trace. On finite environments, particles past
    /// the table are moved right forever in closed form.
    pub fn finish(mut self) -> Result<MobTrace> {
        let censor = match self.censor {
            Some(c) => c,
            None => self.run()?,
        };
        let escaped: Vec<i64> = match (self.edge, self.rule.interval) {
            (Some(edge), None) => self.pos.iter().copied().filter(|&p| p > edge).collect(),
            _ => Vec::new(),
        };
        let tail = escaped.len() as u64;
        let (local_time, in_degree) = if escaped.is_empty() {
            (self.lt.to_profile(0), self.indeg.to_profile(0))
        } else {
            let (lo, hi) = self.lt.support().unwrap_or((0, 0));
            let (ilo, ihi) = self.indeg.support().unwrap_or((0, 0));
            let top = *escaped.iter().max().expect("nonempty");
            let lo = lo.min(ilo);
            let hi = hi.max(ihi).max(top);
            let lt = LocalTimeProfile::from_fn(lo, hi, tail, |x| {
                self.lt.get(x) as u64 + escaped.iter().filter(|&&p| p <= x).count() as u64
            });
            let ind = LocalTimeProfile::from_fn(lo, hi, tail, |x| {
                self.indeg.get(x) as u64 + escaped.iter().filter(|&&p| p < x).count() as u64
            });
            (lt, ind)
        };
        let proper = self.rule.frozen.is_empty() && censor != Censor::Halted;
        let min_hit = match self.min_hit.support() {
            None => HitTimes {
                origin: 0,
                times: Vec::new(),
            },
            Some((lo, hi)) => HitTimes {
                origin: lo,
                times: (lo..=hi)
                    .map(|x| match self.min_hit.get(x) {
                        NO_HIT => None,
                        t => Some(t),
                    })
                    .collect(),
            },
        };
        Ok(MobTrace {
            k: self.k,
            starts: self.starts,
            steps: self.steps,
            final_positions: self.pos.clone(),
            local_time,
            in_degree,
            lefts: self.lefts.to_profile(0),
            min_hit,
            hit_minus1: self.hit_minus1,
            before_minus1: self.before_minus1,
            censor,
            proper,
            total_steps: self.t,
            final_min: self.cur_min,
        })
    }

    pub(crate) fn take_series(&mut self) -> Vec<i64> {
        self.series.take().unwrap_or_default()
    }
}

/// Single walk from `start`.
pub fn run_single(env: &ArrowEnvironment, start: i64, rule: &StopRule) -> Result<MobTrace> {
    MobRunner::new(env, &[start], Scheduling::Minimum, rule.clone())?.finish()
}

/// `k` particles from 0.
pub fn run_mob(
    env: &ArrowEnvironment,
    k: usize,
    scheduling: Scheduling,
    rule: &StopRule,
) -> Result<MobTrace> {
    run_mob_from(env, &vec![0; k], scheduling, rule)
}

/// Particles from arbitrary starting sites.
pub fn run_mob_from(
    env: &ArrowEnvironment,
    starts: &[i64],
    scheduling: Scheduling,
    rule: &StopRule,
) -> Result<MobTrace> {
    MobRunner::new(env, starts, scheduling, rule.clone())?.finish()
}

/// Walker `j` runs alone on the leftover of walkers `1..j`. Returns the
/// stage traces and the summed local time.
pub fn run_sequential(
    env: &ArrowEnvironment,
    k: usize,
    rule: &StopRule,
) -> Result<(Vec<MobTrace>, LocalTimeProfile)> {
    run_sequential_from(env, &vec![0; k], rule)
}

/// Stage-wise walks from the given starts, in order.
pub fn run_sequential_from(
    env: &ArrowEnvironment,
    starts: &[i64],
    rule: &StopRule,
) -> Result<(Vec<MobTrace>, LocalTimeProfile)> {
    if starts.is_empty() {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut cur = env.clone();
    let mut total = LocalTimeProfile::zero();
    let mut traces = Vec::with_capacity(starts.len());
    for (j, &s) in starts.iter().enumerate() {
        let tr = run_single(&cur, s, rule)?;
        if !tr.censor.is_complete() {
            return Err(Error::Censored(format!(
                "stage {} of the sequential walk: {:?}",
                j + 1,
                tr.censor
            )));
        }
        total = total.add(&tr.local_time);
        cur = cur.leftover(&tr.local_time);
        traces.push(tr);
    }
    Ok((traces, total))
}

/// Minimum scheduling from 0 with the structural assertion enabled; also
/// returns the minimum-position series `X_t`.
pub fn min_walk(env: &ArrowEnvironment, k: usize, rule: &StopRule) -> Result<(MobTrace, Vec<i64>)> {
    let mut r = MobRunner::new(env, &vec![0; k], Scheduling::Minimum, rule.clone())?
        .check_min_structure(true)
        .record_min_series();
    r.run()?;
    let series = r.take_series();
    Ok((r.finish()?, series))
}

/// Final in-degree per site.
pub fn in_degree_profile(trace: &MobTrace) -> LocalTimeProfile {
    trace.in_degree.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CookieSpec, FiniteEnv};

    fn finite(lo: i64, depth: u64, rows: &[&str]) -> ArrowEnvironment {
        ArrowEnvironment::finite(FiniteEnv::from_strings(lo, depth, rows).unwrap())
    }

    #[test]
    fn all_right_single_walk() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(-2, 3, 2));
        let tr = run_single(&env, 0, &StopRule::default()).unwrap();
        assert_eq!(tr.censor, Censor::Escaped);
        assert_eq!(tr.local_time, LocalTimeProfile::new(0, vec![], 1));
        assert_eq!(tr.total_steps, 4);
    }

    #[test]
    fn single_left_then_tail() {
        // Arrows at 0: (L, then R...). X_1 = -1, back to 0, then right forever.
        let env = finite(0, 1, &["L"]);
        let rule = StopRule {
            record_steps: true,
            ..StopRule::default()
        };
        let tr = run_single(&env, 0, &rule).unwrap();
        let path: Vec<i64> = tr.steps.as_ref().unwrap().iter().map(|s| s.to).collect();
        assert_eq!(&path[..3], &[-1, 0, 1]);
        assert_eq!(tr.local_time.get(0), 2);
        assert_eq!(tr.local_time.get(-1), 1);
        assert_eq!(tr.local_time.get(7), 1);
        assert_eq!(tr.hit_minus1, Some(1));
    }

    #[test]
    fn two_particles_leapfrog_under_minimum() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 50, 1));
        let (tr, series) = min_walk(&env, 2, &StopRule::default()).unwrap();
        for (t, x) in series.iter().enumerate() {
            assert_eq!(*x, t as i64 / 2);
        }
        assert_eq!(tr.local_time.get(3), 2);
    }

    #[test]
    fn sampled_runs_replay() {
        let env = ArrowEnvironment::sampled(CookieSpec::new(vec![0.5]).unwrap(), 42);
        let rule = StopRule {
            max_steps: 5_000,
            record_steps: true,
            ..StopRule::default()
        };
        let a = run_single(&env, 0, &rule).unwrap();
        let b = run_single(&env, 0, &rule).unwrap();
        assert_eq!(a.steps, b.steps);
        assert_eq!(a.local_time, b.local_time);
    }

    #[test]
    fn priority_validation() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 3, 1));
        assert!(run_mob(
            &env,
            2,
            Scheduling::Priority(vec![0, 0]),
            &StopRule::default()
        )
        .is_err());
        assert!(run_mob(
            &env,
            2,
            Scheduling::Priority(vec![1, 0]),
            &StopRule::default()
        )
        .is_ok());
    }

    #[test]
    fn left_wall_censors() {
        let env = finite(-3, 5, &["LLLLL", "LLLLL", "LLLLL", "LLLLL"]);
        let rule = StopRule {
            left_wall: 2,
            ..StopRule::default()
        };
        let tr = run_single(&env, 0, &rule).unwrap();
        assert!(matches!(tr.censor, Censor::LeftWall { .. }));
        assert!(!tr.censor.is_complete());
    }

    #[test]
    fn custom_scheduler_halts_non_proper() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 5, 1));
        let sched = Scheduling::Custom(Box::new(
            |v: &MobView<'_>| {
                if v.positions[0] <= 6 {
                    Some(0)
                } else {
                    None
                }
            },
        ));
        let tr = run_mob(&env, 2, sched, &StopRule::default()).unwrap();
        assert_eq!(tr.censor, Censor::Halted);
        assert!(!tr.proper);
        assert_eq!(tr.local_time.get(0), 1);
        assert_eq!(tr.local_time.get(100), 1);
    }
}
