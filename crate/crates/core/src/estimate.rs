//! Monte Carlo estimators over independent environment replicas. Replica
//! `i` uses the environment seeded by `replica_seed(seed, i)`; results are
//! merged in replica order, so they do not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{ArrowEnvironment, CookieSpec};
use crate::error::{Error, Result};
use crate::mob::{regenerations, run_mob, Censor, MobRunner, Scheduling, StopRule};
use crate::rng::replica_seed;
use crate::stats::{mean_se, proportion_se, wilson};
use crate::zproc::{z_absorption_site, SCAN_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: String,
    pub k: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub reps: u64,
    /// Replicas contributing to the estimate.
    pub used: u64,
    pub censored: u64,
    pub horizon: u64,
    pub seed: u64,
    pub flags: Vec<String>,
}

impl EstimateReport {
    fn new(quantity: &str, k: usize, reps: u64, horizon: u64, seed: u64) -> Self {
        EstimateReport {
            quantity: quantity.to_string(),
            k,
            estimate: f64::NAN,
            stderr: f64::NAN,
            reps,
            used: 0,
            censored: 0,
            horizon,
            seed,
            flags: Vec::new(),
        }
    }

    /// `estimate +- z stderr`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (
            self.estimate - z * self.stderr,
            self.estimate + z * self.stderr,
        )
    }
}

fn env_for(spec: &CookieSpec, seed: u64, i: u64) -> ArrowEnvironment {
    ArrowEnvironment::sampled(spec.clone(), replica_seed(seed, i))
}

fn par_replicas<T: Send>(reps: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..reps).into_par_iter().map(f).collect()
}

/// `sum num / sum den` with the delta-method standard error over replicas.
pub fn ratio_estimate(num: &[f64], den: &[f64]) -> (f64, f64) {
    let n = num.len();
    let (sn, sd): (f64, f64) = (num.iter().sum(), den.iter().sum());
    if n == 0 || sd == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let v = sn / sd;
    if n < 2 {
        return (v, f64::NAN);
    }
    let dbar = sd / n as f64;
    let ss: f64 = num.iter().zip(den).map(|(a, b)| (a - v * b).powi(2)).sum();
    (v, (ss / (n as f64 * (n - 1) as f64)).sqrt() / dbar)
}

/// Flags for parameters within 0.1 of the transience (`delta = k`) or
/// ballisticity (`delta = k + 1`) thresholds.
pub fn threshold_flags(delta: f64, k: usize) -> Vec<String> {
    let mut f = Vec::new();
    if (delta - k as f64).abs() < 0.1 {
        f.push("inconclusive near transience threshold".to_string());
    }
    if (delta - (k + 1) as f64).abs() < 0.1 {
        f.push("inconclusive near speed threshold".to_string());
    }
    f
}

/// Outcome of one z-process replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZOutcome {
    /// First index with `z_n = 0`.
    Absorbed(usize),
    Alive,
    /// A row scan exceeded the cap.
    Censored,
}

/// z-process outcomes for `k = 1..=k_max` on each replica environment;
/// `out[i][k-1]`.
pub fn transience_samples(
    spec: &CookieSpec,
    k_max: usize,
    reps: u64,
    site_horizon: usize,
    seed: u64,
) -> Result<Vec<Vec<ZOutcome>>> {
    if k_max == 0 || reps == 0 {
        return Err(Error::InvalidParameter(
            "k and reps must be at least 1".into(),
        ));
    }
    par_replicas(reps, |i| {
        let env = env_for(spec, seed, i);
        (1..=k_max)
            .map(
                |k| match z_absorption_site(&env, k, site_horizon, SCAN_CAP) {
                    Ok(Some(n)) => Ok(ZOutcome::Absorbed(n)),
                    Ok(None) => Ok(ZOutcome::Alive),
                    Err(Error::ScanCap { .. }) => Ok(ZOutcome::Censored),
                    Err(e) => Err(e),
                },
            )
            .collect()
    })
}

/// Replicas on which survival for `k + 1` is not dominated by survival for
/// `k` (absorption must come no later for the larger `k`).
pub fn monotonicity_violations(samples: &[Vec<ZOutcome>]) -> u64 {
    let rank = |o: ZOutcome| match o {
        ZOutcome::Absorbed(n) => Some(n),
        ZOutcome::Alive => Some(usize::MAX),
        ZOutcome::Censored => None,
    };
    samples
        .iter()
        .filter(|row| {
            row.windows(2).any(|w| match (rank(w[0]), rank(w[1])) {
                (Some(a), Some(b)) => b > a,
                _ => false,
            })
        })
        .count() as u64
}

fn survival_report(
    samples: &[Vec<ZOutcome>],
    k: usize,
    site_horizon: usize,
    seed: u64,
    delta: f64,
) -> EstimateReport {
    let mut r = EstimateReport::new(
        "survival",
        k,
        samples.len() as u64,
        site_horizon as u64,
        seed,
    );
    let col = samples.iter().map(|row| row[k - 1]);
    let censored = col.clone().filter(|o| *o == ZOutcome::Censored).count() as u64;
    let alive = col.filter(|o| *o == ZOutcome::Alive).count() as u64;
    r.censored = censored;
    r.used = r.reps - censored;
    if r.used > 0 {
        r.estimate = alive as f64 / r.used as f64;
        r.stderr = proportion_se(alive, r.used);
        let (lo, hi) = wilson(alive, r.used, 1.96);
        r.flags.push(format!("wilson95=[{lo:.5},{hi:.5}]"));
    }
    r.flags.extend(threshold_flags(delta, k));
    r
}

/// Fraction of replicas whose z-process from `z_0 = k` is alive after
/// `site_horizon` rows.
pub fn estimate_transience(
    spec: &CookieSpec,
    k: usize,
    reps: u64,
    site_horizon: usize,
    seed: u64,
) -> Result<EstimateReport> {
    let all = transience_samples(spec, k, reps, site_horizon, seed)?;
    let mut r = survival_report(&all, k, site_horizon, seed, spec.delta());
    let v = monotonicity_violations(&all);
    if v > 0 {
        r.flags
            .push(format!("monotonicity violated on {v} replicas"));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransienceTable {
    pub reports: Vec<EstimateReport>,
    pub monotonicity_violations: u64,
    /// `(k, horizon, surviving fraction)` at doubling horizons.
    pub curves: Vec<(usize, u64, f64)>,
}

pub fn transience_table(
    spec: &CookieSpec,
    k_max: usize,
    reps: u64,
    site_horizon: usize,
    seed: u64,
) -> Result<TransienceTable> {
    let all = transience_samples(spec, k_max, reps, site_horizon, seed)?;
    let reports = (1..=k_max)
        .map(|k| survival_report(&all, k, site_horizon, seed, spec.delta()))
        .collect();
    let mut horizons = Vec::new();
    let mut h = 1usize;
    while h < site_horizon {
        horizons.push(h);
        h *= 2;
    }
    horizons.push(site_horizon);
    let mut curves = Vec::new();
    for k in 1..=k_max {
        let outcomes: Vec<ZOutcome> = all
            .iter()
            .map(|row| row[k - 1])
            .filter(|o| *o != ZOutcome::Censored)
            .collect();
        for &h in &horizons {
            let alive = outcomes
                .iter()
                .filter(|o| match o {
                    ZOutcome::Absorbed(n) => *n > h,
                    _ => true,
                })
                .count();
            curves.push((k, h as u64, alive as f64 / outcomes.len().max(1) as f64));
        }
    }
    Ok(TransienceTable {
        reports,
        monotonicity_violations: monotonicity_violations(&all),
        curves,
    })
}

/// Regeneration block totals of one replica.
#[derive(Debug, Clone, Default, PartialEq)]
struct BlockTotals {
    blocks: u64,
    sum_dr: f64,
    sum_dtau: f64,
    identity_violations: u64,
    sandwich_violations: u64,
    /// 0 is a regeneration position.
    zero_regen: bool,
    /// `X_T / T` of the minimum.
    plain: f64,
    certified: bool,
}

fn min_walk_totals(env: &ArrowEnvironment, k: usize, steps: u64) -> Result<BlockTotals> {
    let tr = run_mob(env, k, Scheduling::Minimum, &StopRule::steps(steps))?;
    let rec = regenerations(&tr);
    let mut t = BlockTotals {
        plain: tr.final_min as f64 / tr.total_steps.max(1) as f64,
        zero_regen: rec.positions.first() == Some(&0),
        certified: !rec.censored,
        ..BlockTotals::default()
    };
    for b in &rec.blocks {
        t.blocks += 1;
        t.sum_dr += b.dr as f64;
        t.sum_dtau += b.dtau as f64;
        t.identity_violations += u64::from(b.step_defect(k) != 0);
        t.sandwich_violations += u64::from(!b.sandwich_holds(k));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedMinReport {
    /// `sum (r_{i+1} - r_i) / sum (tau_{i+1} - tau_i)` over blocks after the
    /// first regeneration.
    pub ratio: EstimateReport,
    /// Mean of `X_T / T`.
    pub plain: EstimateReport,
    /// `mean(r_2 - r_1) P(r_1 = 0)`; 1 in theory.
    pub renewal: EstimateReport,
    pub blocks: u64,
    pub identity_violations: u64,
    pub sandwich_violations: u64,
}

/// Speed of the k-minimum walk from `reps` runs of `steps` moves each.
pub fn estimate_speed_min(
    spec: &CookieSpec,
    k: usize,
    reps: u64,
    steps: u64,
    seed: u64,
) -> Result<SpeedMinReport> {
    if k == 0 || reps == 0 {
        return Err(Error::InvalidParameter(
            "k and reps must be at least 1".into(),
        ));
    }
    let totals = par_replicas(reps, |i| min_walk_totals(&env_for(spec, seed, i), k, steps))?;
    let flags = {
        let mut f = threshold_flags(spec.delta(), k);
        if spec.delta() <= (k + 1) as f64 {
            f.push("zero speed predicted".to_string());
        }
        f
    };

    let mut ratio = EstimateReport::new("speed_min_ratio", k, reps, steps, seed);
    let with_blocks: Vec<&BlockTotals> = totals.iter().filter(|t| t.blocks > 0).collect();
    let num: Vec<f64> = with_blocks.iter().map(|t| t.sum_dr).collect();
    let den: Vec<f64> = with_blocks.iter().map(|t| t.sum_dtau).collect();
    (ratio.estimate, ratio.stderr) = ratio_estimate(&num, &den);
    ratio.used = with_blocks.len() as u64;
    ratio.censored = reps - ratio.used;
    ratio.flags = flags.clone();

    let mut plain = EstimateReport::new("speed_min_plain", k, reps, steps, seed);
    let xs: Vec<f64> = totals.iter().map(|t| t.plain).collect();
    (plain.estimate, plain.stderr) = mean_se(&xs);
    plain.used = reps;
    plain.flags = flags;

    let renewal = renewal_report(&totals, k, reps, steps, seed);
    Ok(SpeedMinReport {
        ratio,
        plain,
        renewal,
        blocks: totals.iter().map(|t| t.blocks).sum(),
        identity_violations: totals.iter().map(|t| t.identity_violations).sum(),
        sandwich_violations: totals.iter().map(|t| t.sandwich_violations).sum(),
    })
}

fn renewal_report(
    totals: &[BlockTotals],
    k: usize,
    reps: u64,
    steps: u64,
    seed: u64,
) -> EstimateReport {
    let mut r = EstimateReport::new("renewal_product", k, reps, steps, seed);
    let used: Vec<&BlockTotals> = totals.iter().filter(|t| t.certified).collect();
    r.used = used.len() as u64;
    r.censored = reps - r.used;
    let n = used.len();
    let blocks: f64 = used.iter().map(|t| t.blocks as f64).sum();
    if n < 2 || blocks == 0.0 {
        return r;
    }
    let nf = n as f64;
    let m = used.iter().map(|t| t.sum_dr).sum::<f64>() / blocks;
    let p = used.iter().filter(|t| t.zero_regen).count() as f64 / nf;
    let nbar = blocks / nf;
    r.estimate = m * p;
    // Replica-level influence of the product.
    let infl: Vec<f64> = used
        .iter()
        .map(|t| {
            let im = (t.sum_dr - m * t.blocks as f64) / nbar;
            let ip = f64::from(u8::from(t.zero_regen)) - p;
            p * im + m * ip
        })
        .collect();
    let var = infl.iter().map(|x| x * x).sum::<f64>() / (nf - 1.0);
    r.stderr = (var / nf).sqrt();
    r
}

/// Hitting-time increments of walker `i` between common regeneration
/// positions, measured from the `i`-min walk and the `(i-1)`-min walk on
/// the same environment. The runs advance in lockstep until walker `i` has
/// made `steps` moves.
fn leftover_totals(env: &ArrowEnvironment, i: usize, steps: u64) -> Result<(f64, f64, u64)> {
    if i == 1 {
        let t = min_walk_totals(env, 1, steps)?;
        return Ok((t.sum_dr, t.sum_dtau, t.blocks));
    }
    const CHUNK: u64 = 1 << 14;
    let mut slow = MobRunner::new(env, &vec![0; i], Scheduling::Minimum, StopRule::steps(0))?;
    let mut fast = MobRunner::new(
        env,
        &vec![0; i - 1],
        Scheduling::Minimum,
        StopRule::steps(u64::MAX),
    )?;
    loop {
        let target = slow.time() + CHUNK;
        slow.rule_mut().max_steps = target;
        let c = slow.run()?;
        let m = slow.min_position();
        while fast.min_position() < m {
            if let Some(c) = fast.step()? {
                return Err(Error::Censored(format!("leading walkers stopped: {c:?}")));
            }
        }
        let own = slow.time().saturating_sub(fast.time());
        if own >= steps || !matches!(c, Censor::Exhausted { .. }) {
            break;
        }
    }
    let fast_hits: Vec<(i64, Option<u64>)> = {
        let (lo, hi) = (0, fast.min_position());
        (lo..=hi).map(|x| (x, fast.min_hit(x))).collect()
    };
    let tr = slow.finish()?;
    let rec = regenerations(&tr);
    let hit = |x: i64| fast_hits.get(x as usize).and_then(|(_, t)| *t);
    let (mut sdr, mut sdt, mut nb) = (0.0, 0.0, 0);
    for w in rec.positions.windows(2).zip(rec.times.windows(2)) {
        let ((a, b), (ta, tb)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        let (Some(fa), Some(fb)) = (hit(a), hit(b)) else {
            return Err(Error::Invariant(format!(
                "regeneration positions {a}, {b} not reached by the leading walkers"
            )));
        };
        let own = (tb - fb) as i128 - (ta - fa) as i128;
        if own <= 0 {
            return Err(Error::Invariant(format!(
                "nonpositive walker time between regenerations {a} and {b}"
            )));
        }
        sdr += (b - a) as f64;
        sdt += own as f64;
        nb += 1;
    }
    Ok((sdr, sdt, nb))
}

/// Speed `v_i` of the `i`-th walker (the walk on the `(i-1)`-fold leftover
/// environment), with `steps` moves of that walker per replica.
pub fn estimate_speed_leftover(
    spec: &CookieSpec,
    i: usize,
    reps: u64,
    steps: u64,
    seed: u64,
) -> Result<EstimateReport> {
    if i == 0 || reps == 0 {
        return Err(Error::InvalidParameter(
            "i and reps must be at least 1".into(),
        ));
    }
    let totals = par_replicas(reps, |r| leftover_totals(&env_for(spec, seed, r), i, steps))?;
    let mut rep = EstimateReport::new("speed_leftover", i, reps, steps, seed);
    let used: Vec<&(f64, f64, u64)> = totals.iter().filter(|t| t.2 > 0).collect();
    let num: Vec<f64> = used.iter().map(|t| t.0).collect();
    let den: Vec<f64> = used.iter().map(|t| t.1).collect();
    (rep.estimate, rep.stderr) = ratio_estimate(&num, &den);
    rep.used = used.len() as u64;
    rep.censored = reps - rep.used;
    rep.flags = threshold_flags(spec.delta(), i.saturating_sub(1));
    if spec.delta() <= (i + 1) as f64 {
        rep.flags.push("zero speed predicted".to_string());
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRelation {
    pub k: usize,
    pub min_speed: EstimateReport,
    pub walker_speeds: Vec<EstimateReport>,
    /// `1 / v^(k-min)`.
    pub lhs: f64,
    /// `sum_i 1 / v_i`.
    pub rhs: f64,
    /// Standard error of `lhs - rhs`, treating the estimates as independent.
    pub stderr: f64,
    pub within_3_sigma: bool,
}

/// Compares `1 / v^(k-min)` with `sum_{i <= k} 1 / v_i`.
pub fn check_speed_relation(
    spec: &CookieSpec,
    k: usize,
    reps: u64,
    steps: u64,
    seed: u64,
) -> Result<SpeedRelation> {
    if spec.delta() <= (k + 1) as f64 {
        return Err(Error::Precondition(format!(
            "the relation needs positive speeds for all walkers up to k, i.e. delta > k + 1 \
             (delta = {}, k = {k})",
            spec.delta()
        )));
    }
    let min_speed = estimate_speed_min(spec, k, reps, steps, seed)?.ratio;
    let walker_speeds = (1..=k)
        .map(|i| estimate_speed_leftover(spec, i, reps, steps, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(speed_relation(min_speed, walker_speeds))
}

/// Relation between already computed estimates; the standard error treats
/// them as independent and propagates through `v -> 1/v`.
pub fn speed_relation(
    min_speed: EstimateReport,
    walker_speeds: Vec<EstimateReport>,
) -> SpeedRelation {
    let k = walker_speeds.len();
    let inv = |r: &EstimateReport| (1.0 / r.estimate, r.stderr / (r.estimate * r.estimate));
    let (lhs, lse) = inv(&min_speed);
    let mut rhs = 0.0;
    let mut var = lse * lse;
    for w in &walker_speeds {
        let (v, se) = inv(w);
        rhs += v;
        var += se * se;
    }
    let stderr = var.sqrt();
    SpeedRelation {
        k,
        min_speed,
        walker_speeds,
        lhs,
        rhs,
        stderr,
        within_3_sigma: (lhs - rhs).abs() <= 3.0 * stderr,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UPlusPoint {
    pub j: usize,
    /// `P(T_{j+1} - T_j > j)`.
    pub term: f64,
    /// Sum of terms `0..=j`.
    pub partial: f64,
    pub stderr: f64,
    pub used: u64,
    pub censored: u64,
}

/// Partial sums of `u_+ = sum_j P(T_{j+1} - T_j > j)` for a single walk,
/// `T_j` being the hitting time of `j`. Replicas that have not reached
/// `j + 1` within `steps` moves are excluded from term `j`.
pub fn estimate_u_plus(
    spec: &CookieSpec,
    j_max: usize,
    reps: u64,
    steps: u64,
    seed: u64,
) -> Result<Vec<UPlusPoint>> {
    let hits = par_replicas(reps, |i| {
        let env = env_for(spec, seed, i);
        let rule = StopRule {
            right_target: Some(j_max as i64 + 1),
            margin: 0,
            max_steps: steps,
            ..StopRule::default()
        };
        let tr = run_mob(&env, 1, Scheduling::Minimum, &rule)?;
        Ok((0..=j_max as i64 + 1)
            .map(|x| tr.min_hit.get(x))
            .collect::<Vec<_>>())
    })?;
    let mut out = Vec::with_capacity(j_max + 1);
    let mut partial = 0.0;
    for j in 0..=j_max {
        let mut n = 0u64;
        let mut yes = 0u64;
        for h in &hits {
            if let (Some(a), Some(b)) = (h[j], h[j + 1]) {
                n += 1;
                yes += u64::from(b - a > j as u64);
            }
        }
        let term = if n > 0 {
            yes as f64 / n as f64
        } else {
            f64::NAN
        };
        partial += term;
        // Replica-level sums over the terms so far, complete replicas only.
        let sums: Vec<f64> = hits
            .iter()
            .filter(|h| h[..=j + 1].iter().all(Option::is_some))
            .map(|h| {
                (0..=j)
                    .filter(|&i| h[i + 1].unwrap() - h[i].unwrap() > i as u64)
                    .count() as f64
            })
            .collect();
        out.push(UPlusPoint {
            j,
            term,
            partial,
            stderr: mean_se(&sums).1,
            used: n,
            censored: reps - n,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseBudget {
    pub reps: u64,
    pub sites: usize,
    pub speed_reps: u64,
    pub steps: u64,
}

impl Default for PhaseBudget {
    fn default() -> Self {
        PhaseBudget {
            reps: 2_000,
            sites: 2_000,
            speed_reps: 20,
            steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub k: usize,
    pub theory_transient: bool,
    /// `None` when inconclusive.
    pub emp_transient: Option<bool>,
    pub theory_ballistic: bool,
    pub emp_ballistic: Option<bool>,
    pub survival: f64,
    pub survival_se: f64,
    pub speed: f64,
    pub speed_se: f64,
    /// The same estimator at half the step budget.
    pub speed_half_horizon: f64,
    pub flags: Vec<String>,
}

/// Relative drop of a speed estimate under horizon doubling beyond which a
/// positive estimate is treated as finite-horizon bias.
const HORIZON_DROP: f64 = 0.1;

/// Theory labels (`k < delta` transient, `k < delta - 1` ballistic) next to
/// empirical ones from the survival and k-min speed estimators.
pub fn phase_classify(
    spec: &CookieSpec,
    k_max: usize,
    budget: &PhaseBudget,
    seed: u64,
) -> Result<Vec<PhaseRow>> {
    let delta = spec.delta();
    let table = transience_table(spec, k_max, budget.reps, budget.sites, seed)?;
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let surv = &table.reports[k - 1];
        let speed_at = |steps| -> Result<(f64, f64)> {
            let r = estimate_speed_min(spec, k, budget.speed_reps, steps, seed)?.ratio;
            Ok(if r.estimate.is_nan() {
                (0.0, 0.0)
            } else {
                (r.estimate, r.stderr)
            })
        };
        let (speed_v, speed_se) = speed_at(budget.steps)?;
        // Both estimates use the same environments and the full run extends
        // the half run, so their difference is less noisy than either one.
        let (half_v, _) = speed_at(budget.steps / 2)?;
        let drop = half_v - speed_v;
        let decreasing = drop > 2.0 * speed_se && drop > HORIZON_DROP * speed_v.abs();
        let alive = (surv.estimate * surv.used as f64).round() as u64;
        let (wlo, _) = wilson(alive, surv.used, 1.96);
        let emp_transient = if wlo > 0.01 {
            Some(true)
        } else if surv.estimate <= 0.02 {
            Some(false)
        } else {
            None
        };
        let emp_ballistic = if emp_transient == Some(false) || speed_v.abs() <= 0.02 {
            Some(false)
        } else if speed_v - 3.0 * speed_se > 0.0 && !decreasing {
            Some(true)
        } else {
            None
        };
        let theory_transient = (k as f64) < delta;
        let theory_ballistic = (k as f64) < delta - 1.0;
        let mut flags = threshold_flags(delta, k);
        if decreasing {
            flags.push("speed decreasing with horizon".to_string());
        }
        if emp_transient.is_some_and(|e| e != theory_transient)
            || emp_ballistic.is_some_and(|e| e != theory_ballistic)
        {
            flags.push("mismatch".to_string());
        }
        if emp_transient.is_none() || emp_ballistic.is_none() {
            flags.push("inconclusive".to_string());
        }
        rows.push(PhaseRow {
            k,
            theory_transient,
            emp_transient,
            theory_ballistic,
            emp_ballistic,
            survival: surv.estimate,
            survival_se: surv.stderr,
            speed: speed_v,
            speed_se,
            speed_half_horizon: half_v,
            flags,
        });
    }
    Ok(rows)
}
