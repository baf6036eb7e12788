//! Deliberately naive reference implementations used as test oracles.
//! Environments are closures `arrow(x, i) -> bool` (true = Right, `i >= 1`).

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NaiveRun {
    /// Departures per site.
    pub local_time: BTreeMap<i64, u64>,
    /// Left jumps per site.
    pub lefts: BTreeMap<i64, u64>,
    pub final_positions: Vec<i64>,
    /// Minimum position after each step, starting with the initial one.
    pub min_series: Vec<i64>,
    pub steps: u64,
    /// Every particle ended strictly right of the escape site.
    pub escaped: bool,
}

impl NaiveRun {
    pub fn local(&self, x: i64) -> u64 {
        self.local_time.get(&x).copied().unwrap_or(0)
    }

    pub fn left(&self, x: i64) -> u64 {
        self.lefts.get(&x).copied().unwrap_or(0)
    }
}

/// Minimum scheduling, lowest index on ties. A particle is retired once it
/// is strictly right of `escape_at`; counts at sites `<= escape_at` are then
/// final when the environment is all `Right` beyond `escape_at`.
pub fn naive_mob_min(
    arrow: impl Fn(i64, u64) -> bool,
    starts: &[i64],
    escape_at: i64,
    max_steps: u64,
) -> NaiveRun {
    let mut run = NaiveRun {
        final_positions: starts.to_vec(),
        ..NaiveRun::default()
    };
    let pos = &mut run.final_positions;
    run.min_series.push(*pos.iter().min().unwrap());
    while run.steps < max_steps {
        let mut pick: Option<usize> = None;
        for (j, &p) in pos.iter().enumerate() {
            if p > escape_at {
                continue;
            }
            if pick.is_none_or(|q| p < pos[q]) {
                pick = Some(j);
            }
        }
        let Some(j) = pick else {
            run.escaped = true;
            break;
        };
        let x = pos[j];
        let n = run.local_time.entry(x).or_insert(0);
        *n += 1;
        if arrow(x, *n) {
            pos[j] = x + 1;
        } else {
            *run.lefts.entry(x).or_insert(0) += 1;
            pos[j] = x - 1;
        }
        run.steps += 1;
        run.min_series.push(*pos.iter().min().unwrap());
    }
    if !run.escaped {
        run.escaped = pos.iter().all(|&p| p > escape_at);
    }
    run
}

pub fn naive_single(
    arrow: impl Fn(i64, u64) -> bool,
    start: i64,
    escape_at: i64,
    max_steps: u64,
) -> NaiveRun {
    naive_mob_min(arrow, &[start], escape_at, max_steps)
}

/// Walker `j` runs alone on the arrows left over by walkers `1..j`.
pub fn naive_sequential(
    arrow: impl Fn(i64, u64) -> bool,
    starts: &[i64],
    escape_at: i64,
    max_steps: u64,
) -> Vec<NaiveRun> {
    let mut used: BTreeMap<i64, u64> = BTreeMap::new();
    let mut out = Vec::new();
    for &s in starts {
        let shift = used.clone();
        let run = naive_single(
            |x, i| arrow(x, i + shift.get(&x).copied().unwrap_or(0)),
            s,
            escape_at,
            max_steps,
        );
        for (x, n) in &run.local_time {
            *used.entry(*x).or_insert(0) += n;
        }
        out.push(run);
    }
    out
}

/// Summed local time of a sequential run.
pub fn total_local_time(runs: &[NaiveRun]) -> BTreeMap<i64, u64> {
    let mut total = BTreeMap::new();
    for r in runs {
        for (x, n) in &r.local_time {
            *total.entry(*x).or_insert(0) += n;
        }
    }
    total
}

/// `z_0 = k`; `z_{n+1}` = Rights in row `n` before its `(z_n - k + 1)`-th
/// Left, zero once `z_n < k`. `None` marks a row without enough Lefts in
/// its first `depth` arrows.
pub fn naive_z(
    arrow: impl Fn(i64, u64) -> bool,
    k: u64,
    sites: usize,
    depth: u64,
) -> Vec<Option<u64>> {
    let mut z = vec![Some(k)];
    for n in 0..sites {
        let next = match z[n] {
            None => None,
            Some(v) if v < k => Some(0),
            Some(v) => {
                let need = v - k + 1;
                let mut seen = 0;
                let mut rights = 0;
                let mut out = None;
                for i in 1..=depth {
                    if arrow(n as i64, i) {
                        rights += 1;
                    } else {
                        seen += 1;
                        if seen == need {
                            out = Some(rights);
                            break;
                        }
                    }
                }
                out
            }
        };
        z.push(next);
    }
    z
}

/// A table environment: `rows[x - lo]` as a string of `L`/`R`, `Right`
/// everywhere else.
pub fn table(lo: i64, rows: &[&str]) -> impl Fn(i64, u64) -> bool + Clone {
    let rows: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| r.chars().map(|c| c == 'R').collect())
        .collect();
    move |x, i| {
        let idx = x - lo;
        if idx < 0 || idx as usize >= rows.len() {
            return true;
        }
        rows[idx as usize]
            .get((i - 1) as usize)
            .copied()
            .unwrap_or(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pocket() {
        let env = table(2, &["L"]);
        let r = naive_single(&env, 0, 2, 100);
        assert!(r.escaped);
        assert_eq!(r.local(1), 2);
        assert_eq!(r.local(2), 2);
        assert_eq!(r.left(2), 1);
    }

    #[test]
    fn sequential_sum_equals_mob() {
        let env = table(-1, &["LR", "RLL", "LRL", "R"]);
        let mob = naive_mob_min(&env, &[0, 0], 2, 1000);
        let seq = naive_sequential(&env, &[0, 0], 2, 1000);
        let total = total_local_time(&seq);
        for x in -3..=2 {
            assert_eq!(mob.local(x), total.get(&x).copied().unwrap_or(0));
        }
    }
}
