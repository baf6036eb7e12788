use super::{run_single, StopRule};
use crate::env::ArrowEnvironment;
use crate::error::{Error, Result};

/// Exit function of one stage walk: `g(x)` is the first time after which
/// the walk stays at distance more than `x` from its start.
struct ExitFn {
    /// `last[d]`: last recorded time at distance exactly `d`.
    prefix_last: Vec<Option<u64>>,
    /// Time and offset from the start when the walk passed the table; it
    /// moves right by one per step afterwards.
    t_end: u64,
    d_end: i64,
}

impl ExitFn {
    fn new(path: &[i64], start: i64) -> Self {
        let dmax = path
            .iter()
            .map(|p| (p - start).unsigned_abs())
            .max()
            .unwrap_or(0) as usize;
        let mut last = vec![None; dmax + 1];
        for (t, p) in path.iter().enumerate() {
            last[(p - start).unsigned_abs() as usize] = Some(t as u64);
        }
        let mut best = None;
        for v in last.iter_mut() {
            best = best.max(*v);
            *v = best;
        }
        let t_end = path.len() as u64 - 1;
        Self {
            prefix_last: last,
            t_end,
            d_end: path[path.len() - 1] - start,
        }
    }

    fn eval(&self, x: u64) -> u64 {
        let recorded = self
            .prefix_last
            .get(x as usize)
            .or(self.prefix_last.last())
            .copied()
            .flatten();
        // After the table the walk sits at offset d_end + u at time t_end + u.
        let analytic = if self.d_end <= x as i64 {
            Some(self.t_end + (x as i64 - self.d_end) as u64)
        } else {
            None
        };
        match recorded.max(analytic) {
            Some(t) => t + 1,
            None => 0,
        }
    }
}

/// Blocks `B_n`: `f_i(n) - f_i(n-1)` moves of particle `i` for each `i` in
/// order, with `f_i = g_i o ... o g_k` and `g_k` the identity.
pub(crate) struct BlockSchedule {
    exits: Vec<ExitFn>,
    n: u64,
    prev: Vec<u64>,
    cur: Vec<u64>,
    i: usize,
    left: u64,
}

impl BlockSchedule {
    pub fn new(env: &ArrowEnvironment, starts: &[i64]) -> Result<Self> {
        if env.as_finite().is_none() {
            return Err(Error::Unsupported(
                "sequential blocks need a finite environment".into(),
            ));
        }
        let s = starts[0];
        if starts.iter().any(|&x| x != s) {
            return Err(Error::Unsupported(
                "sequential blocks need a common start".into(),
            ));
        }
        let k = starts.len();
        let rule = StopRule {
            record_steps: true,
            max_steps: u64::MAX,
            ..StopRule::default()
        };
        let mut cur = env.clone();
        let mut exits = Vec::with_capacity(k.saturating_sub(1));
        for _ in 0..k.saturating_sub(1) {
            let tr = run_single(&cur, s, &rule)?;
            let mut path = vec![s];
            path.extend(tr.steps.as_ref().expect("recorded").iter().map(|st| st.to));
            exits.push(ExitFn::new(&path, s));
            cur = cur.leftover(&tr.local_time);
        }
        let mut b = Self {
            exits,
            n: 0,
            prev: vec![0; k],
            cur: vec![0; k],
            i: k,
            left: 0,
        };
        b.open_block();
        Ok(b)
    }

    fn f(&self, i: usize, n: u64) -> u64 {
        let mut v = n;
        for g in self.exits[i..].iter().rev() {
            v = g.eval(v);
        }
        v
    }

    fn open_block(&mut self) {
        self.n += 1;
        let k = self.cur.len();
        std::mem::swap(&mut self.prev, &mut self.cur);
        for i in 0..k {
            self.cur[i] = self.f(i, self.n);
        }
        if self.n == 1 {
            self.prev.iter_mut().for_each(|v| *v = 0);
        }
        self.i = 0;
        self.left = self.cur[0] - self.prev[0];
    }

    pub fn next(&mut self) -> usize {
        loop {
            if self.left > 0 {
                self.left -= 1;
                return self.i;
            }
            self.i += 1;
            if self.i == self.cur.len() {
                self.open_block();
            } else {
                self.left = self.cur[self.i] - self.prev[self.i];
            }
        }
    }
}
