use serde::{Deserialize, Serialize};

use super::MobTrace;

/// Stretch between consecutive regeneration positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub dr: u64,
    pub dtau: u64,
    /// `d[n-1]` = left jumps from `r_{i+1} - n`, `n = 1..dr-1`.
    pub d: Vec<u64>,
}

impl Block {
    pub fn d_sum(&self) -> u64 {
        self.d.iter().sum()
    }

    /// `dtau - k dr - 2 sum D`; zero for the minimum scheduling.
    pub fn step_defect(&self, k: usize) -> i128 {
        self.dtau as i128 - (k as i128) * self.dr as i128 - 2 * self.d_sum() as i128
    }

    /// `2 sum D <= dtau <= k + (2 + k) sum D`.
    pub fn sandwich_holds(&self, k: usize) -> bool {
        let s = self.d_sum() as u128;
        let t = self.dtau as u128;
        2 * s <= t && t <= k as u128 + (2 + k as u128) * s
    }
}

/// Nonnegative regeneration positions of a minimum-scheduled trace with
/// their hitting times and the downcrossing counts between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegenerationRecord {
    pub positions: Vec<i64>,
    pub times: Vec<u64>,
    pub blocks: Vec<Block>,
    /// Largest site whose status is known.
    pub certified_upto: Option<i64>,
    /// No position could be certified.
    pub censored: bool,
}

/// Visited sites `r >= 0` inside the certified region with no left jump;
/// `tau_i` is the first time the minimum position reaches `r_i`.
pub fn regenerations(trace: &MobTrace) -> RegenerationRecord {
    let upto = trace
        .censor
        .certified_upto()
        .map(|u| u.min(trace.final_min));
    let mut rec = RegenerationRecord {
        positions: Vec::new(),
        times: Vec::new(),
        blocks: Vec::new(),
        certified_upto: upto,
        censored: true,
    };
    let Some(upto) = upto else {
        return rec;
    };
    for r in 0..=upto {
        if trace.lefts.get(r) == 0 && trace.local_time.get(r) > 0 {
            if let Some(t) = trace.min_hit.get(r) {
                rec.positions.push(r);
                rec.times.push(t);
            }
        }
    }
    for w in 0..rec.positions.len().saturating_sub(1) {
        let (a, b) = (rec.positions[w], rec.positions[w + 1]);
        let dr = (b - a) as u64;
        rec.blocks.push(Block {
            dr,
            dtau: rec.times[w + 1] - rec.times[w],
            d: (1..dr as i64).map(|n| trace.lefts.get(b - n)).collect(),
        });
    }
    rec.censored = rec.positions.is_empty();
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ArrowEnvironment, FiniteEnv};
    use crate::mob::{run_mob, run_single, Scheduling, StopRule};

    #[test]
    fn all_right_blocks() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 30, 1));
        for k in 1..4 {
            let tr = run_mob(&env, k, Scheduling::Minimum, &StopRule::default()).unwrap();
            let rec = regenerations(&tr);
            assert_eq!(rec.positions[0], 0);
            assert!(rec.positions.len() > 25);
            for b in &rec.blocks {
                assert_eq!((b.dr, b.dtau, b.d_sum()), (1, k as u64, 0));
            }
        }
    }

    #[test]
    fn single_left_pocket() {
        // Left arrow at (2, 1): 0 -> 1 -> 2 -> 1 -> 2 -> 3 ...
        let env = ArrowEnvironment::finite(FiniteEnv::from_strings(2, 1, &["L"]).unwrap());
        let tr = run_single(&env, 0, &StopRule::default()).unwrap();
        let rec = regenerations(&tr);
        assert_eq!(&rec.positions[..3], &[0, 1, 3]);
        assert_eq!(&rec.times[..3], &[0, 1, 5]);
        assert_eq!(
            rec.blocks[1],
            Block {
                dr: 2,
                dtau: 4,
                d: vec![1]
            }
        );
        assert_eq!(rec.blocks[1].step_defect(1), 0);
    }
}
