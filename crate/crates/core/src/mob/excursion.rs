use serde::{Deserialize, Serialize};

use super::MobTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// Starts at 0, ends before the next visit to 1.
    Left,
    /// Starts at 1, ends before the next visit to 0.
    Right,
}

/// Part of the path over the time range `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub index: usize,
    pub start: u64,
    pub end: u64,
    pub positions: Vec<i64>,
}

/// `L_0 R_1 L_1 ... L_{I-1} R_I` for a walk from 0, with the path predicted
/// for the same walk started from 1: `R_1 L_0 R_2 L_1 ... L_{I-2} R_I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excursions {
    pub segments: Vec<Segment>,
    /// Number of right excursions `I`.
    pub right_count: usize,
    pub predicted_from_one: Vec<i64>,
    /// The left excursion the walk from 1 never makes.
    pub dropped: Segment,
}

impl Excursions {
    /// Concatenated segment positions; equals the recorded path.
    pub fn reassemble(&self) -> Vec<i64> {
        self.segments
            .iter()
            .flat_map(|s| s.positions.iter().copied())
            .collect()
    }
}

/// Path `X_0, X_1, ...` of a single-walker trace with recorded steps.
pub fn trace_path(trace: &MobTrace) -> Result<Vec<i64>> {
    if trace.k != 1 {
        return Err(Error::Precondition(
            "a single-walker trace is required".into(),
        ));
    }
    let steps = trace
        .steps
        .as_ref()
        .ok_or_else(|| Error::Precondition("the trace has no recorded steps".into()))?;
    let mut path = Vec::with_capacity(steps.len() + 1);
    path.push(trace.starts[0]);
    path.extend(steps.iter().map(|s| s.to));
    Ok(path)
}

/// Splits a right-transient walk from 0 into alternating excursions.
pub fn excursion_decompose(trace: &MobTrace) -> Result<Excursions> {
    if !trace.censor.is_complete() {
        return Err(Error::Censored(format!(
            "cannot decompose a censored trace ({:?})",
            trace.censor
        )));
    }
    if trace.starts != [0] {
        return Err(Error::Precondition("the walk must start at 0".into()));
    }
    let path = trace_path(trace)?;
    let n = path.len() as u64;
    let mut segments = Vec::new();
    let mut t = 0u64;
    let mut i = 0usize;
    loop {
        // Left excursion L_i from time t (at 0) until the next visit to 1.
        let r = (t..n).find(|&s| path[s as usize] == 1);
        let Some(r) = r else {
            return Err(Error::Precondition(
                "the walk never reaches 1 within the trace".into(),
            ));
        };
        segments.push(Segment {
            kind: SegmentKind::Left,
            index: i,
            start: t,
            end: r,
            positions: path[t as usize..r as usize].to_vec(),
        });
        let l = (r..n).find(|&s| path[s as usize] == 0).unwrap_or(n);
        segments.push(Segment {
            kind: SegmentKind::Right,
            index: i + 1,
            start: r,
            end: l,
            positions: path[r as usize..l as usize].to_vec(),
        });
        if l == n {
            break;
        }
        t = l;
        i += 1;
    }
    let right_count = i + 1;
    let lefts: Vec<&Segment> = segments
        .iter()
        .filter(|s| s.kind == SegmentKind::Left)
        .collect();
    let rights: Vec<&Segment> = segments
        .iter()
        .filter(|s| s.kind == SegmentKind::Right)
        .collect();
    let mut predicted = Vec::new();
    for j in 0..right_count {
        predicted.extend_from_slice(&rights[j].positions);
        if j + 1 < right_count {
            predicted.extend_from_slice(&lefts[j].positions);
        }
    }
    let dropped = lefts[right_count - 1].clone();
    Ok(Excursions {
        segments,
        right_count,
        predicted_from_one: predicted,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ArrowEnvironment, FiniteEnv};
    use crate::mob::{run_single, StopRule};

    fn rule() -> StopRule {
        StopRule {
            record_steps: true,
            ..StopRule::default()
        }
    }

    #[test]
    fn all_right_has_one_right_excursion() {
        let env = ArrowEnvironment::finite(FiniteEnv::all_right(0, 5, 2));
        let tr = run_single(&env, 0, &rule()).unwrap();
        let ex = excursion_decompose(&tr).unwrap();
        assert_eq!(ex.right_count, 1);
        assert_eq!(ex.segments[0].positions, vec![0]);
        assert_eq!(ex.reassemble(), trace_path(&tr).unwrap());
    }

    #[test]
    fn dip_then_escape() {
        // 0 -> -1 -> 0 -> 1 -> ...
        let env = ArrowEnvironment::finite(FiniteEnv::from_strings(0, 1, &["L"]).unwrap());
        let tr = run_single(&env, 0, &rule()).unwrap();
        let ex = excursion_decompose(&tr).unwrap();
        assert_eq!(ex.segments[0].positions, vec![0, -1, 0]);
        assert_eq!(ex.segments[1].kind, SegmentKind::Right);
        assert_eq!(ex.dropped.positions, vec![0, -1, 0]);
        let from_one = run_single(&env, 1, &rule()).unwrap();
        assert_eq!(trace_path(&from_one).unwrap(), ex.predicted_from_one);
    }

    #[test]
    fn multiple_excursions_shift() {
        let env = ArrowEnvironment::finite(
            FiniteEnv::from_strings(-1, 3, &["L", "LRL", "LL", "RL"]).unwrap(),
        );
        let tr = run_single(&env, 0, &rule()).unwrap();
        let ex = excursion_decompose(&tr).unwrap();
        assert_eq!(ex.reassemble(), trace_path(&tr).unwrap());
        let from_one = run_single(&env, 1, &rule()).unwrap();
        assert_eq!(trace_path(&from_one).unwrap(), ex.predicted_from_one);
        assert!(ex.right_count >= 2);
    }
}
