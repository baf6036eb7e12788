use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{cookie_row_arrow, cookie_row_scan, Arrow, EnvSpec, RowScan, ARROW_LANE};
use crate::error::{Error, Result};
use crate::rng;

pub(crate) const DEFAULT_EXTENT: i64 = 1 << 20;

const GAP_LANE_RIGHT: u64 = 2;
const GAP_LANE_LEFT: u64 = 3;

/// Law of the distance between consecutive walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapLaw {
    Constant(u64),
    /// `ceil(U^(-1/alpha))` for uniform `U`; finite mean and infinite
    /// variance for `alpha` in `(1, 2]`.
    Pareto {
        alpha: f64,
    },
}

impl GapLaw {
    fn validate(&self) -> Result<()> {
        match self {
            GapLaw::Constant(0) => Err(Error::InvalidParameter("gap must be >= 1".into())),
            GapLaw::Constant(_) => Ok(()),
            GapLaw::Pareto { alpha } if *alpha > 1.0 && *alpha <= 2.0 => Ok(()),
            GapLaw::Pareto { alpha } => Err(Error::InvalidParameter(format!(
                "Pareto index {alpha} must lie in (1, 2]"
            ))),
        }
    }

    fn draw(&self, h: u64) -> i64 {
        match self {
            GapLaw::Constant(g) => *g as i64,
            GapLaw::Pareto { alpha } => {
                let u = ((h >> 11) + 1) as f64 / (1u64 << 53) as f64;
                let g = u.powf(-1.0 / alpha).ceil();
                if g >= 1e15 {
                    1_000_000_000_000_000
                } else {
                    g as i64
                }
            }
        }
    }
}

/// Stacks of `height` cookies of strength `wall_p` at the points of a
/// two-sided renewal process anchored at 0, fair coins elsewhere. Walls are
/// laid out on `[-extent, extent]`; outside that range every site is fair.
#[derive(Debug, Clone, PartialEq)]
pub struct WallsEnv {
    seed: u64,
    gap: GapLaw,
    height: u32,
    wall_p: f64,
    extent: i64,
    lane: u64,
    thresholds: Vec<u64>,
    bits: Arc<Vec<u64>>,
}

impl WallsEnv {
    pub fn new(seed: u64, gap: GapLaw, height: u32, wall_p: f64, extent: i64) -> Result<Self> {
        gap.validate()?;
        if !(wall_p > 0.5 && wall_p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "wall strength {wall_p} must lie in (1/2, 1)"
            )));
        }
        if extent < 1 {
            return Err(Error::InvalidParameter("extent must be positive".into()));
        }
        let width = (2 * extent + 1) as usize;
        let mut bits = vec![0u64; width.div_ceil(64)];
        let mut mark = |x: i64| {
            let i = (x + extent) as usize;
            bits[i >> 6] |= 1 << (i & 63);
        };
        mark(0);
        for (lane, dir) in [(GAP_LANE_RIGHT, 1i64), (GAP_LANE_LEFT, -1)] {
            let key = rng::lane_key(seed, lane);
            let mut pos = 0i64;
            let mut n = 0u64;
            loop {
                pos = pos.saturating_add(dir * gap.draw(rng::stream(key, n)));
                n += 1;
                if pos.abs() > extent {
                    break;
                }
                mark(pos);
            }
        }
        Ok(Self {
            seed,
            gap,
            height,
            wall_p,
            extent,
            lane: rng::lane_key(seed, ARROW_LANE),
            thresholds: vec![rng::threshold(wall_p); height as usize],
            bits: Arc::new(bits),
        })
    }

    pub fn is_wall(&self, x: i64) -> bool {
        if x.abs() > self.extent {
            return false;
        }
        let i = (x + self.extent) as usize;
        (self.bits[i >> 6] >> (i & 63)) & 1 == 1
    }

    fn thr(&self, x: i64) -> &[u64] {
        if self.is_wall(x) {
            &self.thresholds
        } else {
            &[]
        }
    }

    #[inline]
    pub(crate) fn arrow(&self, x: i64, i: u64) -> Arrow {
        cookie_row_arrow(self.lane, self.thr(x), x, i)
    }

    pub(crate) fn scan(
        &self,
        x: i64,
        start: u64,
        need: u64,
        counted: Arrow,
        cap: u64,
    ) -> Result<RowScan> {
        cookie_row_scan(self.lane, self.thr(x), x, start, need, counted, cap)
    }

    pub(crate) fn to_spec(&self) -> EnvSpec {
        EnvSpec::Walls {
            seed: self.seed,
            gap: self.gap.clone(),
            height: self.height,
            wall_p: self.wall_p,
            extent: Some(self.extent),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ArrowEnvironment, CookieSpec};

    #[test]
    fn height_zero_is_fair() {
        let a = ArrowEnvironment::Walls(
            WallsEnv::new(5, GapLaw::Pareto { alpha: 1.5 }, 0, 0.9, 1000).unwrap(),
        );
        let b =
            ArrowEnvironment::Walls(WallsEnv::new(5, GapLaw::Constant(1), 0, 0.6, 1000).unwrap());
        let mut rights = 0;
        for x in -50..50 {
            for i in 1..41 {
                assert_eq!(a.arrow_at(x, i), b.arrow_at(x, i));
                rights += (a.arrow_at(x, i) == Arrow::Right) as u32;
            }
        }
        // 4000 fair coins.
        assert!((1800..2200).contains(&rights));
    }

    #[test]
    fn unit_gaps_reproduce_sampled() {
        let w = WallsEnv::new(11, GapLaw::Constant(1), 3, 0.8, 500).unwrap();
        let env = ArrowEnvironment::Walls(w);
        let s = ArrowEnvironment::sampled(CookieSpec::homogeneous(3, 0.8).unwrap(), 11);
        for x in -400..400 {
            for i in 1..80 {
                assert_eq!(env.arrow_at(x, i), s.arrow_at(x, i));
            }
        }
    }

    #[test]
    fn anchored_at_zero_and_validated() {
        let w = WallsEnv::new(1, GapLaw::Constant(4), 2, 0.7, 100).unwrap();
        assert!(w.is_wall(0) && w.is_wall(8) && w.is_wall(-12) && !w.is_wall(3));
        assert!(WallsEnv::new(1, GapLaw::Pareto { alpha: 2.5 }, 2, 0.7, 100).is_err());
        assert!(WallsEnv::new(1, GapLaw::Constant(1), 2, 0.4, 100).is_err());
    }
}
