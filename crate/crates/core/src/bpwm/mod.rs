//! Branching processes with migration
//! `Y_{n+1} = sum_{i=1}^{Y_n+N-M} xi_i + eta_{(Y_n+N) ^ M}`, where the `xi`
//! are Geometric(1/2) on `{0, 1, ...}` and `eta_j` follows `f_j` or `g_j`.
//! Empty sums and `eta_j` with `j <= 0` are zero.

mod coupling;
mod pmf;

pub use coupling::{
    coupling_test_downcrossings, coupling_test_z, DowncrossingFit, DowncrossingReport,
    ZCouplingReport,
};
pub use pmf::{
    count_pmf, gamma, gamma_checked, gamma_prime, offspring_pmf, offspring_pmf_exact, pmf_f, pmf_g,
    row_count_pmf, stochastic_order_holds, OffspringPmf, Prob, DEFAULT_R_MAX, EXACT_M_MAX,
};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::CookieSpec;
use crate::error::{Error, Result};
use crate::rng::{ones_before_nth_zero, replica_seed, BitScan};

/// Offspring family: `f_j` counts Rights before `j` Lefts, `g_j` Lefts
/// before `j` Rights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Forward,
    Reverse,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" | "f" => Ok(Family::Forward),
            "reverse" | "g" => Ok(Family::Reverse),
            _ => Err(Error::InvalidParameter(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpwmConfig {
    pub spec: CookieSpec,
    #[serde(rename = "N")]
    pub n_migration: i64,
    pub y: u64,
    pub family: Family,
}

impl BpwmConfig {
    pub fn new(spec: CookieSpec, n_migration: i64, y: u64, family: Family) -> Self {
        BpwmConfig {
            spec,
            n_migration,
            y,
            family,
        }
    }

    /// The parameters under which the z-process of the k-minimum walk is a
    /// BPwM: `N = -(k-1)`, `y = k`, Forward family.
    pub fn z_coupling(spec: CookieSpec, k: usize) -> Self {
        BpwmConfig::new(spec, 1 - k as i64, k as u64, Family::Forward)
    }

    pub fn m(&self) -> usize {
        self.spec.m()
    }

    fn gamma(&self) -> f64 {
        match self.family {
            Family::Forward => gamma(&self.spec),
            Family::Reverse => gamma_prime(&self.spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub gamma: f64,
    /// `gamma - M + N`.
    pub criterion: f64,
    pub dies_out: bool,
    pub progeny_mean_finite: bool,
    /// The criterion is within 1e-12 of 1.
    pub boundary_extinction: bool,
    /// The criterion is within 1e-12 of -1.
    pub boundary_progeny: bool,
}

/// Dies out a.s. iff `gamma - M + N <= 1`; finite mean progeny iff
/// `gamma - M + N < -1`.
pub fn classify(config: &BpwmConfig) -> Classification {
    let gamma = config.gamma();
    let criterion = gamma - config.m() as f64 + config.n_migration as f64;
    Classification {
        gamma,
        criterion,
        dies_out: criterion <= 1.0,
        progeny_mean_finite: criterion < -1.0,
        boundary_extinction: (criterion - 1.0).abs() < 1e-12,
        boundary_progeny: (criterion + 1.0).abs() < 1e-12,
    }
}

/// Inverse-CDF tables for `eta_1..eta_M`.
#[derive(Debug, Clone)]
pub struct BpwmSampler {
    config: BpwmConfig,
    cdfs: Vec<Vec<f64>>,
}

impl BpwmSampler {
    pub fn new(config: BpwmConfig) -> Result<Self> {
        let cdfs = (1..=config.m())
            .map(|j| Ok(offspring_pmf(&config.spec, config.family, j, DEFAULT_R_MAX)?.cdf()))
            .collect::<Result<Vec<_>>>()?;
        Ok(BpwmSampler { config, cdfs })
    }

    pub fn config(&self) -> &BpwmConfig {
        &self.config
    }

    fn eta(&self, j: usize, rng: &mut impl Rng) -> u64 {
        let u: f64 = rng.random();
        let cdf = &self.cdfs[j - 1];
        cdf.partition_point(|c| *c <= u).min(cdf.len()) as u64
    }

    /// One generation from `y`.
    pub fn step(&self, y: u64, rng: &mut ChaCha8Rng) -> u64 {
        let j = y as i64 + self.config.n_migration;
        if j <= 0 {
            return 0;
        }
        let m = self.config.m() as i64;
        let mut next = self.eta(j.min(m) as usize, rng);
        if j > m {
            match ones_before_nth_zero(|| rng.next_u64(), (j - m) as u64, 0, u64::MAX) {
                BitScan::Found { ones, .. } => next += ones,
                BitScan::Capped { .. } => unreachable!("uncapped scan"),
            }
        }
        next
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpwmRun {
    pub trajectory: Vec<u64>,
    /// Hitting time of 0.
    pub absorbed_at: Option<usize>,
    /// `sum_{n <= tau} Y_n` when absorbed within the horizon.
    pub progeny: Option<u64>,
}

impl BpwmRun {
    pub fn absorbed(&self) -> bool {
        self.absorbed_at.is_some()
    }
}

pub fn simulate_with(sampler: &BpwmSampler, horizon: usize, rng: &mut ChaCha8Rng) -> BpwmRun {
    let mut y = sampler.config.y;
    let mut trajectory = vec![y];
    let mut absorbed_at = (y == 0).then_some(0);
    for n in 0..horizon {
        if absorbed_at.is_some() {
            break;
        }
        y = sampler.step(y, rng);
        trajectory.push(y);
        if y == 0 {
            absorbed_at = Some(n + 1);
        }
    }
    let progeny = absorbed_at.map(|_| trajectory.iter().sum());
    BpwmRun {
        trajectory,
        absorbed_at,
        progeny,
    }
}

pub fn simulate_bpwm(config: &BpwmConfig, horizon: usize, rng_seed: u64) -> Result<BpwmRun> {
    let sampler = BpwmSampler::new(config.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(simulate_with(&sampler, horizon, &mut rng))
}

/// An excursion from 0: at least one generation, stopped at the first
/// return to 0. Returns `(length, progeny)`, or `None` if still positive
/// after `horizon` generations.
pub fn excursion_from_zero(
    sampler: &BpwmSampler,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(u64, u64)> {
    let mut y = 0;
    let mut progeny = 0;
    for n in 1..=horizon {
        y = sampler.step(y, rng);
        progeny += y;
        if y == 0 {
            return Some((n as u64, progeny));
        }
    }
    None
}

/// Fraction of `reps` replicas still alive after `horizon` generations.
pub fn survival_frequency(
    config: &BpwmConfig,
    horizon: usize,
    reps: u64,
    seed: u64,
) -> Result<f64> {
    let sampler = BpwmSampler::new(config.clone())?;
    let alive = (0..reps)
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, i));
            !simulate_with(&sampler, horizon, &mut rng).absorbed()
        })
        .count();
    Ok(alive as f64 / reps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec48() -> CookieSpec {
        CookieSpec::homogeneous(4, 0.8).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = classify(&BpwmConfig::new(spec48(), 0, 1, Family::Forward));
        assert!((c.criterion - 2.4).abs() < 1e-12);
        assert!(!c.dies_out);
        let c = classify(&BpwmConfig::new(spec48(), -2, 3, Family::Forward));
        assert!((c.criterion - 0.4).abs() < 1e-12);
        assert!(c.dies_out);
        let s = CookieSpec::homogeneous(5, 0.85).unwrap();
        let c = classify(&BpwmConfig::new(s, 6, 0, Family::Reverse));
        assert!((c.criterion - 2.5).abs() < 1e-12);
        assert!(!c.progeny_mean_finite);
    }

    #[test]
    fn boundary_flag() {
        let s = CookieSpec::new(vec![0.75, 0.75]).unwrap();
        // delta = 1, gamma = 3, criterion with N = 0 is 1.
        let c = classify(&BpwmConfig::new(s, 0, 1, Family::Forward));
        assert!(c.boundary_extinction && c.dies_out);
    }

    #[test]
    fn zero_start_is_absorbed() {
        let run = simulate_bpwm(&BpwmConfig::new(spec48(), 0, 0, Family::Forward), 10, 1).unwrap();
        assert_eq!(run.absorbed_at, Some(0));
        assert_eq!(run.progeny, Some(0));
        assert_eq!(run.trajectory, vec![0]);
    }

    #[test]
    fn nonpositive_offspring_index_gives_zero() {
        let cfg = BpwmConfig::new(spec48(), -5, 3, Family::Forward);
        let run = simulate_bpwm(&cfg, 10, 7).unwrap();
        assert_eq!(run.trajectory, vec![3, 0]);
        assert_eq!(run.progeny, Some(3));
    }

    #[test]
    fn replay() {
        let cfg = BpwmConfig::z_coupling(spec48(), 2);
        assert_eq!(
            simulate_bpwm(&cfg, 50, 9).unwrap(),
            simulate_bpwm(&cfg, 50, 9).unwrap()
        );
    }

    #[test]
    fn survival_positive_and_stable() {
        let cfg = BpwmConfig::new(spec48(), 0, 1, Family::Forward);
        let a = survival_frequency(&cfg, 300, 2000, 1).unwrap();
        let b = survival_frequency(&cfg, 300, 2000, 2).unwrap();
        assert!(a > 0.1 && b > 0.1);
        assert!((a - b).abs() < 0.06);
    }

    #[test]
    fn one_generation_matches_pmf() {
        let s = CookieSpec::new(vec![0.7]).unwrap();
        let sampler = BpwmSampler::new(BpwmConfig::z_coupling(s.clone(), 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40_000;
        let zeros = (0..n).filter(|_| sampler.step(1, &mut rng) == 0).count();
        assert!((zeros as f64 / n as f64 - 0.3).abs() < 0.01);
    }

    #[test]
    fn family_parse() {
        assert_eq!("Forward".parse::<Family>().unwrap(), Family::Forward);
        assert!("x".parse::<Family>().is_err());
    }
}
