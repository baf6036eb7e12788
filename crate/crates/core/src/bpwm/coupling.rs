//! Empirical comparisons between walk-derived processes and BPwM laws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    count_pmf, excursion_from_zero, pmf_f, simulate_with, BpwmConfig, BpwmSampler, Family,
};
use crate::env::{ArrowEnvironment, CookieSpec};
use crate::error::{Error, Result};
use crate::mob::{regenerations, run_mob, Scheduling, StopRule};
use crate::rng::{mix64, replica_seed};
use crate::stats::{chi_square_homogeneity, histogram, tv_distance, tv_to_pmf, Histogram};
use crate::zproc::{simulate_z, ZValue};

/// Salt separating BPwM replica seeds from environment seeds.
const BPWM_SALT: u64 = 0x6270_776d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZCouplingReport {
    pub k: usize,
    pub reps: u64,
    /// TV between the empirical `z_1` law and the exact `f_1` pmf.
    pub one_step_tv_exact: f64,
    /// Per generation `n = 1..=steps`: two-sample TV and chi-square p-value.
    pub tv: Vec<f64>,
    pub p_values: Vec<f64>,
    pub max_tv: f64,
}

/// Runs the z-process on `reps` sampled environments and the BPwM with
/// `N = -(k-1)`, `y = k` on as many independent replicas, and compares the
/// laws of generations `1..=steps`.
pub fn coupling_test_z(
    spec: &CookieSpec,
    k: usize,
    reps: u64,
    steps: usize,
    seed: u64,
) -> Result<ZCouplingReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut z_cols: Vec<Vec<u64>> = vec![Vec::with_capacity(reps as usize); steps];
    for i in 0..reps {
        let env = ArrowEnvironment::sampled(spec.clone(), replica_seed(seed, i));
        let tr = simulate_z(&env, k, steps)?;
        for (n, col) in z_cols.iter_mut().enumerate() {
            match tr.get(n + 1) {
                ZValue::Finite(v) => col.push(v),
                ZValue::Infinite => unreachable!("sampled rows always end"),
            }
        }
    }
    let sampler = BpwmSampler::new(BpwmConfig::z_coupling(spec.clone(), k))?;
    let mut y_cols: Vec<Vec<u64>> = vec![Vec::with_capacity(reps as usize); steps];
    let bseed = mix64(seed ^ BPWM_SALT);
    for i in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(bseed, i));
        let run = simulate_with(&sampler, steps, &mut rng);
        for (n, col) in y_cols.iter_mut().enumerate() {
            col.push(run.trajectory.get(n + 1).copied().unwrap_or(0));
        }
    }
    let f1 = pmf_f(spec, 1, super::DEFAULT_R_MAX)?;
    let one_step_tv_exact = if steps > 0 {
        tv_to_pmf(&histogram(z_cols[0].iter().copied()), &f1.mass)
    } else {
        f64::NAN
    };
    let mut tv = Vec::new();
    let mut p_values = Vec::new();
    for (zc, yc) in z_cols.iter().zip(&y_cols) {
        let (hz, hy) = (histogram(zc.iter().copied()), histogram(yc.iter().copied()));
        tv.push(tv_distance(&hz, &hy));
        p_values.push(chi_square_homogeneity(&hz, &hy).2);
    }
    let max_tv = tv.iter().copied().fold(0.0, f64::max);
    Ok(ZCouplingReport {
        k,
        reps,
        one_step_tv_exact,
        tv,
        p_values,
        max_tv,
    })
}

/// Block lengths at or above this value share one cell.
pub const LENGTH_BIN_CAP: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DowncrossingFit {
    #[serde(rename = "N")]
    pub n_migration: i64,
    /// TV between the empirical `D_1` law and the exact one-generation law
    /// of the Reverse BPwM from 0.
    pub tv_first: f64,
    /// TV between block lengths and BPwM excursion lengths from 0.
    pub tv_length: f64,
    pub p_length: f64,
    /// Fraction of BPwM excursions not back at 0 within the horizon.
    pub unfinished: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DowncrossingReport {
    pub k: usize,
    pub blocks: u64,
    pub fits: Vec<DowncrossingFit>,
    /// The first matching parameterization, if any.
    pub default_n: Option<i64>,
    pub warning: Option<String>,
}

/// Compares downcrossing counts between consecutive regenerations of the
/// k-minimum walk with Reverse BPwM excursions from 0 for each `N` in
/// `candidates`. A block `[r_i, r_{i+1}]` read backwards from `r_{i+1}` is
/// an excursion of `D` from 0 of length `r_{i+1} - r_i`.
pub fn coupling_test_downcrossings(
    spec: &CookieSpec,
    k: usize,
    samples: u64,
    candidates: &[i64],
    seed: u64,
) -> Result<DowncrossingReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if spec.delta() <= k as f64 {
        return Err(Error::Precondition(format!(
            "regenerations need delta > k (delta = {}, k = {k})",
            spec.delta()
        )));
    }
    let mut firsts = Vec::new();
    let mut lengths = Vec::new();
    let rule = StopRule::steps(200_000);
    let mut replica = 0;
    let max_replicas = samples.max(1) * 10;
    while (lengths.len() as u64) < samples && replica < max_replicas {
        let env = ArrowEnvironment::sampled(spec.clone(), replica_seed(seed, replica));
        replica += 1;
        let tr = run_mob(&env, k, Scheduling::Minimum, &rule)?;
        for b in regenerations(&tr).blocks {
            firsts.push(b.d.first().copied().unwrap_or(0));
            lengths.push(b.dr.min(LENGTH_BIN_CAP));
        }
    }
    lengths.truncate(samples as usize);
    firsts.truncate(samples as usize);
    let n = lengths.len() as u64;
    let warning = (n < samples).then(|| format!("only {n} regeneration blocks sampled"));
    let h_first = histogram(firsts);
    let h_len = histogram(lengths);

    let mut fits = Vec::new();
    for &nm in candidates {
        let cfg = BpwmConfig::new(spec.clone(), nm, 0, Family::Reverse);
        let sampler = BpwmSampler::new(cfg)?;
        let first_law = if nm >= 1 {
            count_pmf(spec, Family::Reverse, nm as usize, super::DEFAULT_R_MAX).mass
        } else {
            vec![1.0]
        };
        let tv_first = tv_to_pmf(&h_first, &first_law);
        let bseed = mix64(seed ^ BPWM_SALT ^ (nm as u64).wrapping_mul(0x9e37));
        let mut sim = Histogram::new();
        let mut unfinished = 0u64;
        for i in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(bseed, i));
            let len = match excursion_from_zero(&sampler, 4 * LENGTH_BIN_CAP as usize, &mut rng) {
                Some((len, _)) => len.min(LENGTH_BIN_CAP),
                None => {
                    unfinished += 1;
                    LENGTH_BIN_CAP
                }
            };
            *sim.entry(len).or_insert(0) += 1;
        }
        let tv_length = tv_distance(&h_len, &sim);
        let p_length = chi_square_homogeneity(&h_len, &sim).2;
        fits.push(DowncrossingFit {
            n_migration: nm,
            tv_first,
            tv_length,
            p_length,
            unfinished: unfinished as f64 / n.max(1) as f64,
            matches: tv_first <= 0.02 && tv_length <= 0.02,
        });
    }
    let default_n = fits.iter().find(|f| f.matches).map(|f| f.n_migration);
    Ok(DowncrossingReport {
        k,
        blocks: n,
        fits,
        default_n,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_one_step_matches_exact() {
        let s = CookieSpec::new(vec![0.7]).unwrap();
        let r = coupling_test_z(&s, 1, 20_000, 2, 5).unwrap();
        assert!(r.one_step_tv_exact < 0.03, "{r:?}");
        assert!(r.max_tv < 0.04, "{r:?}");
    }

    #[test]
    fn fair_spec_is_rejected_for_downcrossings() {
        let s = CookieSpec::homogeneous(3, 0.5).unwrap();
        assert!(matches!(
            coupling_test_downcrossings(&s, 1, 10, &[1], 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn strong_drift_concentrates_downcrossings() {
        let s = CookieSpec::homogeneous(3, 0.999).unwrap();
        let r = coupling_test_downcrossings(&s, 1, 2_000, &[1], 3).unwrap();
        assert_eq!(r.blocks, 2_000);
        assert!(r.fits[0].tv_first < 0.05, "{r:?}");
    }
}
