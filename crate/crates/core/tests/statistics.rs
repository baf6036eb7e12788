//! Distributional checks on sampled environments and derived processes.

use mobwalk::bpwm::{
    classify, count_pmf, coupling_test_z, pmf_f, survival_frequency, BpwmConfig, Family,
};
use mobwalk::env::{Arrow, ArrowEnvironment, CookieSpec};
use mobwalk::stats::{chi_square_homogeneity, histogram, proportion_se, tv_to_pmf};
use mobwalk::zproc::{simulate_z, ZValue};
use std::collections::BTreeMap;

#[test]
fn arrow_marginals_match_cookie_law() {
    let spec = CookieSpec::new(vec![0.8, 0.3, 0.65]).unwrap();
    let env = ArrowEnvironment::sampled(spec.clone(), 11);
    let sites = 40_000i64;
    let expect = [0.8, 0.3, 0.65, 0.5, 0.5, 0.5];
    for (i, &p) in expect.iter().enumerate() {
        let rights = (-sites / 2..sites / 2)
            .filter(|&x| env.arrow_at(x, i as u64 + 1) == Arrow::Right)
            .count() as u64;
        let freq = rights as f64 / sites as f64;
        let se = (p * (1.0 - p) / sites as f64).sqrt();
        assert!(
            (freq - p).abs() < 4.0 * se,
            "cookie {}: {freq} vs {p}",
            i + 1
        );
    }
    // Deep tail bits remain fair.
    let rights = (0..sites)
        .filter(|&x| env.arrow_at(x, 500) == Arrow::Right)
        .count() as u64;
    let freq = rights as f64 / sites as f64;
    assert!((freq - 0.5).abs() < 4.0 * proportion_se(rights, sites as u64));
}

#[test]
fn arrows_are_independent_across_cells() {
    let spec = CookieSpec::new(vec![0.7]).unwrap();
    let env = ArrowEnvironment::sampled(spec, 5);
    let n = 50_000i64;
    let mut joint = [[0u64; 2]; 2];
    let mut deep = [[0u64; 2]; 2];
    for x in 0..n {
        let a = (env.arrow_at(x, 1) == Arrow::Right) as usize;
        let b = (env.arrow_at(x + 1, 1) == Arrow::Right) as usize;
        let c = (env.arrow_at(x, 2) == Arrow::Right) as usize;
        joint[a][b] += 1;
        deep[a][c] += 1;
    }
    for table in [joint, deep] {
        let tot = n as f64;
        let row: Vec<f64> = (0..2).map(|a| (table[a][0] + table[a][1]) as f64).collect();
        let col: Vec<f64> = (0..2).map(|b| (table[0][b] + table[1][b]) as f64).collect();
        let mut stat = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let e = row[a] * col[b] / tot;
                stat += (table[a][b] as f64 - e).powi(2) / e;
            }
        }
        // chi-square with 1 df; 0.1% critical value.
        assert!(stat < 10.83, "dependence statistic {stat}");
    }
}

#[test]
fn seeds_are_reproducible_and_distinct() {
    let spec = CookieSpec::homogeneous(2, 0.6).unwrap();
    let a = ArrowEnvironment::sampled(spec.clone(), 3);
    let b = ArrowEnvironment::sampled(spec.clone(), 3);
    let c = ArrowEnvironment::sampled(spec, 4);
    let row = |e: &ArrowEnvironment| (0..200).map(|x| e.arrow_at(x, 1)).collect::<Vec<_>>();
    assert_eq!(row(&a), row(&b));
    assert_ne!(row(&a), row(&c));
}

#[test]
fn first_generation_matches_closed_form() {
    let spec = CookieSpec::new(vec![0.7]).unwrap();
    let reps = 40_000u64;
    let z1: Vec<u64> = (0..reps)
        .map(|i| {
            let env = ArrowEnvironment::sampled(spec.clone(), 1000 + i);
            simulate_z(&env, 1, 1).unwrap().get(1).finite().unwrap()
        })
        .collect();
    let h = histogram(z1.iter().copied());
    for r in 0..6u64 {
        let p = if r == 0 {
            0.3
        } else {
            0.7 * 0.5f64.powi(r as i32)
        };
        let got = *h.get(&r).unwrap_or(&0) as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((got - p).abs() < 4.0 * se, "P(z1={r}) = {got}, want {p}");
    }
}

#[test]
fn first_generation_tv_multi_cookie() {
    let spec = CookieSpec::homogeneous(4, 0.8).unwrap();
    let rep = coupling_test_z(&spec, 1, 40_000, 1, 21).unwrap();
    assert!(rep.one_step_tv_exact < 0.02, "tv {}", rep.one_step_tv_exact);
    let rep = coupling_test_z(&spec, 2, 20_000, 3, 22).unwrap();
    assert!(rep.max_tv < 0.03, "tv {:?}", rep.tv);
    assert!(
        rep.p_values.iter().all(|&p| p > 1e-4),
        "p {:?}",
        rep.p_values
    );
}

#[test]
fn z_is_markov_with_count_law() {
    // Given z_1 = j, the next value counts Rights before the (j-k+1)-th
    // Left in a fresh row.
    let spec = CookieSpec::new(vec![0.75, 0.6]).unwrap();
    let k = 2usize;
    let mut by_state: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for i in 0..60_000u64 {
        let env = ArrowEnvironment::sampled(spec.clone(), 77_000 + i);
        let tr = simulate_z(&env, k, 2).unwrap();
        if let (ZValue::Finite(a), ZValue::Finite(b)) = (tr.get(1), tr.get(2)) {
            if a >= k as u64 && tr.z.len() > 2 {
                by_state.entry(a).or_default().push(b);
            }
        }
    }
    let mut tested = 0;
    for (&j, next) in &by_state {
        if next.len() < 3000 {
            continue;
        }
        let pmf = count_pmf(&spec, Family::Forward, (j - k as u64 + 1) as usize, 512);
        let tv = tv_to_pmf(&histogram(next.iter().copied()), &pmf.mass);
        let noise = 2.0 * (40.0 / next.len() as f64).sqrt();
        assert!(tv < noise, "state {j}: tv {tv} over {}", next.len());
        tested += 1;
    }
    assert!(tested >= 3);
}

#[test]
fn conditional_laws_differ_between_states() {
    let spec = CookieSpec::homogeneous(2, 0.8).unwrap();
    let a = count_pmf(&spec, Family::Forward, 2, 512);
    let b = count_pmf(&spec, Family::Forward, 4, 512);
    assert!((b.mean - a.mean - 2.0).abs() < 1e-9);
    let sample = |pmf: &[f64], n: u64| {
        let mut h = mobwalk::stats::Histogram::new();
        for (r, &m) in pmf.iter().enumerate() {
            let c = (m * n as f64).round() as u64;
            if c > 0 {
                h.insert(r as u64, c);
            }
        }
        h
    };
    let (_, _, p) = chi_square_homogeneity(&sample(&a.mass, 5000), &sample(&b.mass, 5000));
    assert!(p < 1e-6);
}

#[test]
fn subcritical_bpwm_dies() {
    let spec = CookieSpec::homogeneous(4, 0.8).unwrap();
    let cfg = BpwmConfig::new(spec.clone(), -4, 3, Family::Forward);
    assert!(classify(&cfg).dies_out);
    assert_eq!(survival_frequency(&cfg, 2000, 500, 9).unwrap(), 0.0);

    // Criterion 0.4: still extinct, but with a heavy tail.
    let cfg = BpwmConfig::new(spec.clone(), -2, 3, Family::Forward);
    assert!(classify(&cfg).dies_out);
    let early = survival_frequency(&cfg, 100, 2000, 9).unwrap();
    let late = survival_frequency(&cfg, 3000, 2000, 9).unwrap();
    assert!(late < early && late < 0.05, "{early} -> {late}");

    let cfg = BpwmConfig::new(spec, 0, 3, Family::Forward);
    assert!(!classify(&cfg).dies_out);
    assert!(survival_frequency(&cfg, 300, 500, 9).unwrap() > 0.5);
}

#[test]
fn offspring_means_by_simulation() {
    let spec = CookieSpec::new(vec![0.9, 0.2, 0.7]).unwrap();
    let f = count_pmf(&spec, Family::Forward, 1, 512);
    let reps = 30_000u64;
    let mut sum = 0.0;
    let mut sq = 0.0;
    let k = 3usize;
    for i in 0..reps {
        let env = ArrowEnvironment::sampled(spec.clone(), 500_000 + i);
        let v = simulate_z(&env, k, 1).unwrap().get(1).finite().unwrap() as f64;
        sum += v;
        sq += v * v;
    }
    let mean = sum / reps as f64;
    let se = ((sq / reps as f64 - mean * mean) / reps as f64).sqrt();
    assert!((mean - f.mean).abs() < 4.0 * se, "{mean} vs {}", f.mean);
    let f3 = pmf_f(&spec, 3, 512).unwrap();
    assert!((f3.mean - (3.0 + spec.delta())).abs() < 1e-9);
}
