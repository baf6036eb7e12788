//! Property tests for the exact invariants on finite tables and for the
//! offspring laws.

use mobwalk::bpwm::{
    classify, gamma, gamma_prime, offspring_pmf, stochastic_order_holds, BpwmConfig, Family,
};
use mobwalk::env::{Arrow, ArrowEnvironment, CookieSpec, FiniteEnv, LocalTimeProfile};
use mobwalk::mob::{
    min_walk, regenerations, run_mob, run_mob_from, run_sequential, MobRunner, Scheduling, StopRule,
};
use mobwalk::zproc::check_tzn;
use proptest::prelude::*;

fn finite_env() -> impl Strategy<Value = ArrowEnvironment> {
    (-4i64..=0, 1i64..=6, 1u64..=8).prop_flat_map(|(lo, hi, depth)| {
        let sites = (hi - lo + 1) as usize;
        prop::collection::vec(prop::collection::vec(any::<bool>(), depth as usize), sites).prop_map(
            move |rows| {
                let rows = rows
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|b| if b { Arrow::Right } else { Arrow::Left })
                            .collect()
                    })
                    .collect();
                ArrowEnvironment::finite(FiniteEnv::new(lo, hi, depth, rows).unwrap())
            },
        )
    })
}

fn rule() -> StopRule {
    StopRule::steps(u64::MAX)
}

fn window(env: &ArrowEnvironment) -> (i64, i64) {
    env.as_finite().unwrap().window()
}

fn spec_strategy() -> impl Strategy<Value = CookieSpec> {
    prop::collection::vec(0.05f64..0.95, 1..=8).prop_map(|p| CookieSpec::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn local_time_is_scheduling_invariant(env in finite_env(), k in 1usize..=3, perm_seed in 0usize..6) {
        let (_, seq) = run_sequential(&env, k, &rule()).unwrap();
        let mut order: Vec<usize> = (0..k).collect();
        order.rotate_left(perm_seed % k);
        if perm_seed >= 3 {
            order.reverse();
        }
        for s in [Scheduling::Minimum, Scheduling::RoundRobin, Scheduling::Priority(order), Scheduling::SequentialBlocks] {
            let tr = run_mob(&env, k, s, &rule()).unwrap();
            prop_assert!(tr.censor.is_complete());
            prop_assert_eq!(&tr.local_time, &seq);
        }
    }

    #[test]
    fn in_degree_brackets_local_time(env in finite_env(), k in 1usize..=3, cut in 0u64..60) {
        // Stopped at an arbitrary time.
        let tr = run_mob(&env, k, Scheduling::RoundRobin, &StopRule::steps(cut)).unwrap();
        for x in -15..=10 {
            let (l, i) = (tr.local_time.get(x), tr.in_degree.get(x));
            prop_assert!(l <= i && i <= l + k as u64, "site {} L {} I {}", x, l, i);
        }
        // Complete runs: arrivals balance departures.
        let tr = run_mob(&env, k, Scheduling::Minimum, &rule()).unwrap();
        prop_assert_eq!(&tr.in_degree, &tr.local_time);
    }

    #[test]
    fn frozen_particle_cannot_increase_local_time(env in finite_env(), k in 2usize..=3, j in 0usize..3) {
        let j = j % k;
        let full = run_mob(&env, k, Scheduling::Minimum, &rule()).unwrap();
        let r = StopRule { frozen: vec![j], ..rule() };
        let part = run_mob(&env, k, Scheduling::RoundRobin, &r).unwrap();
        prop_assert!(!part.proper);
        prop_assert!(part.local_time.le(&full.local_time));
    }

    #[test]
    fn interval_local_times_do_not_depend_on_scheduling(env in finite_env(), k in 1usize..=3, a in -3i64..=0, w in 0i64..=5) {
        let r = StopRule { interval: Some((a, a + w)), ..rule() };
        let starts: Vec<i64> = (0..k as i64).map(|j| a + (j % (w + 1))).collect();
        let m = run_mob_from(&env, &starts, Scheduling::Minimum, &r).unwrap();
        let rr = run_mob_from(&env, &starts, Scheduling::RoundRobin, &r).unwrap();
        let p = run_mob_from(&env, &starts, Scheduling::Priority((0..k).rev().collect()), &r).unwrap();
        for x in a..=a + w {
            prop_assert_eq!(m.local_time.get(x), rr.local_time.get(x));
            prop_assert_eq!(m.local_time.get(x), p.local_time.get(x));
        }
    }

    #[test]
    fn minimum_moves_by_at_most_one(env in finite_env(), k in 1usize..=3) {
        // min_walk asserts the one-particle-behind structure on every step.
        let (_, series) = min_walk(&env, k, &rule()).unwrap();
        let mut prev = 0;
        for m in series {
            prop_assert!((m - prev).abs() <= 1);
            prev = m;
        }
        let mut r = MobRunner::new(&env, &vec![0; k], Scheduling::RoundRobin, rule()).unwrap();
        let mut prev = 0;
        while r.step().unwrap().is_none() {
            let m = r.min_position();
            prop_assert!((m - prev).abs() <= 1);
            prev = m;
        }
    }

    #[test]
    fn monotone_in_starting_positions(env in finite_env(), k in 1usize..=3, xs in prop::collection::vec(-5i64..=5, 3), ds in prop::collection::vec(0i64..=4, 3)) {
        let xs = &xs[..k];
        let ys: Vec<i64> = xs.iter().zip(&ds).map(|(x, d)| x + d).collect();
        let lx = run_mob_from(&env, xs, Scheduling::Minimum, &rule()).unwrap().local_time;
        let ly = run_mob_from(&env, &ys, Scheduling::Minimum, &rule()).unwrap().local_time;
        prop_assert!(ly.le(&lx));
    }

    #[test]
    fn tzn_and_crossings(env in finite_env(), k in 1usize..=3) {
        let c = check_tzn(&env, k).unwrap();
        prop_assert!(c.agree && c.z_vs_w && c.crossings, "{:?}", c);
    }

    #[test]
    fn blocks_satisfy_step_identity(env in finite_env(), k in 1usize..=3) {
        let tr = run_mob(&env, k, Scheduling::Minimum, &rule()).unwrap();
        let rec = regenerations(&tr);
        for b in &rec.blocks {
            prop_assert_eq!(b.step_defect(k), 0);
            prop_assert!(b.sandwich_holds(k));
        }
        let (_, hi) = window(&env);
        // Past the table every site is a regeneration position.
        prop_assert!(rec.positions.contains(&(hi + 1)));
    }

    #[test]
    fn leftover_shifts_compose(env in finite_env(), a in prop::collection::vec(0u64..4, 11), b in prop::collection::vec(0u64..4, 11)) {
        let l1 = LocalTimeProfile::new(-5, a, 0);
        let l2 = LocalTimeProfile::new(-5, b, 0);
        let twice = env.leftover(&l1).leftover(&l2);
        for x in -6..=7 {
            for i in 1..=10 {
                prop_assert_eq!(twice.arrow_at(x, i), env.arrow_at(x, i + l1.get(x) + l2.get(x)));
            }
        }
    }

    #[test]
    fn pmfs_are_normalized(spec in spec_strategy(), jj in 0usize..8) {
        let j = 1 + jj % spec.m();
        for fam in [Family::Forward, Family::Reverse] {
            let p = offspring_pmf(&spec, fam, j, 512).unwrap();
            let total: f64 = p.mass.iter().sum::<f64>() + p.residual;
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(p.mass.iter().all(|m| *m >= 0.0));
        }
    }

    #[test]
    fn offspring_means_match_closed_forms(spec in spec_strategy()) {
        let f = offspring_pmf(&spec, Family::Forward, spec.m(), 512).unwrap();
        let g = offspring_pmf(&spec, Family::Reverse, spec.m(), 512).unwrap();
        prop_assert!((f.mean - gamma(&spec)).abs() <= 1e-9);
        prop_assert!((g.mean - gamma_prime(&spec)).abs() <= 1e-9);
        // The truncated table carries the mean too.
        let tm: f64 = f.mass.iter().enumerate().map(|(r, m)| r as f64 * m).sum();
        prop_assert!((tm - f.mean).abs() <= 1e-9);
    }

    #[test]
    fn stochastic_ordering(spec in spec_strategy()) {
        prop_assert!(stochastic_order_holds(&spec, Family::Forward, 256).unwrap());
        prop_assert!(stochastic_order_holds(&spec, Family::Reverse, 256).unwrap());
    }

    #[test]
    fn classification_matches_transience_threshold(spec in spec_strategy(), k in 1usize..=6) {
        let d = spec.delta();
        prop_assume!((d - k as f64).abs() > 1e-9);
        let c = classify(&BpwmConfig::z_coupling(spec.clone(), k));
        prop_assert_eq!(!c.dies_out, d > k as f64);
    }
}
