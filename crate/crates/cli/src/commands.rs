use mobwalk::bpwm::{
    classify, coupling_test_downcrossings, coupling_test_z, offspring_pmf, survival_frequency,
    BpwmConfig, Classification, Family, DEFAULT_R_MAX,
};
use mobwalk::checks::{run_suite, SuiteReport};
use mobwalk::estimate::{
    estimate_speed_leftover, estimate_speed_min, phase_classify, speed_relation, transience_table,
    EstimateReport, PhaseBudget,
};
use mobwalk::mob::min_walk;
use mobwalk::rng::replica_seed;
use mobwalk::{ArrowEnvironment, EnvSpec, StopRule};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CommandKind, CouplingKind, ExperimentConfig, Format};
use crate::error::CliError;
use crate::output::{
    csv_rows, emit_plot_data, json_bytes, phase_csv, pmf_series, reports_csv, speed_trajectory,
    survival_series, PlotSeries,
};

/// What a command produced. `status` is reported after the files are
/// written, so a censored or failing run still leaves its data behind.
pub struct Produced {
    pub main: Vec<u8>,
    pub plot: Vec<PlotSeries>,
    pub status: Result<(), CliError>,
}

impl Produced {
    fn ok(main: Vec<u8>, plot: Vec<PlotSeries>) -> Self {
        Produced {
            main,
            plot,
            status: Ok(()),
        }
    }
}

/// Runs `command` with a fully resolved config and seed.
pub fn execute(
    command: CommandKind,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Produced, CliError> {
    match command {
        CommandKind::Simulate => simulate(cfg, seed),
        CommandKind::Phase => phase(cfg, seed),
        CommandKind::Speed => speed(cfg, seed),
        CommandKind::Transience => transience(cfg, seed),
        CommandKind::Coupling => coupling(cfg, seed),
        CommandKind::Check => check(cfg, seed),
        CommandKind::Bpwm => bpwm(cfg, seed),
    }
}

fn format(cfg: &ExperimentConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn censoring_status(what: &str, censored: u64, total: u64, budget: f64) -> Result<(), CliError> {
    if total > 0 && censored as f64 > budget * total as f64 {
        Err(CliError::Censored(format!(
            "{what}: {censored} of {total} replicas censored (budget {budget})"
        )))
    } else {
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct SimRow {
    replica: u64,
    k: usize,
    steps: u64,
    final_min: i64,
    speed: f64,
    censor: String,
}

fn simulate(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let k = cfg.k_or(1)?;
    let steps = cfg.steps.unwrap_or(100_000);
    let fixed = match (&cfg.env_file, &cfg.env) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            let spec: EnvSpec = serde_json::from_str(&text)?;
            Some(ArrowEnvironment::from_spec(&spec)?)
        }
        (None, Some(spec)) if cfg.p.is_none() => Some(ArrowEnvironment::from_spec(spec)?),
        _ => None,
    };
    let spec = match fixed {
        Some(_) => None,
        None => Some(cfg.cookie_spec()?),
    };
    let reps = if fixed.is_some() {
        1
    } else {
        cfg.reps.unwrap_or(1)
    };
    let runs: Vec<(SimRow, Vec<i64>)> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let env = match (&fixed, &spec) {
                (Some(e), _) => e.clone(),
                (None, Some(s)) => ArrowEnvironment::sampled(s.clone(), replica_seed(seed, i)),
                (None, None) => unreachable!(),
            };
            let (tr, series) = min_walk(&env, k, &StopRule::steps(steps))?;
            let row = SimRow {
                replica: i,
                k,
                steps: tr.total_steps,
                final_min: tr.final_min,
                speed: tr.final_min as f64 / tr.total_steps.max(1) as f64,
                censor: format!("{:?}", tr.censor),
            };
            Ok((row, series))
        })
        .collect::<Result<_, mobwalk::Error>>()?;
    let plot = runs
        .first()
        .map(|(_, s)| vec![speed_trajectory("min_over_t", s, 1000)])
        .unwrap_or_default();
    let rows: Vec<SimRow> = runs.into_iter().map(|(r, _)| r).collect();
    let main = match format(cfg, Format::Csv) {
        Format::Csv => csv_rows(
            &rows,
            &["replica", "k", "steps", "final_min", "speed", "censor"],
        )?,
        Format::Json => json_bytes(&rows),
    };
    Ok(Produced::ok(main, plot))
}

fn transience(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let spec = cfg.cookie_spec()?;
    let kmax = cfg.kmax_or(1)?;
    let reps = cfg.reps.unwrap_or(1_000);
    let sites = cfg.sites.unwrap_or(10_000);
    let table = transience_table(&spec, kmax, reps, sites, seed)?;
    let main = match format(cfg, Format::Csv) {
        Format::Csv => reports_csv(&table.reports.iter().collect::<Vec<_>>())?,
        Format::Json => json_bytes(&table),
    };
    let censored = table.reports.iter().map(|r| r.censored).max().unwrap_or(0);
    Ok(Produced {
        main,
        plot: survival_series(&table),
        status: censoring_status("transience", censored, reps, cfg.max_censored()),
    })
}

#[derive(Debug, Serialize)]
struct SpeedOutput {
    k: usize,
    delta: f64,
    min_speed: EstimateReport,
    plain: EstimateReport,
    renewal: EstimateReport,
    walker_speeds: Vec<EstimateReport>,
    blocks: u64,
    identity_violations: u64,
    sandwich_violations: u64,
    /// `(lhs, rhs, stderr, within_3_sigma)` when every walker has positive
    /// predicted speed.
    relation: Option<(f64, f64, f64, bool)>,
}

fn speed(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let spec = cfg.cookie_spec()?;
    let k = cfg.k_or(1)?;
    let reps = cfg.reps.unwrap_or(20);
    let steps = cfg.steps.unwrap_or(200_000);
    let min = estimate_speed_min(&spec, k, reps, steps, seed)?;
    let walkers = (1..=k)
        .map(|i| estimate_speed_leftover(&spec, i, reps, steps, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let relation = (spec.delta() > (k + 1) as f64).then(|| {
        let r = speed_relation(min.ratio.clone(), walkers.clone());
        (r.lhs, r.rhs, r.stderr, r.within_3_sigma)
    });
    let out = SpeedOutput {
        k,
        delta: spec.delta(),
        min_speed: min.ratio,
        plain: min.plain,
        renewal: min.renewal,
        walker_speeds: walkers,
        blocks: min.blocks,
        identity_violations: min.identity_violations,
        sandwich_violations: min.sandwich_violations,
        relation,
    };
    if out.identity_violations + out.sandwich_violations > 0 {
        eprintln!(
            "warning: {} step-identity and {} sandwich violations",
            out.identity_violations, out.sandwich_violations
        );
    }
    let main = match format(cfg, Format::Csv) {
        Format::Csv => {
            let mut all = vec![&out.min_speed, &out.plain, &out.renewal];
            all.extend(out.walker_speeds.iter());
            reports_csv(&all)?
        }
        Format::Json => json_bytes(&out),
    };
    let status = censoring_status("speed", out.min_speed.censored, reps, cfg.max_censored());
    Ok(Produced {
        main,
        plot: Vec::new(),
        status,
    })
}

fn phase(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let spec = cfg.cookie_spec()?;
    let kmax = cfg.kmax_or(4)?;
    let d = PhaseBudget::default();
    let budget = PhaseBudget {
        reps: cfg.reps.unwrap_or(d.reps),
        sites: cfg.sites.unwrap_or(d.sites),
        speed_reps: cfg.speed_reps.unwrap_or(d.speed_reps),
        steps: cfg.steps.unwrap_or(d.steps),
    };
    let rows = phase_classify(&spec, kmax, &budget, seed)?;
    let main = match format(cfg, Format::Csv) {
        Format::Csv => phase_csv(&rows)?,
        Format::Json => json_bytes(&rows),
    };
    Ok(Produced::ok(main, Vec::new()))
}

#[derive(Debug, Serialize)]
struct ZRow {
    k: usize,
    generation: usize,
    tv: f64,
    p_value: f64,
    one_step_tv_exact: f64,
}

#[derive(Debug, Serialize)]
struct DownRow {
    k: usize,
    #[serde(rename = "N")]
    n: i64,
    tv_first: f64,
    tv_length: f64,
    p_length: f64,
    unfinished: f64,
    matches: bool,
}

fn coupling(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let spec = cfg.cookie_spec()?;
    let k = cfg.k_or(1)?;
    let reps = cfg.reps.unwrap_or(10_000);
    let fmt = format(cfg, Format::Csv);
    let main = match cfg.coupling.unwrap_or_default() {
        CouplingKind::Z => {
            let steps = cfg.steps.unwrap_or(4) as usize;
            let rep = coupling_test_z(&spec, k, reps, steps, seed)?;
            match fmt {
                Format::Json => json_bytes(&rep),
                Format::Csv => {
                    let rows: Vec<ZRow> = (0..rep.tv.len())
                        .map(|n| ZRow {
                            k,
                            generation: n + 1,
                            tv: rep.tv[n],
                            p_value: rep.p_values[n],
                            one_step_tv_exact: rep.one_step_tv_exact,
                        })
                        .collect();
                    csv_rows(
                        &rows,
                        &["k", "generation", "tv", "p_value", "one_step_tv_exact"],
                    )?
                }
            }
        }
        CouplingKind::Downcrossings => {
            let candidates = cfg
                .n
                .clone()
                .unwrap_or_else(|| vec![k as i64, (spec.m() + k) as i64]);
            let rep = coupling_test_downcrossings(&spec, k, reps, &candidates, seed)?;
            if let Some(w) = &rep.warning {
                eprintln!("warning: {w}");
            }
            match fmt {
                Format::Json => json_bytes(&rep),
                Format::Csv => {
                    let rows: Vec<DownRow> = rep
                        .fits
                        .iter()
                        .map(|f| DownRow {
                            k,
                            n: f.n_migration,
                            tv_first: f.tv_first,
                            tv_length: f.tv_length,
                            p_length: f.p_length,
                            unfinished: f.unfinished,
                            matches: f.matches,
                        })
                        .collect();
                    csv_rows(
                        &rows,
                        &[
                            "k",
                            "N",
                            "tv_first",
                            "tv_length",
                            "p_length",
                            "unfinished",
                            "matches",
                        ],
                    )?
                }
            }
        }
    };
    Ok(Produced::ok(main, Vec::new()))
}

#[derive(Debug, Serialize)]
struct SuiteRow<'a> {
    suite: &'a str,
    fixtures: u64,
    passed: u64,
    failures: String,
}

fn check(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let count = cfg.fixtures.unwrap_or(1_000);
    let reports = cfg
        .suites()?
        .into_iter()
        .map(|s| run_suite(s, seed, count))
        .collect::<Result<Vec<SuiteReport>, _>>()?;
    let main = match format(cfg, Format::Csv) {
        Format::Json => json_bytes(&reports),
        Format::Csv => {
            let rows: Vec<SuiteRow> = reports
                .iter()
                .map(|r| SuiteRow {
                    suite: &r.suite,
                    fixtures: r.fixtures,
                    passed: r.passed,
                    failures: r
                        .failures
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(";"),
                })
                .collect();
            csv_rows(&rows, &["suite", "fixtures", "passed", "failures"])?
        }
    };
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.all_passed())
        .map(|r| r.suite.as_str())
        .collect();
    let status = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    };
    Ok(Produced {
        main,
        plot: Vec::new(),
        status,
    })
}

#[derive(Debug, Serialize)]
struct ClassifyOutput {
    config: BpwmConfig,
    #[serde(flatten)]
    classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    survival_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ClassifyRow {
    family: Family,
    #[serde(rename = "N")]
    n: i64,
    y: u64,
    gamma: f64,
    criterion: f64,
    dies_out: bool,
    progeny_mean_finite: bool,
}

fn bpwm(cfg: &ExperimentConfig, seed: u64) -> Result<Produced, CliError> {
    let spec = cfg.cookie_spec()?;
    let family = cfg.family.unwrap_or(Family::Forward);
    if cfg.classify {
        let bc = BpwmConfig::new(spec, cfg.single_n(0)?, cfg.y.unwrap_or(1), family);
        let classification = classify(&bc);
        let (survival, horizon) = match cfg.reps {
            Some(reps) => {
                let h = cfg.steps.unwrap_or(1_000) as usize;
                (Some(survival_frequency(&bc, h, reps, seed)?), Some(h))
            }
            None => (None, None),
        };
        let main = match format(cfg, Format::Json) {
            Format::Json => json_bytes(&ClassifyOutput {
                config: bc,
                classification,
                survival_frequency: survival,
                horizon,
            }),
            Format::Csv => csv_rows(
                &[ClassifyRow {
                    family,
                    n: bc.n_migration,
                    y: bc.y,
                    gamma: classification.gamma,
                    criterion: classification.criterion,
                    dies_out: classification.dies_out,
                    progeny_mean_finite: classification.progeny_mean_finite,
                }],
                &[],
            )?,
        };
        return Ok(Produced::ok(main, Vec::new()));
    }
    let j = cfg.j.unwrap_or(spec.m());
    let pmf = offspring_pmf(&spec, family, j, DEFAULT_R_MAX)?;
    let name = match family {
        Family::Forward => format!("f_{j}"),
        Family::Reverse => format!("g_{j}"),
    };
    let main = match format(cfg, Format::Csv) {
        Format::Csv => pmf.to_csv().into_bytes(),
        Format::Json => json_bytes(&pmf),
    };
    Ok(Produced::ok(main, vec![pmf_series(&name, &pmf)]))
}

/// Writes the plot file for `produced`, if one was requested.
pub fn write_plot(cfg: &ExperimentConfig, produced: &Produced) -> Result<(), CliError> {
    if let Some(path) = &cfg.plot {
        crate::output::write_output(Some(path), &emit_plot_data(&produced.plot)?)?;
    }
    Ok(())
}
