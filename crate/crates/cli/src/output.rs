//! CSV and JSON rendering. All output is a pure function of the report, so
//! equal configs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use mobwalk::bpwm::OffspringPmf;
use mobwalk::estimate::{EstimateReport, PhaseRow, TransienceTable};
use serde::Serialize;

use crate::error::CliError;

/// Columns of the estimate CSV.
#[derive(Debug, Serialize)]
pub struct ReportRow<'a> {
    pub quantity: &'a str,
    pub k: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub reps: u64,
    pub horizon: u64,
    pub censored: u64,
    pub seed: u64,
    pub flags: String,
}

impl<'a> From<&'a EstimateReport> for ReportRow<'a> {
    fn from(r: &'a EstimateReport) -> Self {
        ReportRow {
            quantity: &r.quantity,
            k: r.k,
            estimate: r.estimate,
            stderr: r.stderr,
            reps: r.reps,
            horizon: r.horizon,
            censored: r.censored,
            seed: r.seed,
            flags: r.flags.join(";"),
        }
    }
}

#[derive(Debug, Serialize)]
struct PhaseCsvRow<'a> {
    k: usize,
    theory_transient: bool,
    emp_transient: &'a str,
    theory_ballistic: bool,
    emp_ballistic: &'a str,
    flags: String,
}

fn label(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "inconclusive",
    }
}

/// Serializes `rows` with a header; an empty slice still gets the header
/// when `header` is given.
pub fn csv_rows<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(!rows.is_empty())
        .from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

pub const REPORT_HEADER: &[&str] = &[
    "quantity", "k", "estimate", "stderr", "reps", "horizon", "censored", "seed", "flags",
];

pub fn reports_csv(reports: &[&EstimateReport]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<ReportRow> = reports.iter().map(|r| ReportRow::from(*r)).collect();
    csv_rows(&rows, REPORT_HEADER)
}

pub fn phase_csv(rows: &[PhaseRow]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<PhaseCsvRow> = rows
        .iter()
        .map(|r| PhaseCsvRow {
            k: r.k,
            theory_transient: r.theory_transient,
            emp_transient: label(r.emp_transient),
            theory_ballistic: r.theory_ballistic,
            emp_ballistic: label(r.emp_ballistic),
            flags: r.flags.join(";"),
        })
        .collect();
    csv_rows(
        &rows,
        &[
            "k",
            "theory_transient",
            "emp_transient",
            "theory_ballistic",
            "emp_ballistic",
            "flags",
        ],
    )
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("reports are always serializable");
    v.push(b'\n');
    v
}

/// Writes to `path`, or stdout when `None`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Write {
            path: p.to_owned(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// One named series of `(x, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct PlotRow<'a> {
    series: &'a str,
    x: f64,
    y: f64,
}

/// Long-format `series,x,y` CSV.
pub fn emit_plot_data(series: &[PlotSeries]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<PlotRow> = series
        .iter()
        .flat_map(|s| {
            s.points.iter().map(|&(x, y)| PlotRow {
                series: &s.name,
                x,
                y,
            })
        })
        .collect();
    csv_rows(&rows, &["series", "x", "y"])
}

/// Surviving fraction against the site horizon, one series per k.
pub fn survival_series(table: &TransienceTable) -> Vec<PlotSeries> {
    let mut out: Vec<PlotSeries> = Vec::new();
    for &(k, h, frac) in &table.curves {
        let name = format!("survival_k{k}");
        match out.last_mut() {
            Some(s) if s.name == name => s.points.push((h as f64, frac)),
            _ => out.push(PlotSeries {
                name,
                points: vec![(h as f64, frac)],
            }),
        }
    }
    out
}

pub fn pmf_series(name: &str, pmf: &OffspringPmf<f64>) -> PlotSeries {
    PlotSeries {
        name: name.to_string(),
        points: pmf
            .mass
            .iter()
            .enumerate()
            .map(|(r, &m)| (r as f64, m))
            .collect(),
    }
}

/// `X_t / t` of a minimum series, thinned to about `points` samples.
pub fn speed_trajectory(name: &str, mins: &[i64], points: usize) -> PlotSeries {
    let stride = (mins.len() / points.max(1)).max(1);
    PlotSeries {
        name: name.to_string(),
        points: mins
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(t, _)| t % stride == 0 || *t + 1 == mins.len())
            .map(|(t, &x)| (t as f64, x as f64 / t as f64))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mobwalk::bpwm::pmf_f;
    use mobwalk::CookieSpec;

    #[test]
    fn empty_plot_is_header_only() {
        assert_eq!(emit_plot_data(&[]).unwrap(), b"series,x,y\n");
        assert_eq!(
            reports_csv(&[])
                .unwrap()
                .iter()
                .filter(|&&b| b == b'\n')
                .count(),
            1
        );
    }

    #[test]
    fn pmf_bars_follow_closed_form() {
        let spec = CookieSpec::new(vec![0.7]).unwrap();
        let s = pmf_series("f1", &pmf_f(&spec, 1, 20).unwrap());
        let text = String::from_utf8(emit_plot_data(&[s]).unwrap()).unwrap();
        assert!(text.starts_with("series,x,y\n"));
        for line in text.lines().skip(1).take(10) {
            let cols: Vec<&str> = line.split(',').collect();
            let r: f64 = cols[1].parse().unwrap();
            let y: f64 = cols[2].parse().unwrap();
            let want = if r == 0.0 {
                0.3
            } else {
                0.7 * 0.5f64.powi(r as i32)
            };
            assert!((y - want).abs() < 1e-15);
        }
    }

    #[test]
    fn survival_curves_are_grouped() {
        let table = TransienceTable {
            reports: vec![],
            monotonicity_violations: 0,
            curves: vec![(1, 1, 1.0), (1, 2, 0.5), (2, 1, 0.9)],
        };
        let s = survival_series(&table);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].points, vec![(1.0, 1.0), (2.0, 0.5)]);
    }

    #[test]
    fn trajectory_thinning_keeps_last_point() {
        let mins: Vec<i64> = (0..=100).collect();
        let s = speed_trajectory("x", &mins, 10);
        assert_eq!(s.points.len(), 10);
        assert_eq!(s.points.last(), Some(&(100.0, 1.0)));
    }
}
