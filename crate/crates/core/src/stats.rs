//! Small statistics helpers for replica-level Monte Carlo output.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Wilson score interval for a binomial proportion at `z` standard deviations.
pub fn wilson(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Standard error of a proportion.
pub fn proportion_se(successes: u64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Histogram of integer outcomes.
pub type Histogram = BTreeMap<u64, u64>;

pub fn histogram(values: impl IntoIterator<Item = u64>) -> Histogram {
    let mut h = Histogram::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

fn total(h: &Histogram) -> u64 {
    h.values().sum()
}

/// Total variation distance between two empirical laws.
pub fn tv_distance(a: &Histogram, b: &Histogram) -> f64 {
    let (na, nb) = (total(a) as f64, total(b) as f64);
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    0.5 * keys
        .iter()
        .map(|k| {
            let pa = *a.get(k).unwrap_or(&0) as f64 / na;
            let pb = *b.get(k).unwrap_or(&0) as f64 / nb;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

/// Total variation distance between an empirical law and a pmf on
/// `0..pmf.len()`; mass outside the support of `pmf` counts fully.
pub fn tv_to_pmf(a: &Histogram, pmf: &[f64]) -> f64 {
    let na = total(a) as f64;
    if na == 0.0 {
        return f64::NAN;
    }
    let mut s = 0.0;
    for (r, &p) in pmf.iter().enumerate() {
        let pa = *a.get(&(r as u64)).unwrap_or(&0) as f64 / na;
        s += (pa - p).abs();
    }
    let outside: u64 = a.range(pmf.len() as u64..).map(|(_, c)| *c).sum();
    s += outside as f64 / na;
    // Pmf mass beyond the table is not observed by construction.
    s += (1.0 - pmf.iter().sum::<f64>()).max(0.0);
    0.5 * s
}

/// Chi-square test that two samples come from the same law. Cells are
/// merged left to right until each merged cell has expected count >= 5.
/// Returns `(statistic, degrees of freedom, p-value)`.
pub fn chi_square_homogeneity(a: &Histogram, b: &Histogram) -> (f64, usize, f64) {
    let (na, nb) = (total(a) as f64, total(b) as f64);
    let n = na + nb;
    let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for k in &keys {
        ca += *a.get(k).unwrap_or(&0) as f64;
        cb += *b.get(k).unwrap_or(&0) as f64;
        let col = ca + cb;
        if col * na.min(nb) / n >= 5.0 {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => cells.push((ca, cb)),
        }
    }
    if cells.len() < 2 {
        return (0.0, 0, 1.0);
    }
    let mut stat = 0.0;
    for (oa, ob) in &cells {
        let col = oa + ob;
        let ea = col * na / n;
        let eb = col * nb / n;
        stat += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let df = cells.len() - 1;
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    (stat, df, 1.0 - dist.cdf(stat))
}
