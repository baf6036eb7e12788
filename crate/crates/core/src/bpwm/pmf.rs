//! Exact offspring laws: counts of one arrow kind before the `j`-th arrow of
//! the other kind in a cookie row, with the fair tail in closed form.

use std::ops::{Add, Mul, Sub};

use num::{BigInt, BigRational, FromPrimitive, ToPrimitive, Zero};
use serde::Serialize;

use super::Family;
use crate::env::CookieSpec;
use crate::error::{Error, Result};

pub const DEFAULT_R_MAX: usize = 512;

/// Largest `M` for which the rational DP is offered.
pub const EXACT_M_MAX: usize = 8;

/// Probability arithmetic used by the DP.
pub trait Prob:
    Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(p: f64) -> Self;
    /// `self * num / den`.
    fn scale(&self, num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Prob for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(p: f64) -> Self {
        p
    }
    fn scale(&self, num: u64, den: u64) -> Self {
        self * num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Prob for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_f64(p: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(p).expect("finite probability")
    }
    fn scale(&self, num: u64, den: u64) -> Self {
        self * BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// A pmf on `0..=r_max` with the mass left beyond `r_max` and the exact mean
/// of the untruncated law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringPmf<P> {
    pub mass: Vec<P>,
    pub residual: P,
    pub mean: P,
}

impl<P: Prob> OffspringPmf<P> {
    pub fn to_f64(&self) -> OffspringPmf<f64> {
        OffspringPmf {
            mass: self.mass.iter().map(Prob::to_f64).collect(),
            residual: self.residual.to_f64(),
            mean: self.mean.to_f64(),
        }
    }
}

impl OffspringPmf<f64> {
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect()
    }

    /// Rows `r,mass` with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,mass\n");
        for (r, m) in self.mass.iter().enumerate() {
            s.push_str(&format!("{r},{m:e}\n"));
        }
        s
    }
}

/// Law of the number of counted arrows before the `j`-th uncounted arrow,
/// when arrow `i` (1-based, `i <= p_counted.len()`) is counted with
/// probability `p_counted[i-1]` and later arrows are fair.
pub fn row_count_pmf<P: Prob>(p_counted: &[P], j: usize, r_max: usize) -> OffspringPmf<P> {
    assert!(j >= 1);
    let m = p_counted.len();
    // state[l][r]: still running after the prefix, l uncounted and r counted seen.
    let mut state = vec![vec![P::zero(); m + 1]; j];
    state[0][0] = P::one();
    let mut absorbed = vec![P::zero(); m + 1];
    let zero = P::zero();
    for (i, pc) in p_counted.iter().enumerate() {
        let ps = P::one() - pc.clone();
        let mut next = vec![vec![P::zero(); m + 1]; j];
        for l in 0..j {
            for r in 0..=i {
                let q = state[l][r].clone();
                if q <= zero {
                    continue;
                }
                next[l][r + 1] = next[l][r + 1].clone() + q.clone() * pc.clone();
                let qs = q * ps.clone();
                if l + 1 == j {
                    absorbed[r] = absorbed[r].clone() + qs;
                } else {
                    next[l + 1][r] = next[l + 1][r].clone() + qs;
                }
            }
        }
        state = next;
    }

    // nb[need][e]: e fair successes before `need` fair failures.
    let mut nb = vec![Vec::new(); j + 1];
    for (need, row) in nb.iter_mut().enumerate().skip(1) {
        let mut first = P::one();
        for _ in 0..need {
            first = first.scale(1, 2);
        }
        row.push(first);
        for e in 0..r_max as u64 {
            let v = row[e as usize].scale(e + need as u64, 2 * (e + 1));
            row.push(v);
        }
    }

    let mut mass = vec![P::zero(); r_max + 1];
    for (r, a) in absorbed.iter().enumerate() {
        if r <= r_max {
            mass[r] = mass[r].clone() + a.clone();
        }
    }
    let mut mean = P::zero();
    for (r, a) in absorbed.iter().enumerate() {
        mean = mean + a.scale(r as u64, 1);
    }
    for (l, row) in state.iter().enumerate() {
        let need = j - l;
        for (r0, q) in row.iter().enumerate() {
            if *q <= zero {
                continue;
            }
            mean = mean + q.scale((r0 + need) as u64, 1);
            for e in 0..=r_max.saturating_sub(r0) {
                if r0 + e > r_max {
                    break;
                }
                mass[r0 + e] = mass[r0 + e].clone() + q.clone() * nb[need][e].clone();
            }
        }
    }
    let mut total = P::zero();
    for v in &mass {
        total = total + v.clone();
    }
    let mut residual = P::one() - total;
    if residual < zero {
        residual = P::zero();
    }
    OffspringPmf {
        mass,
        residual,
        mean,
    }
}

fn counted_probs<P: Prob>(spec: &CookieSpec, family: Family) -> Vec<P> {
    spec.p()
        .iter()
        .map(|&p| match family {
            Family::Forward => P::from_f64(p),
            Family::Reverse => P::one() - P::from_f64(p),
        })
        .collect()
}

fn check_j(spec: &CookieSpec, j: usize) -> Result<()> {
    if j == 0 || j > spec.m() {
        return Err(Error::InvalidParameter(format!(
            "j must lie in [1, {}], got {j}",
            spec.m()
        )));
    }
    Ok(())
}

/// `f_j` (Forward) or `g_j` (Reverse) in floating point.
pub fn offspring_pmf(
    spec: &CookieSpec,
    family: Family,
    j: usize,
    r_max: usize,
) -> Result<OffspringPmf<f64>> {
    check_j(spec, j)?;
    Ok(row_count_pmf(&counted_probs::<f64>(spec, family), j, r_max))
}

/// Same law in rational arithmetic; each `p_i` is taken at its exact binary
/// value.
pub fn offspring_pmf_exact(
    spec: &CookieSpec,
    family: Family,
    j: usize,
    r_max: usize,
) -> Result<OffspringPmf<BigRational>> {
    check_j(spec, j)?;
    if spec.m() > EXACT_M_MAX {
        return Err(Error::Unsupported(format!(
            "rational pmfs need M <= {EXACT_M_MAX}"
        )));
    }
    Ok(row_count_pmf(
        &counted_probs::<BigRational>(spec, family),
        j,
        r_max,
    ))
}

/// Rights before `j` Lefts.
pub fn pmf_f(spec: &CookieSpec, j: usize, r_max: usize) -> Result<OffspringPmf<f64>> {
    offspring_pmf(spec, Family::Forward, j, r_max)
}

/// Lefts before `j` Rights.
pub fn pmf_g(spec: &CookieSpec, j: usize, r_max: usize) -> Result<OffspringPmf<f64>> {
    offspring_pmf(spec, Family::Reverse, j, r_max)
}

/// Law of the counted arrows before the `j`-th uncounted one for any
/// `j >= 1`, i.e. `eta_{j ^ M}` plus `j - M` geometric terms when `j > M`.
pub fn count_pmf(spec: &CookieSpec, family: Family, j: usize, r_max: usize) -> OffspringPmf<f64> {
    row_count_pmf(&counted_probs::<f64>(spec, family), j.max(1), r_max)
}

/// Mean of `f_M`, which equals `delta + M`.
pub fn gamma(spec: &CookieSpec) -> f64 {
    spec.delta() + spec.m() as f64
}

/// Mean of `g_M`, which equals `M - delta`.
pub fn gamma_prime(spec: &CookieSpec) -> f64 {
    spec.m() as f64 - spec.delta()
}

/// Closed-form `gamma` checked against the DP mean.
pub fn gamma_checked(spec: &CookieSpec, family: Family) -> Result<f64> {
    let closed = match family {
        Family::Forward => gamma(spec),
        Family::Reverse => gamma_prime(spec),
    };
    let dp = offspring_pmf(spec, family, spec.m(), DEFAULT_R_MAX)?.mean;
    if (dp - closed).abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "offspring mean {dp} differs from closed form {closed}"
        )));
    }
    Ok(closed)
}

/// `P(eta_j <= x) >= P(eta_M <= x)` for every `j` and `x`.
pub fn stochastic_order_holds(spec: &CookieSpec, family: Family, r_max: usize) -> Result<bool> {
    let top = offspring_pmf(spec, family, spec.m(), r_max)?.cdf();
    for j in 1..spec.m() {
        let c = offspring_pmf(spec, family, j, r_max)?.cdf();
        if c.iter().zip(&top).any(|(a, b)| *a < *b - 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}
