use serde::{Deserialize, Serialize};

/// Per-site counts: zero left of `origin`, `counts` on a finite window and a
/// constant `tail` to the right of it.
///
/// Used for local times, in-degrees and left-jump counts. The constant tail
/// describes walks that eventually move right deterministically (finite
/// environments), where every site far enough right is left exactly once by
/// each escaped particle.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LocalTimeProfile {
    origin: i64,
    counts: Vec<u64>,
    tail: u64,
}

impl LocalTimeProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(origin: i64, counts: Vec<u64>, tail: u64) -> Self {
        let mut p = Self {
            origin,
            counts,
            tail,
        };
        p.normalize();
        p
    }

    /// Profile with values `f(x)` on `lo..=hi` and `tail` beyond `hi`.
    pub fn from_fn(lo: i64, hi: i64, tail: u64, f: impl Fn(i64) -> u64) -> Self {
        let counts = (lo..=hi).map(f).collect();
        Self::new(lo, counts, tail)
    }

    #[inline]
    pub fn get(&self, x: i64) -> u64 {
        if x < self.origin {
            return 0;
        }
        let i = (x - self.origin) as u64;
        if i < self.counts.len() as u64 {
            self.counts[i as usize]
        } else {
            self.tail
        }
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// First site of the constant tail.
    pub fn end(&self) -> i64 {
        self.origin + self.counts.len() as i64
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty() && self.tail == 0
    }

    fn span(&self, other: &Self) -> (i64, i64) {
        let lo = self.origin.min(other.origin);
        let hi = self.end().max(other.end());
        (lo, hi)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let (lo, hi) = self.span(other);
        Self::new(
            lo,
            (lo..hi).map(|x| self.get(x) + other.get(x)).collect(),
            self.tail + other.tail,
        )
    }

    /// `self(x) <= other(x)` for every site.
    pub fn le(&self, other: &Self) -> bool {
        let (lo, hi) = self.span(other);
        self.tail <= other.tail && (lo..hi).all(|x| self.get(x) <= other.get(x))
    }

    /// Values on `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<u64> {
        (lo..=hi).map(|x| self.get(x)).collect()
    }

    /// Sum of the values strictly left of `x`.
    pub fn total_below(&self, x: i64) -> u64 {
        if x <= self.origin {
            return 0;
        }
        let n = (x - self.origin) as u64;
        let inside = n.min(self.counts.len() as u64);
        let s: u64 = self.counts[..inside as usize].iter().sum();
        s + (n - inside) * self.tail
    }

    /// First site `x` (scanning right from the origin) where the profile
    /// differs from `other`, if any.
    pub fn first_difference(&self, other: &Self) -> Option<i64> {
        let (lo, hi) = self.span(other);
        (lo..hi)
            .find(|&x| self.get(x) != other.get(x))
            .or(if self.tail != other.tail {
                Some(hi)
            } else {
                None
            })
    }

    fn normalize(&mut self) {
        while self.counts.last() == Some(&self.tail) {
            self.counts.pop();
        }
        let lead = self.counts.iter().take_while(|&&c| c == 0).count();
        if lead == self.counts.len() && self.tail == 0 {
            self.counts.clear();
            self.origin = 0;
            return;
        }
        if lead > 0 {
            self.counts.drain(..lead);
            self.origin += lead as i64;
        }
    }
}

impl PartialEq for LocalTimeProfile {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

impl Eq for LocalTimeProfile {}
