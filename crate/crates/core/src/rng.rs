//! Counter-based keyed hashing.
//!
//! Every random quantity in an environment is a pure function of
//! `(seed, site, index)`, so any number of walks, schedulings or worker
//! threads observe exactly the same arrows regardless of query order.
//! The mixer is the SplitMix64 finalizer; a row stream is SplitMix64
//! keyed by a per-site hash.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SITE_MUL: u64 = 0xD6E8_FEB8_6659_FD93;

/// Offset of the fair-coin tail words inside a row stream.
const TAIL_STREAM: u64 = 1 << 40;

#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of an environment lane (arrows, wall gaps, ...).
#[inline]
pub fn lane_key(seed: u64, lane: u64) -> u64 {
    mix64(mix64(seed ^ lane.wrapping_mul(GOLDEN)).wrapping_add(lane))
}

/// Key of the row above `site`.
#[inline(always)]
pub fn row_key(lane_key: u64, site: i64) -> u64 {
    mix64(lane_key ^ mix64((site as u64).wrapping_mul(SITE_MUL)))
}

/// `index`-th element of a keyed stream.
#[inline(always)]
pub fn stream(key: u64, index: u64) -> u64 {
    mix64(key.wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Word `w` (64 fair bits) of the tail of a row. Tail words dominate the
/// cost of long row scans, so they use the cheaper wyrand output function
/// on the counter `key + (2^40 + w) * P0`.
#[inline(always)]
pub fn tail_word(key: u64, w: u64) -> u64 {
    const P0: u64 = 0xa076_1d64_78bd_642f;
    const P1: u64 = 0xe703_7ed1_a0b4_28db;
    let s = key.wrapping_add((TAIL_STREAM + w).wrapping_mul(P0));
    let t = u128::from(s) * u128::from(s ^ P1);
    (t >> 64) as u64 ^ t as u64
}

/// Seed of replica `replica` under a master seed.
pub fn replica_seed(master: u64, replica: u64) -> u64 {
    stream(lane_key(master, 0x5EED), replica)
}

/// Uniform in [0,1) from a hash value.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Probability as a 64-bit comparison threshold: `hash < threshold`
/// happens with probability `p` (up to 2^-64).
pub fn threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

/// Outcome of scanning a bit stream for the `need`-th zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitScan {
    /// Number of ones seen before the `need`-th zero, and bits consumed.
    Found { ones: u64, consumed: u64 },
    /// Gave up after `max_bits`; counts so far.
    Capped { ones: u64, zeros: u64 },
}

/// Counts one-bits before the `need`-th zero-bit of a word stream
/// (least significant bit first). The first `skip` bits of the first word
/// are ignored. `need == 0` returns immediately.
pub fn ones_before_nth_zero(
    mut next_word: impl FnMut() -> u64,
    need: u64,
    skip: u32,
    max_bits: u64,
) -> BitScan {
    debug_assert!(skip < 64);
    if need == 0 {
        return BitScan::Found {
            ones: 0,
            consumed: 0,
        };
    }
    let mut remaining = need;
    let mut ones = 0u64;
    let mut consumed = 0u64;
    let mut offset = skip;
    loop {
        if consumed >= max_bits {
            return BitScan::Capped {
                ones,
                zeros: need - remaining,
            };
        }
        let word = next_word() >> offset;
        let width = 64 - offset;
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let bits = word & mask;
        let zeros_here = u64::from(width) - u64::from(bits.count_ones());
        if zeros_here < remaining {
            remaining -= zeros_here;
            ones += u64::from(bits.count_ones());
            consumed += u64::from(width);
            offset = 0;
            continue;
        }
        // The target zero is inside this word: drop the first remaining-1 zeros.
        let mut inv = !bits & mask;
        for _ in 1..remaining {
            inv &= inv - 1;
        }
        let pos = inv.trailing_zeros();
        let below = if pos == 0 {
            0
        } else {
            bits & ((1u64 << pos) - 1)
        };
        ones += u64::from(below.count_ones());
        consumed += u64::from(pos) + 1;
        return BitScan::Found { ones, consumed };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(words: &[u64], need: u64, skip: u32) -> Option<u64> {
        let mut ones = 0;
        let mut zeros = 0;
        for (wi, w) in words.iter().enumerate() {
            let start = if wi == 0 { skip } else { 0 };
            for b in start..64 {
                if (w >> b) & 1 == 1 {
                    ones += 1;
                } else {
                    zeros += 1;
                    if zeros == need {
                        return Some(ones);
                    }
                }
            }
        }
        None
    }

    #[test]
    fn scan_matches_bitwise_reference() {
        for seed in 0..200u64 {
            let words: Vec<u64> = (0..8).map(|i| stream(seed, i)).collect();
            for need in [1u64, 2, 5, 17, 63, 64, 65, 130] {
                for skip in [0u32, 1, 13, 63] {
                    let mut it = words.iter().copied();
                    let got = ones_before_nth_zero(|| it.next().unwrap_or(0), need, skip, 10_000);
                    match (got, naive(&words, need, skip)) {
                        (BitScan::Found { ones, .. }, Some(expect)) => assert_eq!(ones, expect),
                        (_, None) => {}
                        (other, expect) => panic!("{other:?} vs {expect:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn scan_with_ones_only_caps() {
        let r = ones_before_nth_zero(|| u64::MAX, 1, 0, 640);
        assert_eq!(
            r,
            BitScan::Capped {
                ones: 640,
                zeros: 0
            }
        );
    }

    #[test]
    fn threshold_extremes() {
        assert_eq!(threshold(0.0), 0);
        assert_eq!(threshold(1.0), u64::MAX);
        let t = threshold(0.5);
        assert_eq!(t, 1u64 << 63);
    }

    #[test]
    fn replica_seeds_are_distinct() {
        let mut v: Vec<u64> = (0..10_000).map(|r| replica_seed(7, r)).collect();
        v.sort_unstable();
        v.dedup();
        assert_eq!(v.len(), 10_000);
    }
}
