//! Deterministic pseudo-random streams.
//!
//! Every randomized step in the toolkit draws from [`SplitMix64`], seeded
//! through [`mix_seed`]. Both are fully specified here so that another
//! implementation can reproduce the same permutations bit for bit:
//!
//! * `SplitMix64::next_u64`: `state += 0x9E3779B97F4A7C15`, then return
//!   `finalize(state)` where
//!   `finalize(z) = z3` with
//!   `z1 = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9`,
//!   `z2 = (z1 ^ (z1 >> 27)) * 0x94D049BB133111EB`,
//!   `z3 = z2 ^ (z2 >> 31)` (all arithmetic wrapping mod 2^64).
//! * `mix_seed(parts)`: start from `h = 0x243F6A8885A308D3` and for each part
//!   `p` in order set `h = finalize((h + 0x9E3779B97F4A7C15) ^ p)`.
//! * `below(n)`: draw `x = next_u64()`; reject while
//!   `x > u64::MAX - (2^64 mod n)`; return `x mod n`.
//! * Fisher–Yates: for `i` from `len - 1` down to `1`, swap positions `i`
//!   and `below(i + 1)`.
//!
//! The first part passed to `mix_seed` is always a [`Domain`] tag so that
//! streams for different purposes never coincide.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_INIT: u64 = 0x243F_6A88_85A3_08D3;

/// Stream domains. The numeric values are part of the reproducibility
/// contract and must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    ShuffleDeterministic = 1,
    ShuffleLocal = 2,
    ShuffleNondeterministic = 3,
    Split = 4,
    NpRandom = 5,
    CrossValidation = 6,
    SvmSampling = 7,
    LabelPermutation = 8,
}

#[inline]
pub fn finalize(z: u64) -> u64 {
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(MIX_INIT, |h, &p| finalize(h.wrapping_add(GOLDEN_GAMMA) ^ p))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream for `domain`, keyed by the remaining parts.
    pub fn for_domain(domain: Domain, parts: &[u64]) -> Self {
        let mut all = Vec::with_capacity(parts.len() + 1);
        all.push(domain as u64);
        all.extend_from_slice(parts);
        SplitMix64::new(mix_seed(&all))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let rem = (u64::MAX % n).wrapping_add(1) % n;
        let limit = u64::MAX - rem;
        loop {
            let x = self.next_u64();
            if x <= limit {
                return x % n;
            }
        }
    }

    /// Uniform float in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// A uniformly random permutation of `0..len`.
    pub fn permutation(&mut self, len: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..len).collect();
        self.shuffle(&mut order);
        order
    }
}

/// Inverse of a permutation given as `output[k] = input[order[k]]`.
pub fn invert(order: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; order.len()];
    for (k, &src) in order.iter().enumerate() {
        inverse[src] = k;
    }
    inverse
}
