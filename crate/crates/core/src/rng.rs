//! Deterministic pseudo-random source used by every seeded operation.
//!
//! Hand-rolled xoshiro256++ seeded through splitmix64 so that sampling,
//! placement, and pairing are reproducible across platforms and releases
//! without depending on an external RNG crate's stream stability.

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256++ generator with a fixed, documented stream.
#[derive(Debug, Clone)]
pub struct SeededRng {
    s: [u64; 4],
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        if s == [0; 4] {
            s[0] = 1;
        }
        SeededRng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform value in `[0, n)` via rejection sampling (unbiased).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is undefined");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Draws a fresh sub-seed; used to give each pipeline stage its own stream.
    pub fn derive_seed(&mut self) -> u64 {
        self.next_u64()
    }

    /// Selects `k` distinct indices from `0..len` uniformly at random
    /// (partial Fisher-Yates). Returned indices are sorted ascending.
    pub fn sample_indices(&mut self, len: usize, k: usize) -> Vec<usize> {
        assert!(k <= len);
        let mut pool: Vec<usize> = (0..len).collect();
        for i in 0..k {
            let j = i + self.below((len - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool.sort_unstable();
        pool
    }
}

/// Ceiling of `fraction * count` as sampling rules expect it.
///
/// The nominal fractions (0.1, 0.02) are not exactly representable in f64
/// and the raw product can land a hair above the intended real value
/// (0.1 * 100 = 10.000000000000002), which would push a plain ceil one too
/// high. Nudge below by 1e-9 before ceiling; any fraction > 0 still selects
/// at least one item.
pub fn ceil_fraction(count: usize, fraction: f64) -> usize {
    if count == 0 {
        return 0;
    }
    let target = fraction * count as f64;
    let k = (target - 1e-9).ceil().max(0.0) as usize;
    k.clamp(1, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SeededRng::new(7);
        for n in [1u64, 2, 3, 10, 1000] {
            for _ in 0..200 {
                assert!(rng.below(n) < n);
            }
        }
    }

    #[test]
    fn sample_indices_distinct_and_sorted() {
        let mut rng = SeededRng::new(3);
        let picked = rng.sample_indices(50, 20);
        assert_eq!(picked.len(), 20);
        for w in picked.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(picked.iter().all(|&i| i < 50));
    }

    #[test]
    fn ceil_fraction_handles_float_artifacts() {
        // 0.1 * 100 rounds to 10.000000000000002 in f64; the rule wants 10.
        assert_eq!(ceil_fraction(100, 0.1), 10);
        assert_eq!(ceil_fraction(64, 0.1), 7); // ceil(6.4)
        assert_eq!(ceil_fraction(100, 1.0), 100);
        assert_eq!(ceil_fraction(0, 0.5), 0);
        assert_eq!(ceil_fraction(5, 0.001), 1); // fraction > 0 selects >= 1
        assert_eq!(ceil_fraction(4096, 0.02), 82); // ceil(81.92)
    }
}
