//! Seeded, splittable random streams.
//!
//! Every random draw in the crate goes through a [`SeedTree`]: a root seed plus
//! a path of indices (task, sample, attempt, ...). Each path maps to an
//! independent ChaCha8 key, so the stream for attempt `k` of sample `i` is the
//! same whether it runs first, last, or on another thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    seed: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child seed tree for `index`, used to hand a sub-experiment its own root.
    pub fn child(&self, index: u64) -> SeedTree {
        let mut state = self.seed ^ 0xA076_1D64_78BD_642F;
        let a = splitmix64(&mut state);
        let mut state = a ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB);
        SeedTree {
            seed: splitmix64(&mut state),
        }
    }

    /// Generator for the stream at `path` below this root.
    pub fn rng(&self, path: &[u64]) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        let mut words = [splitmix64(&mut state), 0, 0, 0];
        for (depth, &index) in path.iter().enumerate() {
            state ^= index
                .wrapping_add(1)
                .wrapping_mul(0x9FB2_1C65_1E98_DF25)
                .rotate_left(depth as u32 * 7 + 1);
            words[0] ^= splitmix64(&mut state);
        }
        state ^= path.len() as u64;
        words[1] = splitmix64(&mut state);
        words[2] = splitmix64(&mut state);
        words[3] = splitmix64(&mut state);
        for (chunk, word) in key.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}
