use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::statistics::ObservedCounts;

/// Which replicate family a stream feeds. Null and alternative draws never
/// share a stream, even when both use the same distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamRole {
    Null,
    Alternative,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Null => 0x6e75_6c6c,
            StreamRole::Alternative => 0x616c_7465,
        }
    }
}

/// Identifies a family of independent random streams.
///
/// The generator for replicate `i` at sample size `n` is a ChaCha8 stream
/// keyed by a hash of `(seed, role, distribution, n, i)` alone, so draws do
/// not depend on evaluation order or thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub role: StreamRole,
    pub distribution: u64,
}

impl StreamKey {
    pub fn new(seed: u64, role: StreamRole, distribution: u64) -> Self {
        Self {
            seed,
            role,
            distribution,
        }
    }

    pub fn rng(&self, sample_size: u64, replicate: u64) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        for word in [self.role.tag(), self.distribution, sample_size, replicate] {
            state = splitmix64(state ^ splitmix64(word));
        }
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit FNV-1a hash of a distribution label, used as the
/// `distribution` component of a [`StreamKey`].
pub fn distribution_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Draws one multinomial sample of size `n`.
///
/// Cells are filled by sequential binomial splits: cell `i` receives
/// `Binomial(remaining, p_i / Σ_{j≥i} p_j)` and the last cell takes what is
/// left. Zero-probability cells always receive zero. `probs` must be
/// non-negative with a positive total; it need not be normalised.
pub fn multinomial_sample<R: Rng + ?Sized>(probs: &[f64], n: u64, rng: &mut R) -> ObservedCounts {
    let k = probs.len();
    let mut counts = vec![0u64; k];
    if k == 0 {
        return ObservedCounts::new(counts);
    }
    let mut suffix = vec![0.0; k + 1];
    for i in (0..k).rev() {
        suffix[i] = suffix[i + 1] + probs[i];
    }
    let mut remaining = n;
    for i in 0..k - 1 {
        if remaining == 0 {
            break;
        }
        if probs[i] <= 0.0 {
            continue;
        }
        let q = probs[i] / suffix[i];
        let draw = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("conditional probability lies in [0, 1)")
                .sample(rng)
        };
        counts[i] = draw;
        remaining -= draw;
    }
    counts[k - 1] += remaining;
    ObservedCounts::new(counts)
}

/// Draws `replicates` samples of size `n`, in replicate order, in parallel.
pub fn draw_samples(probs: &[f64], n: u64, replicates: usize, key: StreamKey) -> Vec<ObservedCounts> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|i| multinomial_sample(probs, n, &mut key.rng(n, i)))
        .collect()
}
