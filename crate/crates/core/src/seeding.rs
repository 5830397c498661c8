//! Deterministic seeding and small RNG helpers.
//!
//! Every stochastic component derives its seed by hashing a master seed with
//! the context that owns it (dataset, treatment, repeat, fold). Results are
//! then independent of thread scheduling and execution order. The uniform
//! helpers below avoid distribution code from the `rand` crate so that the
//! byte streams stay stable across dependency upgrades: ChaCha8 output is a
//! specified function of its seed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// FNV-1a over the given byte chunks, with a separator folded in between
/// chunks so that `["ab","c"]` and `["a","bc"]` hash differently.
pub fn fnv1a64(parts: &[&[u8]]) -> u64 {
    let mut h = FNV_OFFSET;
    for part in parts {
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
        h ^= 0xff;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive a child seed from a master seed and a list of context labels.
pub fn seed_for(master: u64, parts: &[&str]) -> u64 {
    let mut chunks: Vec<&[u8]> = Vec::with_capacity(parts.len() + 1);
    let master_bytes = master.to_le_bytes();
    chunks.push(&master_bytes);
    for p in parts {
        chunks.push(p.as_bytes());
    }
    fnv1a64(&chunks)
}

/// The crate's deterministic generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `[0, n)` by rejection, stable across platforms.
pub fn rand_below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0, "rand_below requires n > 0");
    let limit = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < limit {
            return v % n;
        }
    }
}

/// Uniform f64 in `[0, 1)` with 53 bits of precision.
pub fn rand_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<R: RngCore, T>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rand_below(rng, (i + 1) as u64) as usize;
        items.swap(i, j);
    }
}

/// `k` distinct indices drawn from `[0, n)`, in draw order.
pub fn sample_indices<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot sample {k} of {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = i + rand_below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
        out.push(pool[i]);
    }
    out
}
