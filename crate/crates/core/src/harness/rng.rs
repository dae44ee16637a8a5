//! Replicate random streams.
//!
//! Every replicate draws from its own ChaCha8 stream. The 256-bit key is
//! expanded with SplitMix64 from the user seed, the FNV-1a hash of the
//! experiment id and the FNV-1a hash of the cell label; the replicate index
//! selects the ChaCha stream. A cell can therefore be rerun alone and any
//! replicate regenerated without touching the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key material for one `(seed, experiment, cell)` triple.
pub fn cell_key(seed: u64, experiment: &str, cell: &str) -> [u8; 32] {
    let mut state = seed ^ fnv1a(experiment).rotate_left(17) ^ fnv1a(cell).rotate_left(41);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

pub fn replicate_rng(seed: u64, experiment: &str, cell: &str, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(cell_key(seed, experiment, cell));
    rng.set_stream(replicate);
    rng
}
