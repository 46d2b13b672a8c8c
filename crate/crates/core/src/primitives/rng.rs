use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{frame_concat, hash, ByteString};

/// Seeded byte stream. Equal seeds give equal streams; each draw advances the
/// stream so successive draws never overlap.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for the `index`-th sub-run of `master_seed`, seeded
    /// from `hash(frame_concat([master_seed, index]))`.
    pub fn derive(master_seed: u64, index: u64) -> Self {
        let digest = hash(&frame_concat(&[
            &master_seed.to_be_bytes(),
            &index.to_be_bytes(),
        ]));
        let mut seed = [0u8; 8];
        seed.copy_from_slice(&digest[..8]);
        Rng::new(u64::from_be_bytes(seed))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream position in 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// Next `width` bytes of the stream.
    pub fn random_bytes(&mut self, width: usize) -> ByteString {
        assert!(width >= 1, "random_bytes needs a width of at least one byte");
        let mut out = vec![0u8; width];
        self.inner.fill_bytes(&mut out);
        ByteString::new(out)
    }

    /// Uniform index in `0..bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        self.inner.gen_range(0..bound)
    }
}
