//! Counter-based randomness: a keyed 64-bit hash turns `(seed, counter)`
//! into a uniform word, so any value in any trial can be regenerated
//! without carrying generator state between threads.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed hash `(key, input) -> u64`.
#[inline]
pub fn keyed_hash(key: u64, input: u64) -> u64 {
    KeyedHasher::new(key).hash(input)
}

/// A keyed hash with the key premixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyedHasher {
    key: u64,
}

impl KeyedHasher {
    pub fn new(key: u64) -> Self {
        Self {
            key: mix64(key.wrapping_add(GOLDEN)),
        }
    }

    #[inline]
    pub fn hash(&self, input: u64) -> u64 {
        mix64(self.key ^ mix64(input.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019)))
    }
}

/// Seed for trial `index` of a run keyed by `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    keyed_hash(master, index)
}

/// Maps the top 53 bits of a word to `[0, 1)`.
#[inline]
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential stream of hash outputs `hash(0), hash(1), ...`.
#[derive(Clone, Debug)]
pub struct HashStream {
    hasher: KeyedHasher,
    counter: u64,
    spare_normal: Option<f64>,
}

impl HashStream {
    pub fn new(seed: u64) -> Self {
        Self {
            hasher: KeyedHasher::new(seed),
            counter: 0,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.hasher.hash(self.counter);
        self.counter += 1;
        w
    }

    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Standard normal draw by the Box–Muller transform.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}
