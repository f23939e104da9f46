//! Portable deterministic random number generation.
//!
//! Every random draw in the simulator goes through [`SimRng`], a
//! xoshiro256** generator whose 256-bit state is filled from four
//! consecutive SplitMix64 outputs. Both algorithms are fixed-width integer
//! arithmetic, so a given seed yields the same stream on every platform and
//! can be re-implemented bit-for-bit in any language:
//!
//! - `splitmix64(s)`: `s += 0x9E3779B97F4A7C15; z = s;`
//!   `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;`
//!   `return z ^ (z >> 31)` (all wrapping).
//! - Uniform `f64` in `[0, 1)`: `(next_u64() >> 11) * 2^-53`.
//! - Index in `0..n`: `(next_u64() as u128 * n) >> 64` (multiply-shift).
//! - Bernoulli(p): `next_f64() < p`.
//!
//! Subsystems draw from independent named streams ([`Stream`]) so that, for
//! example, adding a sensing draw never shifts the mobility sequence.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Finalizer of SplitMix64; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator, used for seeding and seed derivation.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

/// Named random streams of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Placement,
    Crowd,
    Mobility,
    Sensing,
}

impl Stream {
    /// Constant xor-ed into the run seed before seeding the stream.
    pub fn tag(self) -> u64 {
        match self {
            Stream::Placement => 0x706C_6163_656D_656E, // "placemen"
            Stream::Crowd => 0x6372_6F77_6400_0000,     // "crowd"
            Stream::Mobility => 0x6D6F_6269_6C69_7479, // "mobility"
            Stream::Sensing => 0x7365_6E73_696E_6700,  // "sensing"
        }
    }
}

/// xoshiro256** generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRng {
    s: [u64; 4],
}

impl SimRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        // SplitMix64 never emits four zero words in a row, so the state is valid.
        Self { s }
    }

    /// Independent stream `stream` of the run seeded with `seed`.
    pub fn stream(seed: u64, stream: Stream) -> Self {
        Self::seed_from_u64(seed ^ stream.tag())
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform heading in `[0, 2π)`.
    pub fn heading(&mut self) -> f64 {
        std::f64::consts::TAU * self.next_f64()
    }
}
