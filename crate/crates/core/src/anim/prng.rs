//! SplitMix64, pinned so every implementation draws the same dropout plans.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step: returns the advanced state and the output word.
pub fn prng_next(state: u64) -> (u64, u64) {
    let state = state.wrapping_add(GAMMA);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (state, z ^ (z >> 31))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        let (state, out) = prng_next(self.state);
        self.state = state;
        out
    }

    /// `next_u64() % bound`. The modulo bias is part of the pinned behavior.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}
