//! Reproducible random variates for the simulation harness.
//!
//! Bit-reproducibility across platforms and thread counts matters more here
//! than raw speed, so every sampling algorithm is fixed and spelled out:
//!
//! * Stream layout: one ChaCha8 stream per marker. The 32-byte ChaCha key is
//!   the user seed expanded by four rounds of SplitMix64; the marker index
//!   becomes the ChaCha stream number. Draws for different markers never
//!   share state, so generation order (or parallel generation) cannot change
//!   the output.
//! * Uniforms on (0, 1]: `((next_u64 >> 11) + 1) * 2^-53`.
//! * Normals: Box-Muller, `sqrt(-2 ln u1) * cos(2 pi u2)`; the sine companion
//!   is discarded, so one normal always consumes exactly two uniforms.
//! * Gamma(shape >= 1): Marsaglia-Tsang squeeze (d = shape - 1/3,
//!   c = 1/sqrt(9 d)), one normal plus one uniform per proposal.
//! * Gamma(shape < 1): Gamma(shape + 1) boosted by `u^(1/shape)`.
//! * Beta(a, b): ratio of two Gammas, redrawn in the measure-zero event that
//!   both underflow to zero.
//! * Binomial(n, p): count of `u <= p` over exactly `n` uniforms.
//! * Hypergeometric: sequential urn draws, one uniform per draw.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-marker random stream; see the module docs for the exact algorithms.
pub struct MarkerRng {
    rng: ChaCha8Rng,
}

impl MarkerRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(&mut state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform on (0, 1].
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (((self.rng.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller (two uniforms, cosine branch only).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, boosting shapes below one.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        debug_assert!(shape > 0.0);
        if shape < 1.0 {
            let boost = self.gamma(shape + 1.0);
            return boost * self.uniform().powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform();
            if u < 1.0 - 0.0331 * x * x * x * x {
                return d * v;
            }
            if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Beta(a, b) as `X / (X + Y)` with independent `X ~ Gamma(a)`,
    /// `Y ~ Gamma(b)`.
    pub fn beta(&mut self, a: f64, b: f64) -> f64 {
        loop {
            let x = self.gamma(a);
            let y = self.gamma(b);
            if x + y > 0.0 {
                return x / (x + y);
            }
        }
    }

    /// Binomial(n, p) by counting uniform draws at or below `p`; consumes
    /// exactly `n` uniforms.
    pub fn binomial(&mut self, n: u32, p: f64) -> u32 {
        debug_assert!((0.0..=1.0).contains(&p));
        let mut count = 0;
        for _ in 0..n {
            if self.uniform() <= p {
                count += 1;
            }
        }
        count
    }

    /// Number of marked balls among `draws` taken without replacement from an
    /// urn of `total` balls of which `marked` are marked.
    pub fn hypergeometric(&mut self, marked: u32, total: u32, draws: u32) -> u32 {
        debug_assert!(marked <= total && draws <= total);
        let mut remaining_marked = marked;
        let mut remaining_total = total;
        let mut got = 0;
        for _ in 0..draws {
            let p = f64::from(remaining_marked) / f64::from(remaining_total);
            if self.uniform() <= p {
                got += 1;
                remaining_marked -= 1;
            }
            remaining_total -= 1;
        }
        got
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
