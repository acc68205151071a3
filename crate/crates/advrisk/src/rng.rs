//! Deterministic pseudo-random generator for sampling.
//!
//! Every sample index gets its own generator seeded from (seed, index), so a
//! dataset is reproducible independently of how the draw loop is chunked or
//! restarted. The core is the splitmix64 sequence, which is more than
//! adequate for Monte Carlo work and has no dependencies.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Decorrelates derived seeds (for example per-grid-cell seeds in sweeps).
#[inline]
pub(crate) fn mix_seed(z: u64) -> u64 {
    mix64(z)
}

pub(crate) struct SampleRng {
    state: u64,
    gauss_spare: Option<f64>,
}

impl SampleRng {
    /// Generator for sample `index` of the stream identified by `seed`.
    pub(crate) fn new(seed: u64, index: u64) -> Self {
        SampleRng {
            state: mix64(seed ^ GOLDEN.wrapping_mul(index.wrapping_add(1))),
            gauss_spare: None,
        }
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    #[inline]
    pub(crate) fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in (0, 1], safe as a logarithm argument.
    #[inline]
    fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via the Box-Muller transform, caching the
    /// second value of each generated pair.
    pub(crate) fn next_gaussian(&mut self) -> f64 {
        if let Some(v) = self.gauss_spare.take() {
            return v;
        }
        let u1 = self.open01();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.gauss_spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
