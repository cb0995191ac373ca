//! Counter-based deterministic random numbers.
//!
//! Every uniform is a pure function of (seed, stream, sample, dimension), so
//! results never depend on thread scheduling or worker count. No stateful
//! RNG appears in any inner loop.

/// splitmix64 finalizer.
#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Collapses a list of stream identifiers into one 64-bit seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut h = 0x2545F4914F6CDD1Du64;
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// Stateless counter RNG rooted at a seed.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    base: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> CounterRng {
        CounterRng { base: splitmix64(seed ^ 0x6A09E667F3BCC909) }
    }

    /// Uniform in [0, 1) for a (counter, dimension) pair.
    #[inline]
    pub fn uniform(&self, counter: u64, dim: u32) -> f64 {
        self.sample_uniform(counter, 0, dim)
    }

    /// Uniform in [0, 1) for a (stream, sample, dimension) triple; used with
    /// stream = pixel index and sample = sample index during rendering.
    #[inline]
    pub fn sample_uniform(&self, stream: u64, sample: u64, dim: u32) -> f64 {
        let mut h = splitmix64(self.base ^ stream.wrapping_mul(0x9E3779B97F4A7C15));
        h = splitmix64(h ^ sample.wrapping_mul(0xD1B54A32D192ED03));
        h = splitmix64(h ^ (dim as u64).wrapping_mul(0x8CB92BA72F3D8DD7));
        to_unit(h)
    }

    /// 32-bit scramble word for a (stream, dimension) pair, feeding the
    /// xor-scrambled (0,2) sequence below.
    #[inline]
    pub fn scramble_word(&self, stream: u64, dim: u32) -> u32 {
        let mut h = splitmix64(self.base ^ stream.wrapping_mul(0xBF58476D1CE4E5B9));
        h = splitmix64(h ^ (dim as u64).wrapping_mul(0x94D049BB133111EB));
        (h >> 32) as u32
    }
}

/// Point `i` of the xor-scrambled (0,2) low-discrepancy sequence, built from
/// the van der Corput and Sobol' direction numbers in base 2. With scramble
/// words drawn per pixel the points are marginally uniform (the estimator
/// stays unbiased) while sample sets stay well stratified in both
/// dimensions.
#[inline]
pub fn scrambled_02(i: u32, scramble: (u32, u32)) -> (f64, f64) {
    (van_der_corput(i, scramble.0), sobol2(i, scramble.1))
}

#[inline]
fn van_der_corput(i: u32, scramble: u32) -> f64 {
    let bits = i.reverse_bits() ^ scramble;
    bits as f64 * (1.0 / 4294967296.0)
}

#[inline]
fn sobol2(i: u32, scramble: u32) -> f64 {
    let mut bits = scramble;
    let mut v = 1u32 << 31;
    let mut n = i;
    while n != 0 {
        if n & 1 == 1 {
            bits ^= v;
        }
        n >>= 1;
        v ^= v >> 1;
    }
    bits as f64 * (1.0 / 4294967296.0)
}

#[inline]
fn to_unit(h: u64) -> f64 {
    // 53 mantissa bits; result strictly below 1.
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
