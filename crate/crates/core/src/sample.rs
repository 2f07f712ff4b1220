//! Seed derivation and symbol sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::prob::{Dist, Kernel};

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of integers into a new seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Seeds derived for named substreams.
pub fn stream_seed(base: u64, name: &str) -> u64 {
    let tag = name
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    derive_seed(base, &[tag])
}

pub fn rng_from(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Inverse-CDF sampler over a finite pmf.
#[derive(Debug, Clone)]
pub struct CdfSampler {
    cdf: Vec<f64>,
}

impl CdfSampler {
    pub fn new(pmf: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // the last support point absorbs rounding in the running sum
        if let Some(last) = pmf.iter().rposition(|&p| p > 0.0) {
            for c in &mut cdf[last..] {
                *c = f64::INFINITY;
            }
        }
        CdfSampler { cdf }
    }

    pub fn from_dist(d: &Dist) -> Self {
        CdfSampler::new(d.pmf())
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1)
    }
}

/// One sampler per kernel row.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    rows: Vec<CdfSampler>,
    input_sizes: Vec<usize>,
}

impl KernelSampler {
    pub fn new(k: &Kernel) -> Self {
        KernelSampler {
            rows: (0..k.n_rows()).map(|r| CdfSampler::new(k.row_at(r))).collect(),
            input_sizes: k.input_sizes(),
        }
    }

    #[inline]
    pub fn sample_row<R: Rng + ?Sized>(&self, row: usize, rng: &mut R) -> usize {
        self.rows[row].sample(rng)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, cond: &[usize], rng: &mut R) -> usize {
        let r = cond
            .iter()
            .zip(&self.input_sizes)
            .fold(0, |acc, (&c, &s)| acc * s + c);
        self.rows[r].sample(rng)
    }
}

/// Draws `n` i.i.d. symbols.
pub fn sample_iid<R: Rng + ?Sized>(d: &CdfSampler, n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| d.sample(rng) as u8).collect()
}

/// Draws `(x^n, y^n)` with `x` i.i.d. and `y_t ~ w(· | x_t, y_{t−1})`
/// starting from `y0`.
pub fn sample_input_driven<R: Rng + ?Sized>(
    px: &Dist,
    w: &Kernel,
    y0: usize,
    n: usize,
    rng: &mut R,
) -> (Vec<u8>, Vec<u8>) {
    let xs = CdfSampler::from_dist(px);
    let ws = KernelSampler::new(w);
    let ny = w.output_size();
    let x = sample_iid(&xs, n, rng);
    let mut y = Vec::with_capacity(n);
    let mut prev = y0;
    for &xt in &x {
        prev = ws.sample_row(xt as usize * ny + prev, rng);
        y.push(prev as u8);
    }
    (x, y)
}
