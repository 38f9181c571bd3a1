//! Reproducible randomness: ChaCha20 keyed by `(seed, stream)` with
//! Box–Muller Gaussians computed through `libm`, so sample sequences do not
//! depend on the platform's math library.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::linalg::Matrix;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A child stream, for handing distinct streams to parallel workers.
    pub fn split(&self, index: u64) -> Self {
        // splitmix64 finalizer keeps children of nearby streams apart.
        let mut z = self
            .stream
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self {
            seed: self.seed,
            stream: z ^ (z >> 31),
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Standard normal sampler over one [`RngStream`].
pub struct GaussianSampler {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianSampler {
    pub fn new(stream: RngStream) -> Self {
        Self {
            rng: stream.rng(),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        // Rejection sampling keeps the distribution exactly uniform.
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let r = self.rng.next_u64();
            if r < zone {
                return (r % n) as usize;
            }
        }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] so the logarithm is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample()).collect()
    }

    /// Uniformly distributed unit vector.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v = self.vector(n);
            let norm = super::linalg::norm2(&v);
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.sample())
    }
}

/// `rows × cols` matrix of i.i.d. standard normals, reproducible per stream.
pub fn gaussian_matrix(rows: usize, cols: usize, stream: RngStream) -> Matrix {
    GaussianSampler::new(stream).matrix(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_is_bitwise_identical() {
        let a = gaussian_matrix(5, 7, RngStream::new(3, 9));
        let b = gaussian_matrix(5, 7, RngStream::new(3, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn different_streams_differ() {
        let a = gaussian_matrix(5, 7, RngStream::new(3, 9));
        let b = gaussian_matrix(5, 7, RngStream::new(3, 10));
        assert_ne!(a, b);
        let c = gaussian_matrix(5, 7, RngStream::new(4, 9));
        assert_ne!(a, c);
    }

    #[test]
    fn moments_within_five_sigma() {
        let g = gaussian_matrix(100, 100, RngStream::new(1, 0));
        let n = 10_000.0;
        let mean = g.as_slice().iter().sum::<f64>() / n;
        let var = g.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 5.0 / n.sqrt(), "mean {mean}");
        assert!(mean.abs() <= 0.05);
        // Var of the sample variance of a normal is 2/(n-1).
        assert!((var - 1.0).abs() <= 5.0 * (2.0 / (n - 1.0)).sqrt(), "var {var}");
    }

    #[test]
    fn split_streams_are_distinct() {
        let base = RngStream::new(0, 0);
        let kids: std::collections::HashSet<_> = (0..100).map(|i| base.split(i).stream).collect();
        assert_eq!(kids.len(), 100);
    }

    #[test]
    fn below_stays_in_range() {
        let mut s = GaussianSampler::new(RngStream::new(5, 5));
        let mut seen = [false; 3];
        for _ in 0..100 {
            seen[s.below(3)] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }
}
