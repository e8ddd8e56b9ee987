//! Additive white Gaussian noise, reproducible per `(seed, replica)`.
//!
//! Noise comes from a ChaCha8 keystream keyed by `seed`, with one stream per
//! replica. Pixel `k` always consumes keystream words `4k..4k+4` (two `u64`
//! draws fed to Box-Muller), so any pixel range can be generated on its own
//! and the field does not depend on how work is partitioned.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::ImageGrid;

const WORDS_PER_SAMPLE: u128 = 4;

/// Noise level and stream selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation on the `[0, 1]` intensity scale.
    pub sigma: f64,
    pub seed: u64,
    pub replica_index: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64, replica_index: u64) -> Self {
        NoiseSpec {
            sigma,
            seed,
            replica_index,
        }
    }

    fn stream_at(&self, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.replica_index);
        rng.set_word_pos(k as u128 * WORDS_PER_SAMPLE);
        rng
    }

    /// Standard normal draw for pixel `k` (before scaling by sigma).
    pub fn standard_normal_at(&self, k: usize) -> f64 {
        box_muller(&mut self.stream_at(k))
    }

    /// Fills `out` with standard normal draws for pixels `start..start + out.len()`.
    pub fn fill_standard_normal(&self, start: usize, out: &mut [f64]) {
        let mut rng = self.stream_at(start);
        for v in out.iter_mut() {
            *v = box_muller(&mut rng);
        }
    }
}

#[inline]
fn box_muller(rng: &mut ChaCha8Rng) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    // u1 in (0, 1] keeps the logarithm finite.
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * SCALE;
    let u2 = (rng.next_u64() >> 11) as f64 * SCALE;
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Returns `truth + sigma * z` with i.i.d. standard normal `z`. The result is
/// not clipped.
pub fn add_noise(truth: &ImageGrid, spec: &NoiseSpec) -> ImageGrid {
    let mut out = truth.clone();
    if spec.sigma == 0.0 {
        return out;
    }
    let mut rng = spec.stream_at(0);
    for v in out.values_mut() {
        *v += spec.sigma * box_muller(&mut rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mid_gray(n: usize) -> ImageGrid {
        ImageGrid::filled(2, n, 0.5).unwrap()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let g = ImageGrid::from_fn(2, 16, |x| x[0] * x[1]).unwrap();
        assert_eq!(add_noise(&g, &NoiseSpec::new(0.0, 7, 3)), g);
    }

    #[test]
    fn deterministic_and_replica_dependent() {
        let g = mid_gray(32);
        let a = add_noise(&g, &NoiseSpec::new(0.1, 11, 0));
        let b = add_noise(&g, &NoiseSpec::new(0.1, 11, 0));
        let c = add_noise(&g, &NoiseSpec::new(0.1, 11, 1));
        let e = add_noise(&g, &NoiseSpec::new(0.1, 12, 0));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, e);
    }

    #[test]
    fn pixel_access_matches_sequential_stream() {
        let spec = NoiseSpec::new(1.0, 42, 5);
        let g = ImageGrid::filled(1, 100, 0.0).unwrap();
        let y = add_noise(&g, &spec);
        for k in [0, 1, 17, 63, 99] {
            assert_eq!(y.values()[k], spec.standard_normal_at(k));
        }
        let mut chunk = [0.0; 10];
        spec.fill_standard_normal(37, &mut chunk);
        assert_eq!(&chunk[..], &y.values()[37..47]);
    }

    #[test]
    fn moments_match_sigma() {
        let sigma = 20.0 / 255.0;
        let n = 256;
        let g = mid_gray(n);
        let y = add_noise(&g, &NoiseSpec::new(sigma, 2024, 0));
        let m = (n * n) as f64;
        let diffs: Vec<f64> = y
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a - b)
            .collect();
        let mean = diffs.iter().sum::<f64>() / m;
        let var = diffs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
        // mean of n^2 draws has standard error sigma / n
        assert!(mean.abs() <= 3.0 * sigma / n as f64, "mean {mean}");
        assert!((var.sqrt() / sigma - 1.0).abs() < 0.02, "std {}", var.sqrt());
    }
}
