//! Seeded, worker-count-independent Monte-Carlo plumbing.
//!
//! Every path gets its own ChaCha8 stream keyed by `(seed, path index)`, so a
//! run produces identical numbers whatever the thread count. Results are
//! merged by integer counts or by ordered collection.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: u64 = 256;

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

impl McEstimate {
    pub fn from_bernoulli(successes: u64, n: u64) -> Self {
        let p = successes as f64 / n as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: (var / n as f64).sqrt(),
            n: n as u64,
        }
    }

    /// `|a - b|` in units of the combined standard error of independent estimates.
    pub fn z_distance(&self, other: &Self) -> f64 {
        let se = self.std_error.hypot(other.std_error);
        let d = (self.value - other.value).abs();
        if se == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / se
        }
    }
}

/// Mean of complex samples; `std_error` is `sqrt(E|Z - mean|^2 / n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub value: Complex64,
    pub std_error: f64,
    pub n: u64,
}

impl ComplexEstimate {
    pub fn from_samples<I: IntoIterator<Item = Complex64>>(xs: I) -> Self {
        let xs: Vec<Complex64> = xs.into_iter().collect();
        let n = xs.len();
        let mean = xs.iter().sum::<Complex64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: (var / n as f64).sqrt(),
            n: n as u64,
        }
    }
}

pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes a label into a seed so unrelated experiments draw unrelated streams.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(seed ^ splitmix(h))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    let workers = workers.max(1);
    if workers == 1 {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Runs `f` once per path and returns the outputs in path order.
pub fn map_paths<T, F>(n: u64, seed: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    with_pool(workers, || {
        (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .flat_map_iter(|chunk| {
                let start = chunk * CHUNK;
                let end = (start + CHUNK).min(n);
                (start..end)
                    .map(|i| {
                        let mut rng = path_rng(seed, i);
                        f(&mut rng, i)
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    })
}

/// Counts the paths for which `f` returns true.
pub fn count_paths<F>(n: u64, seed: u64, workers: usize, f: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> bool + Sync,
{
    with_pool(workers, || {
        (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let start = chunk * CHUNK;
                let end = (start + CHUNK).min(n);
                (start..end)
                    .filter(|&i| {
                        let mut rng = path_rng(seed, i);
                        f(&mut rng, i)
                    })
                    .count() as u64
            })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_do_not_depend_on_workers() {
        let f = |rng: &mut ChaCha8Rng, _| rng.random::<f64>() < 0.3;
        let a = count_paths(5_000, 9, 1, f);
        let b = count_paths(5_000, 9, 3, f);
        assert_eq!(a, b);
        let xs = map_paths(1000, 4, 1, |rng, i| (i, rng.random::<u32>()));
        let ys = map_paths(1000, 4, 4, |rng, i| (i, rng.random::<u32>()));
        assert_eq!(xs, ys);
        assert!(xs.iter().enumerate().all(|(k, (i, _))| k as u64 == *i));
    }

    #[test]
    fn streams_differ_by_index_and_label() {
        let a: u64 = path_rng(1, 0).random();
        let b: u64 = path_rng(1, 1).random();
        assert_ne!(a, b);
        assert_ne!(derive_seed(1, "x"), derive_seed(1, "y"));
        assert_eq!(derive_seed(1, "x"), derive_seed(1, "x"));
    }

    #[test]
    fn bernoulli_standard_error() {
        let e = McEstimate::from_bernoulli(25, 100);
        assert_eq!(e.value, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }
}
