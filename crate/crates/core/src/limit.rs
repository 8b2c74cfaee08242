//! Limiting distribution of the normalized race under linear independence.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpoly::Spectrum;

static MAX_THREADS: AtomicUsize = AtomicUsize::new(1);

/// Caps the worker threads used for sampling. Results do not depend on it.
pub fn set_max_threads(n: usize) {
    MAX_THREADS.store(n.max(1), Ordering::Relaxed);
}

pub fn max_threads() -> usize {
    MAX_THREADS.load(Ordering::Relaxed)
}

pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectralRv {
    pub q: u64,
    pub degree: usize,
    pub rank: u32,
    pub m_minus_q: u32,
    pub v_even: f64,
    pub v_odd: f64,
    /// One entry per distinct angle in (0, pi).
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    /// weight times multiplicity
    pub amplitudes: Vec<f64>,
}

pub fn circle_weight(q: u64, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0 / (q as f64).sqrt(), -theta);
    2.0 / (Complex64::new(1.0, 0.0) - z).norm()
}

pub fn two_point(q: u64, rank: u32, m_minus_q: u32) -> (f64, f64) {
    let q = q as f64;
    let sq = q.sqrt();
    let base = sq / (sq - 1.0) * rank as f64;
    let mm = m_minus_q as f64 * sq / (sq + 1.0);
    (base - q / (q - 1.0) + mm, base - sq / (q - 1.0) - mm)
}

pub fn build_rv(s: &Spectrum) -> SpectralRv {
    let (v_even, v_odd) = two_point(s.q, s.rank, s.m_minus_q);
    let upper = s.upper_angles();
    let angles: Vec<f64> = upper.iter().map(|&(t, _)| t).collect();
    let weights: Vec<f64> = angles.iter().map(|&t| circle_weight(s.q, t)).collect();
    let amplitudes = upper
        .iter()
        .zip(&weights)
        .map(|(&(_, m), &w)| m as f64 * w)
        .collect();
    SpectralRv {
        q: s.q,
        degree: s.degree,
        rank: s.rank,
        m_minus_q: s.m_minus_q,
        v_even,
        v_odd,
        angles,
        weights,
        amplitudes,
    }
}

impl SpectralRv {
    pub fn k(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.v_even + self.v_odd)
    }

    pub fn variance(&self) -> f64 {
        let d = 0.5 * (self.v_even - self.v_odd);
        d * d + self.amplitudes.iter().map(|a| 0.5 * a * a).sum::<f64>()
    }

    pub fn char_fn(&self, xi: f64) -> Complex64 {
        let b = 0.5
            * (Complex64::from_polar(1.0, self.v_even * xi)
                + Complex64::from_polar(1.0, self.v_odd * xi));
        b * self.circle_char_fn(xi)
    }

    fn circle_char_fn(&self, xi: f64) -> f64 {
        self.amplitudes.iter().map(|a| bessel_j0(a * xi)).product()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let mut x = if rng.gen::<bool>() {
            self.v_even
        } else {
            self.v_odd
        };
        for a in &self.amplitudes {
            x += a * (2.0 * PI * rng.gen::<f64>()).cos();
        }
        x
    }

    /// Seeded draws; block b uses stream b of the generator.
    pub fn samples(&self, n: usize, seed: u64) -> Vec<f64> {
        const BLOCK: usize = 1 << 14;
        let blocks = n.div_ceil(BLOCK);
        let run = |b: usize| -> Vec<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(n - b * BLOCK);
            (0..len).map(|_| self.sample(&mut rng)).collect()
        };
        let threads = max_threads().min(blocks.max(1));
        if threads <= 1 {
            return (0..blocks).flat_map(run).collect();
        }
        let mut parts: Vec<Vec<f64>> = vec![Vec::new(); blocks];
        std::thread::scope(|sc| {
            for (t, chunk) in parts.chunks_mut(blocks.div_ceil(threads)).enumerate() {
                let start = t * blocks.div_ceil(threads);
                let run = &run;
                sc.spawn(move || {
                    for (i, slot) in chunk.iter_mut().enumerate() {
                        *slot = run(start + i);
                    }
                });
            }
        });
        parts.concat()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct McEstimate {
    pub delta: f64,
    pub std_error: f64,
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
    pub seed: u64,
}

pub const MIN_SAMPLES: usize = 1000;

pub fn delta_mc(rv: &SpectralRv, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    let xs = rv.samples(samples, seed);
    let n = samples as f64;
    let pos = xs.iter().filter(|&&x| x > 0.0).count() as f64;
    let delta = pos / n;
    let mean = xs.iter().sum::<f64>() / n;
    let variance = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        delta,
        std_error: (delta * (1.0 - delta) / n).sqrt(),
        mean,
        variance,
        samples,
        seed,
    })
}

/// Exact density for a distribution with no circle part.
pub fn delta_two_point(rv: &SpectralRv) -> f64 {
    0.5 * ((rv.v_even > 0.0) as u8 as f64 + (rv.v_odd > 0.0) as u8 as f64)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CfEstimate {
    pub delta: f64,
    /// Upper end of the integration range actually used.
    pub cutoff: f64,
    /// Bound on the neglected tail of the inversion integral.
    pub truncation_bound: f64,
}

pub const DEFAULT_CF_CAP: f64 = 1e4;
const CF_TAIL_TARGET: f64 = 1e-9;
const PANEL_TOL: f64 = 1e-12;

impl SpectralRv {
    /// Bound on the integral of |phi(x)|/x over [t, inf) from |J0(x)| <= sqrt(2/(pi x)).
    fn tail_bound(&self, t: f64) -> f64 {
        let k = self.k() as f64;
        if self.amplitudes.iter().any(|&a| a * t < 2.0 / PI) {
            return f64::INFINITY;
        }
        let c: f64 = self
            .amplitudes
            .iter()
            .map(|&a| (2.0 / (PI * a)).sqrt())
            .product();
        c * t.powf(-k / 2.0) / (k / 2.0)
    }
}

pub fn delta_cf(rv: &SpectralRv, cap: f64) -> Result<CfEstimate> {
    if rv.k() == 0 {
        return Err(Error::InvalidArgument(
            "no circle component; the distribution is atomic".into(),
        ));
    }
    if !(cap > 0.0) {
        return Err(Error::InvalidArgument(
            "integration cap must be positive".into(),
        ));
    }
    let freq = rv.v_even.abs().max(rv.v_odd.abs()) + rv.amplitudes.iter().sum::<f64>();
    let h = (PI / freq).min(1.0);
    let f = |x: f64| {
        if x == 0.0 {
            // Im phi(x)/x -> mean as x -> 0
            rv.mean()
        } else {
            rv.char_fn(x).im / x
        }
    };
    let mut acc = 0.0;
    let mut a = 0.0;
    let mut bound = f64::INFINITY;
    while a < cap {
        let b = (a + h).min(cap);
        acc += quadrature::double_exponential::integrate(f, a, b, PANEL_TOL).integral;
        a = b;
        bound = rv.tail_bound(a);
        if bound < CF_TAIL_TARGET {
            break;
        }
    }
    Ok(CfEstimate {
        delta: 0.5 + acc / PI,
        cutoff: a,
        truncation_bound: bound / PI,
    })
}

/// Fitted constant in sup|F - G| <= C (rank + 1)/sqrt(N).
pub const GAUSSIAN_C: f64 = 0.5;
pub const MIN_GAUSSIAN_SAMPLES: usize = 100_000;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GaussianDistance {
    pub sup_distance: f64,
    pub bound: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn normalizer(rv: &SpectralRv) -> f64 {
    let q = rv.q as f64;
    ((q - 1.0) / q).sqrt() / (rv.degree.max(1) as f64).sqrt()
}

pub fn gaussian_distance(rv: &SpectralRv, samples: usize, seed: u64) -> Result<GaussianDistance> {
    if samples < MIN_GAUSSIAN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_GAUSSIAN_SAMPLES} samples required, got {samples}"
        )));
    }
    let c = normalizer(rv);
    let mut ys: Vec<f64> = rv
        .samples(samples, seed)
        .into_iter()
        .map(|x| c * x)
        .collect();
    ys.sort_by(f64::total_cmp);
    let n = samples as f64;
    let mut sup: f64 = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        let g = normal_cdf(y);
        sup = sup
            .max((g - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - g).abs());
    }
    Ok(GaussianDistance {
        sup_distance: sup,
        bound: GAUSSIAN_C * (rv.rank as f64 + 1.0) / (rv.degree.max(1) as f64).sqrt(),
        samples,
        seed,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BerryEsseenReport {
    pub epsilon: f64,
    pub m: f64,
    pub decay_holds: bool,
    pub decay_worst_ratio: f64,
    pub cumulant_holds: bool,
    pub cumulant_worst_ratio: f64,
    pub m_in_range: bool,
}

impl BerryEsseenReport {
    pub fn holds(&self) -> bool {
        self.decay_holds && self.cumulant_holds && self.m_in_range
    }
}

/// Checks the hypotheses of the Berry-Esseen lemma for the normalized circle part
/// on a log-spaced grid, with eps = 1/N and M = c (log N + rank).
pub fn berry_esseen_diagnostic(rv: &SpectralRv, c: f64, grid: usize) -> BerryEsseenReport {
    let n = rv.degree.max(2) as f64;
    let eps = 1.0 / n;
    let m = c * (n.ln() + rv.rank as f64);
    let norm = normalizer(rv);
    let phi = |xi: f64| rv.circle_char_fn(norm * xi);
    let split = eps.powf(-0.25);
    let grid = grid.max(2);
    let logspace = |lo: f64, hi: f64, i: usize| lo * (hi / lo).powf(i as f64 / (grid - 1) as f64);

    let mut decay_worst: f64 = 0.0;
    for i in 0..grid {
        let xi = logspace(split, 1.0 / eps, i);
        decay_worst = decay_worst.max(phi(xi).abs() / (10.0 * xi.powi(-4)));
    }
    let mut cum_worst: f64 = 0.0;
    for i in 0..grid {
        let xi = logspace(split * 1e-3, split, i);
        let v = phi(xi);
        let ratio = if v <= 0.0 {
            f64::INFINITY
        } else {
            (v.ln() + xi * xi / 2.0).abs() / (10.0 * eps * (m * xi * xi + xi.powi(4)))
        };
        cum_worst = cum_worst.max(ratio);
    }
    BerryEsseenReport {
        epsilon: eps,
        m,
        decay_holds: decay_worst <= 1.0,
        decay_worst_ratio: decay_worst,
        cumulant_holds: cum_worst <= 1.0,
        cumulant_worst_ratio: cum_worst,
        m_in_range: m >= 1.0 && m <= eps.powf(-0.5),
    }
}
