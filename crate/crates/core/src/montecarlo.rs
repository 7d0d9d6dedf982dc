//! Link-level Monte Carlo: i.i.d. fading, SSK/SM transmission, AWGN and
//! maximum-likelihood detection.
//!
//! Transmit energy is `E_s = 1` and every real noise dimension has variance
//! `N₀ = 10^{-snr_db/10}`. With this calibration the pairwise error probability
//! of two antennas is `E[Q(√(γ̄ Z))]` with `γ̄ = E_s/(4N₀)`, as in the analysis.
//!
//! Antenna-index bits use natural binary, PSK bits a Gray labeling. Trials run
//! in fixed-size chunks; chunk `k` draws from ChaCha8 stream `k` of the seed, and
//! chunks are accumulated in index order, so the estimate does not depend on
//! the number of worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::exactperf::{Modulation, SnrPoint, SystemConfig};
use crate::fading::{sample_phase, EnvelopeSampler};

/// Trials per chunk (one RNG stream each).
pub const CHUNK_TRIALS: u64 = 2048;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_bit_errors: 200,
            max_bits: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub snr_point: SnrPoint,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// No errors observed: only `ci95_high` is informative.
    pub upper_bound_only: bool,
}

impl BerEstimate {
    pub fn from_counts(snr_point: SnrPoint, bits_sent: u64, bit_errors: u64) -> Self {
        let (lo, hi) = wilson_interval(bit_errors, bits_sent);
        let ber = if bits_sent == 0 { 0.0 } else { bit_errors as f64 / bits_sent as f64 };
        BerEstimate {
            snr_point,
            bits_sent,
            bit_errors,
            ber,
            ci95_low: lo.min(ber),
            ci95_high: hi.max(ber),
            upper_bound_only: bit_errors == 0,
        }
    }

    /// Binomial standard deviation of `ber`.
    pub fn sigma(&self) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits_sent as f64).sqrt()
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Complex gains `h[ℓ][t]`, stored row-major (`N_r` rows of `N_t`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub n_r: usize,
    pub n_t: usize,
    pub gains: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn draw<R: Rng + ?Sized>(sampler: &EnvelopeSampler, n_r: usize, n_t: usize, rng: &mut R) -> Self {
        let gains = (0..n_r * n_t)
            .map(|_| Complex64::from_polar(sampler.sample(rng), sample_phase(rng)))
            .collect();
        ChannelRealization { n_r, n_t, gains }
    }

    pub fn get(&self, rx: usize, tx: usize) -> Complex64 {
        self.gains[rx * self.n_t + tx]
    }
}

/// Transmit symbols: `[1]` for SSK, `κ₀ e^{j2πk/M}` for SM. Index `k` carries
/// the Gray label `k ^ (k >> 1)`.
pub fn constellation(cfg: &SystemConfig) -> Vec<Complex64> {
    match cfg.modulation {
        Modulation::Ssk => vec![Complex64::new(1.0, 0.0)],
        Modulation::Sm { m, kappa0 } => (0..m)
            .map(|k| Complex64::from_polar(kappa0, 2.0 * PI * k as f64 / m as f64))
            .collect(),
    }
}

pub fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

pub fn inverse_gray(mut g: usize) -> usize {
    let mut k = g;
    while g > 0 {
        g >>= 1;
        k ^= g;
    }
    k
}

/// `argmin_{t,j} ‖y - h_t χ_j‖²` with 0-based indices; ties go to the lowest
/// `(t, j)` in lexicographic order.
pub fn ml_detect(y: &[Complex64], h: &ChannelRealization, symbols: &[Complex64]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_metric = f64::INFINITY;
    for t in 0..h.n_t {
        for (j, &x) in symbols.iter().enumerate() {
            let mut metric = 0.0;
            for (rx, &yr) in y.iter().enumerate() {
                metric += (yr - h.get(rx, t) * x).norm_sqr();
                if metric >= best_metric {
                    break;
                }
            }
            if metric < best_metric {
                best_metric = metric;
                best = (t, j);
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    bits: u64,
    errors: u64,
}

fn run_chunk(cfg: &SystemConfig, sampler: &EnvelopeSampler, symbols: &[Complex64], noise_std: f64, seed: u64, chunk: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let ant_bits = cfg.n_t.trailing_zeros();
    let sym_bits = symbols.len().trailing_zeros();
    let mut y = vec![Complex64::new(0.0, 0.0); cfg.n_r];
    let mut tally = Tally::default();
    for _ in 0..CHUNK_TRIALS {
        let h = ChannelRealization::draw(sampler, cfg.n_r, cfg.n_t, &mut rng);
        let antenna = rng.random_range(0..cfg.n_t);
        let label = rng.random_range(0..symbols.len());
        let x = symbols[inverse_gray(label)];
        for (rx, yr) in y.iter_mut().enumerate() {
            let n = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
            *yr = h.get(rx, antenna) * x + n * noise_std;
        }
        let (t_hat, k_hat) = ml_detect(&y, &h, symbols);
        tally.errors += ((antenna ^ t_hat).count_ones() + (label ^ gray(k_hat)).count_ones()) as u64;
        tally.bits += (ant_bits + sym_bits) as u64;
    }
    tally
}

/// Bit error rate at one SNR point; see the module docs for the conventions.
pub fn simulate_ber(cfg: &SystemConfig, pt: SnrPoint, stop: StopRule, seed: u64) -> BerEstimate {
    let sampler = EnvelopeSampler::new(&cfg.family);
    let symbols = constellation(cfg);
    let noise_std = 10f64.powf(-pt.es_over_n0_db / 20.0);
    let batch = (rayon::current_num_threads() as u64 * 4).max(4);
    let mut total = Tally::default();
    let mut next = 0u64;
    loop {
        let tallies: Vec<Tally> = (next..next + batch)
            .into_par_iter()
            .map(|k| run_chunk(cfg, &sampler, &symbols, noise_std, seed, k))
            .collect();
        for t in tallies {
            total.bits += t.bits;
            total.errors += t.errors;
            if total.errors >= stop.min_bit_errors || total.bits >= stop.max_bits {
                return BerEstimate::from_counts(pt, total.bits, total.errors);
            }
        }
        next += batch;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::FadingFamily;

    fn rayleigh() -> FadingFamily {
        FadingFamily::nakagami(1.0, 1.0).unwrap()
    }

    #[test]
    fn gray_roundtrip_and_adjacency() {
        for k in 0..64 {
            assert_eq!(inverse_gray(gray(k)), k);
            assert_eq!((gray(k) ^ gray((k + 1) % 64)).count_ones(), 1);
        }
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(50, 1000);
        assert!(lo < 0.05 && 0.05 < hi);
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let e = BerEstimate::from_counts(SnrPoint::from_db(0.0), 1000, 0);
        assert!(e.upper_bound_only);
    }

    #[test]
    fn noiseless_detection_recovers_transmission() {
        let cfg = SystemConfig::sm(4, 2, 4, 1.0, rayleigh()).unwrap();
        let symbols = constellation(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = ChannelRealization::draw(&EnvelopeSampler::new(&cfg.family), 2, 4, &mut rng);
        let y: Vec<Complex64> = (0..2).map(|rx| h.get(rx, 2) * symbols[1]).collect();
        assert_eq!(ml_detect(&y, &h, &symbols), (2, 1));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let h = ChannelRealization {
            n_r: 1,
            n_t: 2,
            gains: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        };
        let cfg = SystemConfig::sm(2, 1, 4, 1.0, rayleigh()).unwrap();
        assert_eq!(ml_detect(&[Complex64::new(0.0, 0.0)], &h, &constellation(&cfg)), (0, 0));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = SystemConfig::ssk(4, 1, rayleigh()).unwrap();
        let stop = StopRule {
            min_bit_errors: 100,
            max_bits: 1_000_000,
        };
        let a = simulate_ber(&cfg, SnrPoint::from_db(8.0), stop, 11);
        let b = simulate_ber(&cfg, SnrPoint::from_db(8.0), stop, 11);
        assert_eq!(a, b);
        let c = simulate_ber(&cfg, SnrPoint::from_db(8.0), stop, 12);
        assert_ne!(a.bit_errors, 0);
        assert!(a != c);
    }

    #[test]
    fn very_low_snr_is_a_coin_flip() {
        let cfg = SystemConfig::sm(4, 2, 4, 1.0, rayleigh()).unwrap();
        let e = simulate_ber(&cfg, SnrPoint::from_db(-40.0), StopRule { min_bit_errors: 20_000, max_bits: 1 << 30 }, 0);
        assert!((e.ber - 0.5).abs() < 3.0 * e.sigma() + 2e-3, "{e:?}");
    }
}
