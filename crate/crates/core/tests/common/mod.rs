#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use smperf::fading::{BranchPair, EnvelopeSampler, FadingFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn random_nakagami(rng: &mut ChaCha8Rng) -> FadingFamily {
    FadingFamily::nakagami(uniform(rng, 0.75, 4.0), uniform(rng, 0.3, 3.0)).unwrap()
}

pub fn random_gk(rng: &mut ChaCha8Rng) -> FadingFamily {
    FadingFamily::generalized_k(uniform(rng, 0.75, 4.0), uniform(rng, 0.75, 40.0), uniform(rng, 0.3, 3.0)).unwrap()
}

/// EGK links whose kernels decay at least like `R^{-1.6}`.
pub fn random_egk(rng: &mut ChaCha8Rng) -> FadingFamily {
    loop {
        let m = uniform(rng, 0.6, 4.0);
        let beta = uniform(rng, 0.8, 5.0);
        let ms = uniform(rng, 0.6, 6.0);
        let betas = uniform(rng, 0.8, 5.0);
        if m * beta / 2.0 >= 0.8 && ms * betas / 2.0 >= 0.8 {
            return FadingFamily::egk(m, beta, ms, betas, uniform(rng, 0.3, 3.0)).unwrap();
        }
    }
}

/// `e^{-x} I₀(x)` for `x >= 0`.
pub fn i0e(x: f64) -> f64 {
    if x < 15.0 {
        // Σ (x²/4)^k / (k!)²
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Hankel expansion
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let kf = (2 * k - 1) as f64;
            term *= kf * kf / (8.0 * x * k as f64);
            sum += term;
            if term < 1e-17 {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Monte Carlo `E[e^{-sZ}]` with the phase average done exactly:
/// `E_φ[e^{-s|a₂e^{jφ} - a₁|²}] = e^{-s(a₁ - a₂)²} · e^{-2sa₁a₂} I₀(2 s a₁ a₂)`.
/// Returns (mean, standard error).
pub fn mc_mgf_z(pair: &BranchPair, s: f64, n: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let s1 = EnvelopeSampler::new(&pair.first);
    let s2 = EnvelopeSampler::new(&pair.second);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..n {
        let a1 = s1.sample(rng);
        let a2 = s2.sample(rng);
        let v = (-s * (a1 - a2).powi(2)).exp() * i0e(2.0 * s * a1 * a2);
        sum += v;
        sum2 += v * v;
    }
    let mean = sum / n as f64;
    let var = (sum2 / n as f64 - mean * mean).max(0.0);
    (mean, (var / n as f64).sqrt())
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// SNR (dB) where a log-linear interpolation of the curve crosses `target`.
pub fn crossing_db(db: &[f64], ber: &[f64], target: f64) -> Option<f64> {
    let lt = target.log10();
    for i in 1..db.len() {
        let (l0, l1) = (ber[i - 1].log10(), ber[i].log10());
        if (l0 - lt) * (l1 - lt) <= 0.0 && l0 != l1 {
            return Some(db[i - 1] + (lt - l0) / (l1 - l0) * (db[i] - db[i - 1]));
        }
    }
    None
}
