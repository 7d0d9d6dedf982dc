//! Log-gamma on the complex plane.
//!
//! Lanczos approximation (g = 7, nine coefficients) for `Re z >= 0.5`, reflection
//! formula below that. Every closed form in the crate is a ratio of gamma products,
//! so all of them are assembled in the log domain.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal-branch `log Γ(z)`.
///
/// Fails with [`Error::Domain`] at the poles `z = 0, -1, -2, ...`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Domain(format!("log-gamma pole at z = {}", z.re)));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log-gamma of non-finite z = {z}")));
    }
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.0 && z.re < 0.5 {
        // one upward step keeps the branch continuous across the right half-plane
        ln_gamma_lanczos(z + 1.0) - z.ln()
    } else if z.re < 0.0 {
        // log Γ(z) = log π - log sin(πz) - log Γ(1 - z)
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z)
    } else {
        ln_gamma_lanczos(z)
    }
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let w = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (w + k as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    HALF_LN_2PI + (w + 0.5) * t.ln() - t + series.ln()
}

/// `log sin(πz)` without overflowing for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (e^{iπz} - e^{-iπz}) / 2i; keep only the dominant exponential.
    if z.im > 0.0 {
        let lead = -i * PI * z; // log e^{-iπz}
        let rest = Complex64::new(1.0, 0.0) - (2.0 * i * PI * z).exp();
        lead + rest.ln() - (-2.0 * i).ln()
    } else {
        let lead = i * PI * z;
        let rest = Complex64::new(1.0, 0.0) - (-2.0 * i * PI * z).exp();
        lead + rest.ln() - (2.0 * i).ln()
    }
}

/// `log Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("real log-gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(Complex64::new(x, 0.0)).re)
}

/// `Γ(x)` for any real `x` that is not a pole (may be negative).
pub fn gamma_real(x: f64) -> Result<f64> {
    let (ln_abs, sign) = ln_gamma_signed(x)?;
    Ok(sign * ln_abs.exp())
}

/// `(log |Γ(x)|, sign Γ(x))` for real non-pole `x`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    let z = ln_gamma(Complex64::new(x, 0.0))?;
    // Imaginary part is a multiple of π; odd multiples carry a negative sign.
    let k = (z.im / PI).round() as i64;
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok((z.re, sign))
}

/// `1/Γ(z)`, entire; exactly zero at the poles of `Γ`.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        Complex64::new(0.0, 0.0)
    } else {
        (-ln_gamma_unchecked(z)).exp()
    }
}
