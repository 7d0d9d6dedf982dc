//! Fox H and Meijer G functions of a positive real argument.
//!
//! `H(x) = (1/2πi) ∫ Θ(s) x^{-s} ds` along the vertical line `Re s = c`, with
//!
//! ```text
//! Θ(s) = Π_{j<m} Γ(b_j + β_j s) Π_{j<n} Γ(1 - a_j - α_j s)
//!        / [ Π_{j>=m} Γ(1 - b_j - β_j s) Π_{j>=n} Γ(a_j + α_j s) ]
//! ```
//!
//! For real parameters `Θ(conj s) = conj Θ(s)`, so only the upper half-line is
//! sampled: `H(x) = (1/π) ∫_0^∞ Re[Θ(c+it) x^{-c-it}] dt`. The trapezoidal rule on
//! that line converges geometrically in the distance to the nearest pole; the step
//! is halved and the truncation point doubled until both the step-refinement delta
//! and the tail fall below the requested tolerance.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::ln_gamma;
use super::Evaluated;
use crate::error::{Error, Result};

pub const DEFAULT_FOX_TOL: f64 = 1e-8;

const INITIAL_STEP: f64 = 0.05;
const INITIAL_SPAN: f64 = 8.0;
const MAX_SPAN: f64 = 4096.0;
const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FoxHSpec {
    m: usize,
    n: usize,
    /// (a_j, α_j), length p
    upper: Vec<(f64, f64)>,
    /// (b_j, β_j), length q
    lower: Vec<(f64, f64)>,
}

impl FoxHSpec {
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        if m > lower.len() || n > upper.len() {
            return Err(Error::InvalidParameter(format!(
                "H^{{{m},{n}}}_{{{},{}}}: need m <= q and n <= p",
                upper.len(),
                lower.len()
            )));
        }
        for &(v, scale) in upper.iter().chain(lower.iter()) {
            if !(scale > 0.0) || !scale.is_finite() || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "Fox H coefficient ({v}, {scale}): scale must be positive and finite"
                )));
            }
        }
        Ok(FoxHSpec { m, n, upper, lower })
    }

    pub fn orders(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n, self.upper.len(), self.lower.len())
    }

    pub fn upper(&self) -> &[(f64, f64)] {
        &self.upper
    }

    pub fn lower(&self) -> &[(f64, f64)] {
        &self.lower
    }

    /// Open interval of admissible `Re s`: right of every pole of `Γ(b_j + β_j s)`,
    /// left of every pole of `Γ(1 - a_j - α_j s)`.
    pub fn contour_strip(&self) -> Result<(f64, f64)> {
        let left = self.lower[..self.m]
            .iter()
            .map(|&(b, beta)| -b / beta)
            .fold(f64::NEG_INFINITY, f64::max);
        let right = self.upper[..self.n]
            .iter()
            .map(|&(a, alpha)| (1.0 - a) / alpha)
            .fold(f64::INFINITY, f64::min);
        if left < right {
            Ok((left, right))
        } else {
            Err(Error::Contour {
                left_bound: left,
                right_bound: right,
            })
        }
    }

    /// Line position used by [`fox_h`]: midpoint of the strip, or one unit inside
    /// a half-infinite strip.
    pub fn default_contour(&self) -> Result<f64> {
        let (l, r) = self.contour_strip()?;
        Ok(match (l.is_finite(), r.is_finite()) {
            (true, true) => 0.5 * (l + r),
            (true, false) => l + 1.0,
            (false, true) => r - 1.0,
            (false, false) => 0.0,
        })
    }

    /// Exponential decay rate parameter: `|Θ(c+it)| ~ exp(-π δ |t| / 2)`.
    pub fn decay_rate(&self) -> f64 {
        let (m, n) = (self.m, self.n);
        let lower_sum: f64 = self.lower[..m].iter().map(|p| p.1).sum::<f64>()
            - self.lower[m..].iter().map(|p| p.1).sum::<f64>();
        let upper_sum: f64 = self.upper[..n].iter().map(|p| p.1).sum::<f64>()
            - self.upper[n..].iter().map(|p| p.1).sum::<f64>();
        lower_sum + upper_sum
    }

    /// `log(Θ(s) x^{-s})`, or `None` where a denominator gamma has a pole (value zero).
    fn ln_integrand(&self, s: Complex64, ln_x: f64) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = -s * ln_x;
        for (j, &(b, beta)) in self.lower.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma(b + beta * s).ok()?;
            } else {
                match ln_gamma(one - b - beta * s) {
                    Ok(v) => acc -= v,
                    Err(_) => return None,
                }
            }
        }
        for (j, &(a, alpha)) in self.upper.iter().enumerate() {
            if j < self.n {
                acc += ln_gamma(one - a - alpha * s).ok()?;
            } else {
                match ln_gamma(a + alpha * s) {
                    Ok(v) => acc -= v,
                    Err(_) => return None,
                }
            }
        }
        Some(acc)
    }

    fn integrand(&self, c: f64, t: f64, ln_x: f64, ln_prefactor: f64) -> f64 {
        match self.ln_integrand(Complex64::new(c, t), ln_x) {
            Some(l) => {
                let l = l + ln_prefactor;
                if l.re < -745.0 {
                    0.0
                } else {
                    l.exp().re
                }
            }
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    m: usize,
    n: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, upper: Vec<f64>, lower: Vec<f64>) -> Result<Self> {
        // validation is shared with the Fox H form
        let spec = MeijerGSpec { m, n, upper, lower };
        spec.to_fox()?;
        Ok(spec)
    }

    pub fn to_fox(&self) -> Result<FoxHSpec> {
        FoxHSpec::new(
            self.m,
            self.n,
            self.upper.iter().map(|&a| (a, 1.0)).collect(),
            self.lower.iter().map(|&b| (b, 1.0)).collect(),
        )
    }
}

/// `H(x)` on the line `Re s = c`, which must lie strictly inside the contour strip.
pub fn fox_h_on_line(spec: &FoxHSpec, x: f64, c: f64, tol: f64) -> Result<Evaluated> {
    let (left, right) = spec.contour_strip()?;
    if !(c > left && c < right) {
        return Err(Error::Contour {
            left_bound: left.max(c),
            right_bound: right.min(c),
        });
    }
    let gap = (c - left).min(right - c);
    mellin_barnes_line(spec, x, c, gap, 0.0, tol)
}

/// `(1/2πi) ∫ Θ(s) x^{-s} ds` on `Re s = c` without the strip check.
///
/// `pole_distance` is the distance from the line to the nearest pole of `Θ`; it
/// sets the initial step. Callers that move the line across poles add the crossed
/// residues themselves. `ln_prefactor` is added to the log of the integrand so
/// that huge gamma products can be normalized before exponentiation.
pub fn mellin_barnes_line(
    spec: &FoxHSpec,
    x: f64,
    c: f64,
    pole_distance: f64,
    ln_prefactor: f64,
    tol: f64,
) -> Result<Evaluated> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Fox H argument must be positive and finite, got {x}")));
    }
    if spec.decay_rate() <= 0.0 {
        return Err(Error::Convergence {
            what: format!(
                "Mellin-Barnes integrand does not decay (δ = {}); contour quadrature unsupported",
                spec.decay_rate()
            ),
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    let ln_x = x.ln();
    let mut h = INITIAL_STEP.min(pole_distance.min(1.0) / 4.0);
    let f = |t: f64| spec.integrand(c, t, ln_x, ln_prefactor);

    // samples f(k h), k = 0..=count
    let mut samples: Vec<f64> = Vec::new();
    let mut span = INITIAL_SPAN;
    let extend = |samples: &mut Vec<f64>, h: f64, upto: f64| {
        let count = (upto / h).ceil() as usize;
        for k in samples.len()..=count {
            samples.push(f(k as f64 * h));
        }
    };
    let trapezoid = |samples: &[f64], h: f64| -> (f64, f64) {
        let mut sum = 0.5 * samples[0];
        let mut abs = 0.5 * samples[0].abs();
        for &v in &samples[1..] {
            sum += v;
            abs += v.abs();
        }
        (sum * h / PI, abs * h / PI)
    };

    extend(&mut samples, h, span);
    // grow the truncation point until the next doubling adds nothing significant
    loop {
        let (inner, _) = trapezoid(&samples, h);
        let before = samples.len();
        extend(&mut samples, h, 2.0 * span);
        let tail_abs: f64 = samples[before..].iter().map(|v| v.abs()).sum::<f64>() * h / PI;
        let (_, l1) = trapezoid(&samples, h);
        span *= 2.0;
        if tail_abs <= 0.1 * tol * inner.abs() || tail_abs <= 1e-16 * l1 {
            break;
        }
        if span >= MAX_SPAN {
            return Err(Error::Convergence {
                what: format!("Mellin-Barnes tail still {tail_abs:e} at |Im s| = {span}"),
                estimate: inner,
                error: tail_abs,
            });
        }
    }

    let (mut value, mut l1) = trapezoid(&samples, h);
    for _ in 0..MAX_HALVINGS {
        // refine: add midpoints
        let n = samples.len();
        let mut mid_sum = 0.0;
        let mut mid_abs = 0.0;
        let mut refined = Vec::with_capacity(2 * n - 1);
        for k in 0..n - 1 {
            let v = f((k as f64 + 0.5) * h);
            mid_sum += v;
            mid_abs += v.abs();
            refined.push(samples[k]);
            refined.push(v);
        }
        refined.push(samples[n - 1]);
        let new_value = 0.5 * value + mid_sum * h / (2.0 * PI);
        l1 = 0.5 * l1 + mid_abs * h / (2.0 * PI);
        let delta = (new_value - value).abs();
        samples = refined;
        h *= 0.5;
        value = new_value;
        let floor = 64.0 * f64::EPSILON * l1;
        if delta <= tol * value.abs() || delta <= floor {
            let achieved = if value == 0.0 { f64::INFINITY } else { delta.max(floor) / value.abs() };
            return Ok(Evaluated { value, tol: achieved });
        }
    }
    Err(Error::Convergence {
        what: format!("Mellin-Barnes step refinement at x = {x}, contour Re s = {c}"),
        estimate: value,
        error: f64::NAN,
    })
}

/// `H(x)` at the default relative tolerance on the default contour.
pub fn fox_h(spec: &FoxHSpec, x: f64) -> Result<Evaluated> {
    fox_h_with_tol(spec, x, DEFAULT_FOX_TOL)
}

pub fn fox_h_with_tol(spec: &FoxHSpec, x: f64, tol: f64) -> Result<Evaluated> {
    let c = spec.default_contour()?;
    fox_h_on_line(spec, x, c, tol)
}

/// Meijer G through the Fox H evaluator with unit scales.
pub fn meijer_g(spec: &MeijerGSpec, x: f64) -> Result<Evaluated> {
    fox_h(&spec.to_fox()?, x)
}
