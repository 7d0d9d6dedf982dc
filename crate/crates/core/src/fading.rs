//! Link fading models: Extended Generalized-K (EGK), Generalized-K, Nakagami-m.
//!
//! The EGK power is built as a product of two generalized-gamma factors,
//!
//! ```text
//! a² = Ω · (G_f^{2/β} / b) · (G_s^{2/β_s} / b_s),   G_f ~ Gamma(m, 1), G_s ~ Gamma(m_s, 1)
//! b = Γ(m + 2/β) / Γ(m),  b_s = Γ(m_s + 2/β_s) / Γ(m_s)
//! ```
//!
//! so that `E[a²] = Ω`. Generalized-K is the `β = β_s = 2` member; Nakagami-m is
//! kept as its own exact family (a single gamma factor) rather than a large-`m_s`
//! surrogate.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::specfun::{ln_gamma_real, mellin_barnes_line, Evaluated, FoxHSpec};

/// Relative tolerance of each Hankel-kernel evaluation.
pub const KERNEL_TOL: f64 = 1e-9;

/// EGK link parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgkLinkParams {
    m: f64,
    beta: f64,
    m_s: f64,
    beta_s: f64,
    omega: f64,
}

impl EgkLinkParams {
    pub fn new(m: f64, beta: f64, m_s: f64, beta_s: f64, omega: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite();
        if !(ok(m) && m > 0.5) {
            return Err(Error::InvalidParameter(format!("fading severity m = {m} must exceed 0.5")));
        }
        if !(ok(m_s) && m_s > 0.5) {
            return Err(Error::InvalidParameter(format!(
                "shadowing severity m_s = {m_s} must exceed 0.5"
            )));
        }
        if !(ok(beta) && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("fading shaping factor beta = {beta} must be > 0")));
        }
        if !(ok(beta_s) && beta_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shadowing shaping factor beta_s = {beta_s} must be > 0"
            )));
        }
        if !(ok(omega) && omega > 0.0) {
            return Err(Error::InvalidParameter(format!("mean power omega = {omega} must be > 0")));
        }
        let p = EgkLinkParams {
            m,
            beta,
            m_s,
            beta_s,
            omega,
        };
        let (b, b_s) = (p.b(), p.b_s());
        if !(b.is_finite() && b > 0.0 && b_s.is_finite() && b_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "normalizers b = {b}, b_s = {b_s} are not finite and positive"
            )));
        }
        Ok(p)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn m_s(&self) -> f64 {
        self.m_s
    }
    pub fn beta_s(&self) -> f64 {
        self.beta_s
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `Γ(m + 2/β) / Γ(m)`
    pub fn b(&self) -> f64 {
        gamma_shift_ratio(self.m, 2.0 / self.beta)
    }

    /// `Γ(m_s + 2/β_s) / Γ(m_s)`
    pub fn b_s(&self) -> f64 {
        gamma_shift_ratio(self.m_s, 2.0 / self.beta_s)
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        EgkLinkParams::new(self.m, self.beta, self.m_s, self.beta_s, omega)
    }
}

fn gamma_shift_ratio(x: f64, shift: f64) -> f64 {
    (ln_gamma_real(x + shift).expect("x > 0") - ln_gamma_real(x).expect("x > 0")).exp()
}

/// Fading family of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingFamily {
    Nakagami { m: f64, omega: f64 },
    GeneralizedK { m: f64, m_s: f64, omega: f64 },
    Egk(EgkLinkParams),
}

impl FadingFamily {
    pub fn nakagami(m: f64, omega: f64) -> Result<Self> {
        // validate through the EGK constructor; m_s and shaping factors are placeholders
        EgkLinkParams::new(m, 2.0, 1.0, 2.0, omega)?;
        Ok(FadingFamily::Nakagami { m, omega })
    }

    pub fn generalized_k(m: f64, m_s: f64, omega: f64) -> Result<Self> {
        EgkLinkParams::new(m, 2.0, m_s, 2.0, omega)?;
        Ok(FadingFamily::GeneralizedK { m, m_s, omega })
    }

    pub fn egk(m: f64, beta: f64, m_s: f64, beta_s: f64, omega: f64) -> Result<Self> {
        Ok(FadingFamily::Egk(EgkLinkParams::new(m, beta, m_s, beta_s, omega)?))
    }

    pub fn omega(&self) -> f64 {
        match *self {
            FadingFamily::Nakagami { omega, .. } | FadingFamily::GeneralizedK { omega, .. } => omega,
            FadingFamily::Egk(p) => p.omega,
        }
    }

    /// Fading severity `m`.
    pub fn m(&self) -> f64 {
        match *self {
            FadingFamily::Nakagami { m, .. } | FadingFamily::GeneralizedK { m, .. } => m,
            FadingFamily::Egk(p) => p.m,
        }
    }

    /// Same family with the mean power replaced.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        match *self {
            FadingFamily::Nakagami { m, .. } => FadingFamily::nakagami(m, omega),
            FadingFamily::GeneralizedK { m, m_s, .. } => FadingFamily::generalized_k(m, m_s, omega),
            FadingFamily::Egk(p) => Ok(FadingFamily::Egk(p.with_omega(omega)?)),
        }
    }

    /// Exact EGK form (`β = β_s = 2` for Generalized-K). Nakagami has none.
    pub fn to_egk(&self) -> Option<EgkLinkParams> {
        match *self {
            FadingFamily::Nakagami { .. } => None,
            FadingFamily::GeneralizedK { m, m_s, omega } => {
                Some(EgkLinkParams::new(m, 2.0, m_s, 2.0, omega).expect("validated at construction"))
            }
            FadingFamily::Egk(p) => Some(p),
        }
    }

    /// Generalized-K view: the GK family itself, or an EGK member with both shaping
    /// factors equal to 2.
    pub fn as_generalized_k(&self) -> Option<(f64, f64, f64)> {
        match *self {
            FadingFamily::GeneralizedK { m, m_s, omega } => Some((m, m_s, omega)),
            FadingFamily::Egk(p) if p.beta == 2.0 && p.beta_s == 2.0 => Some((p.m, p.m_s, p.omega)),
            _ => None,
        }
    }

    /// Large-`m_s` EGK surrogate of a Nakagami link (limit tests only).
    pub fn nakagami_surrogate(m: f64, omega: f64, m_s: f64) -> Result<Self> {
        FadingFamily::egk(m, 2.0, m_s, 2.0, omega)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FadingFamily::Nakagami { .. } => "nakagami",
            FadingFamily::GeneralizedK { .. } => "gk",
            FadingFamily::Egk(_) => "egk",
        }
    }

    /// `L` such that the kernel decays like `R^{-2L}`: the right edge of the left
    /// pole set of the Mellin-Barnes integrand is at `-L`.
    pub fn kernel_decay_order(&self) -> f64 {
        match *self {
            FadingFamily::Nakagami { m, .. } => m,
            FadingFamily::GeneralizedK { m, m_s, .. } => m.min(m_s),
            FadingFamily::Egk(p) => (p.m * p.beta / 2.0).min(p.m_s * p.beta_s / 2.0),
        }
    }

    /// Mellin-Barnes data of the kernel: spec, scale such that `x = scale / R²`,
    /// and `log` of the normalizing gamma product.
    fn kernel_mellin(&self) -> (FoxHSpec, f64, f64) {
        let unit = vec![(1.0, 1.0), (1.0, 1.0)];
        match *self {
            FadingFamily::Nakagami { m, omega } => {
                let spec = FoxHSpec::new(1, 1, unit, vec![(m, 1.0)]).expect("valid kernel spec");
                (spec, 4.0 * m / omega, ln_gamma_real(m).expect("m > 0"))
            }
            _ => {
                let p = self.to_egk().expect("EGK form exists");
                let spec = FoxHSpec::new(2, 1, unit, vec![(p.m, 2.0 / p.beta), (p.m_s, 2.0 / p.beta_s)])
                    .expect("valid kernel spec");
                let norm = ln_gamma_real(p.m).expect("m > 0") + ln_gamma_real(p.m_s).expect("m_s > 0");
                (spec, 4.0 * p.b() * p.b_s() / p.omega, norm)
            }
        }
    }
}

/// Zeroth-order Hankel transform of `f_a(r)/r`, i.e. `E[J₀(R a)]`, from its Fox H
/// closed form.
///
/// The Mellin-Barnes integrand is `Θ(s) = Γ(m + 2s/β) Γ(m_s + 2s/β_s) Γ(-s) / Γ(1 + s)`
/// (without the shadowing factor for Nakagami). For `x = scale/R² < 1` the line sits
/// midway between the left poles and the pole at `s = 0`. For `x >= 1` the line is
/// moved to `Re s = 1/2`, past the pole at the origin whose residue contributes the
/// leading `1`; the remaining integral is `O(x^{-1/2})` and free of cancellation.
pub fn hankel_kernel(family: &FadingFamily, r_freq: f64) -> Result<Evaluated> {
    if !(r_freq >= 0.0) || !r_freq.is_finite() {
        return Err(Error::Domain(format!("Hankel frequency must be finite and >= 0, got {r_freq}")));
    }
    if r_freq == 0.0 {
        return Ok(Evaluated { value: 1.0, tol: 0.0 });
    }
    if let FadingFamily::Nakagami { m, omega } = *family {
        if m == m.round() && m <= 8.0 {
            // 1F1(m; 1; -x) = e^{-x} L_{m-1}(x)
            let x = r_freq * r_freq * omega / (4.0 * m);
            return Ok(Evaluated {
                value: (-x).exp() * laguerre(m as usize - 1, x),
                tol: 1e-14,
            });
        }
    }
    kernel_by_contour(family, r_freq)
}

fn kernel_by_contour(family: &FadingFamily, r_freq: f64) -> Result<Evaluated> {
    let (spec, scale, ln_norm) = family.kernel_mellin();
    let x = scale / (r_freq * r_freq);
    if !x.is_finite() || x > 1e300 {
        return Ok(Evaluated { value: 1.0, tol: f64::EPSILON });
    }
    if x >= 1.0 {
        let line = mellin_barnes_line(&spec, x, 0.5, 0.5, -ln_norm, KERNEL_TOL)?;
        let rest = line.value;
        let value = 1.0 + rest;
        Ok(Evaluated {
            value,
            tol: (rest.abs() * line.tol + f64::EPSILON) / value.abs().max(f64::MIN_POSITIVE),
        })
    } else {
        let order = family.kernel_decay_order();
        let c = -0.5 * order.min(2.0);
        let dist = (c + order).min(-c);
        let line = mellin_barnes_line(&spec, x, c, dist, -ln_norm, KERNEL_TOL)?;
        Ok(Evaluated {
            value: line.value,
            tol: line.tol,
        })
    }
}

fn laguerre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, 1.0 - x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Draws link envelopes of one family; precomputes the gamma distributions.
#[derive(Debug, Clone)]
pub struct EnvelopeSampler {
    fading: Gamma<f64>,
    shadowing: Option<Gamma<f64>>,
    fading_exp: f64,
    shadowing_exp: f64,
    scale: f64,
}

impl EnvelopeSampler {
    pub fn new(family: &FadingFamily) -> Self {
        match *family {
            FadingFamily::Nakagami { m, omega } => EnvelopeSampler {
                fading: Gamma::new(m, 1.0).expect("m > 0.5"),
                shadowing: None,
                fading_exp: 1.0,
                shadowing_exp: 1.0,
                scale: omega / m,
            },
            _ => {
                let p = family.to_egk().expect("EGK form exists");
                EnvelopeSampler {
                    fading: Gamma::new(p.m, 1.0).expect("m > 0.5"),
                    shadowing: Some(Gamma::new(p.m_s, 1.0).expect("m_s > 0.5")),
                    fading_exp: 2.0 / p.beta,
                    shadowing_exp: 2.0 / p.beta_s,
                    scale: p.omega / (p.b() * p.b_s()),
                }
            }
        }
    }

    /// One draw of the squared envelope `a²`.
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g_f = self.fading.sample(rng);
        let mut power = self.scale * g_f.powf(self.fading_exp);
        if let Some(sh) = &self.shadowing {
            power *= sh.sample(rng).powf(self.shadowing_exp);
        }
        power
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_power(rng).sqrt()
    }
}

/// One envelope draw `a` with `E[a²] = Ω`.
pub fn sample_envelope<R: Rng + ?Sized>(family: &FadingFamily, rng: &mut R) -> f64 {
    EnvelopeSampler::new(family).sample(rng)
}

/// Uniform phase on `[0, 2π)`.
pub fn sample_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * 2.0 * PI
}

/// Log-space integration range `[u_lo, u_hi]` holding all but ~1e-30 of the
/// mass of `Gamma(shape, 1)` in the variable `u = ln g`.
fn gamma_log_range(shape: f64) -> (f64, f64) {
    let lo = ((1e-30f64).ln() + ln_gamma_real(shape + 1.0).expect("shape > 0")) / shape;
    let hi = (shape + 50.0 * shape.sqrt() + 80.0).ln();
    (lo, hi)
}

/// `E[h(G)]` for `G ~ Gamma(shape, 1)` by adaptive quadrature in `ln G`.
fn gamma_expectation<F: FnMut(f64) -> f64>(shape: f64, mut h: F, rel_tol: f64) -> Result<f64> {
    let (lo, hi) = gamma_log_range(shape);
    let ln_norm = ln_gamma_real(shape)?;
    let r = integrate_adaptive(
        |u: f64| {
            let g = u.exp();
            let w = (shape * u - g - ln_norm).exp();
            if w == 0.0 {
                0.0
            } else {
                w * h(g)
            }
        },
        lo,
        hi,
        rel_tol,
        0.0,
        4000,
    )?;
    Ok(r.value)
}

/// `E[exp(-s · γ̄ · a²)]`, the MGF of the instantaneous link SNR `γ̄ a²`.
pub fn mgf_link_snr(family: &FadingFamily, gamma_bar: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !(gamma_bar > 0.0) {
        return Err(Error::Domain(format!("MGF needs s >= 0 and gamma_bar > 0 (s = {s}, gamma_bar = {gamma_bar})")));
    }
    let k = s * gamma_bar;
    if k == 0.0 {
        return Ok(1.0);
    }
    const TOL: f64 = 1e-10;
    match *family {
        FadingFamily::Nakagami { m, omega } => Ok((1.0 + k * omega / m).powf(-m)),
        _ => {
            let p = family.to_egk().expect("EGK form exists");
            let (b, b_s) = (p.b(), p.b_s());
            let k = k * p.omega / (b * b_s);
            let shadow_exp = 2.0 / p.beta_s;
            if p.beta == 2.0 {
                // fading factor integrates in closed form: E[exp(-t G_f)] = (1 + t)^{-m}
                gamma_expectation(p.m_s, |g_s| (1.0 + k * g_s.powf(shadow_exp)).powf(-p.m), TOL)
            } else {
                let fade_exp = 2.0 / p.beta;
                let mut failure = None;
                let v = gamma_expectation(
                    p.m_s,
                    |g_s| {
                        let t = k * g_s.powf(shadow_exp);
                        match gamma_expectation(p.m, |g_f| (-t * g_f.powf(fade_exp)).exp(), TOL) {
                            Ok(v) => v,
                            Err(e) => {
                                failure = Some(e);
                                0.0
                            }
                        }
                    },
                    TOL,
                )?;
                match failure {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            }
        }
    }
}

/// High-SNR form of the link-power MGF: `E[exp(-k a²)] ~ coef · k^{-order} · (ln k)^{log_power}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMgfAsymptote {
    pub coef: f64,
    pub order: f64,
    pub log_power: i32,
}

impl PowerMgfAsymptote {
    pub fn eval(&self, k: f64) -> f64 {
        self.coef * k.powf(-self.order) * k.ln().powi(self.log_power)
    }
}

/// Leading small-power behavior of the link power density, turned into the
/// large-argument MGF asymptote.
pub fn power_mgf_asymptote(family: &FadingFamily) -> PowerMgfAsymptote {
    match *family {
        FadingFamily::Nakagami { m, omega } => PowerMgfAsymptote {
            coef: (m / omega).powf(m),
            order: m,
            log_power: 0,
        },
        _ => {
            let p = family.to_egk().expect("EGK form exists");
            let (b, b_s) = (p.b(), p.b_s());
            let lg = |x: f64| ln_gamma_real(x).expect("positive");
            // density of U = G_f^{2/β}/b near zero: k_u u^{d_u - 1}
            let d_u = p.m * p.beta / 2.0;
            let d_v = p.m_s * p.beta_s / 2.0;
            let ln_k_u = (p.beta / 2.0).ln() + d_u * b.ln() - lg(p.m);
            let ln_k_v = (p.beta_s / 2.0).ln() + d_v * b_s.ln() - lg(p.m_s);
            if (d_u - d_v).abs() <= 1e-12 * d_u.max(d_v) {
                let d = d_u;
                PowerMgfAsymptote {
                    coef: (ln_k_u + ln_k_v - d * p.omega.ln() + lg(d)).exp(),
                    order: d,
                    log_power: 1,
                }
            } else if d_u < d_v {
                // E[V^{-d_u}] = b_s^{d_u} Γ(m_s - 2 d_u/β_s) / Γ(m_s)
                let ln_moment = d_u * b_s.ln() + lg(p.m_s - 2.0 * d_u / p.beta_s) - lg(p.m_s);
                PowerMgfAsymptote {
                    coef: (ln_k_u - d_u * p.omega.ln() + ln_moment + lg(d_u)).exp(),
                    order: d_u,
                    log_power: 0,
                }
            } else {
                let ln_moment = d_v * b.ln() + lg(p.m - 2.0 * d_v / p.beta) - lg(p.m);
                PowerMgfAsymptote {
                    coef: (ln_k_v - d_v * p.omega.ln() + ln_moment + lg(d_v)).exp(),
                    order: d_v,
                    log_power: 0,
                }
            }
        }
    }
}

/// The two links `(i = 1, 2)` whose complex gains are subtracted in `Z = |z₂ - z₁|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPair {
    pub first: FadingFamily,
    pub second: FadingFamily,
}

impl BranchPair {
    pub fn new(first: FadingFamily, second: FadingFamily) -> Self {
        BranchPair { first, second }
    }

    /// Both links drawn from the same family (i.i.d. fading).
    pub fn iid(family: FadingFamily) -> Self {
        BranchPair {
            first: family,
            second: family,
        }
    }

    pub fn swapped(&self) -> Self {
        BranchPair {
            first: self.second,
            second: self.first,
        }
    }

    pub fn is_identical(&self) -> bool {
        self.first == self.second
    }

    /// Product of the two kernels at `R`.
    pub fn kernel_product(&self, r_freq: f64) -> Result<f64> {
        let k1 = hankel_kernel(&self.first, r_freq)?.value;
        if self.is_identical() {
            return Ok(k1 * k1);
        }
        Ok(k1 * hankel_kernel(&self.second, r_freq)?.value)
    }
}
