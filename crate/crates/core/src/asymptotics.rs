//! High-SNR behavior of the difference variable `Z = |z₂ - z₁|²`.
//!
//! Its MGF decays as `c / s` (first order, for uniformly distributed phases), with
//!
//! ```text
//! c = (1/4) ∫_0^∞ K₁(√y) K₂(√y) dy,     K_i = Hankel kernel of link i
//! ```
//!
//! [`c_numeric`] evaluates that integral directly; [`c_egk`], [`c_gk`] and
//! [`c_nakagami`] are the closed forms for the three families.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fading::{BranchPair, FadingFamily};
use crate::quadrature::integrate_adaptive;
use crate::specfun::{hyp2f1, ln_gamma_real, mellin_barnes_line, FoxHSpec, MeijerGSpec};

/// Relative tolerance for the closed-form Mellin-Barnes evaluations.
const CLOSED_FORM_TOL: f64 = 1e-10;
/// Relative tolerance of the direct coefficient integral.
pub const NUMERIC_TOL: f64 = 1e-8;
/// Upper integration limit of the direct integral before declaring divergence.
pub const NUMERIC_Y_CAP: f64 = 1e12;
/// Relative disagreement allowed between the Meijer-G and 2F1 routes.
pub const GK_ROUTE_AGREEMENT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMethod {
    NumericOracle,
    EgkClosedForm,
    GkClosedForm,
    NakagamiClosedForm,
}

/// `c` in `M_Z(s) = c s^{-1} + o(s^{-1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoefficient {
    pub value: f64,
    pub method: CoefficientMethod,
    pub achieved_tol: f64,
}

/// Diversity and coding gain, `ABEP ≈ (G_c γ̄)^{-G_d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair {
    pub diversity: f64,
    pub coding: f64,
}

impl GainPair {
    pub fn abep(&self, gamma_bar: f64) -> f64 {
        (self.coding * gamma_bar).powf(-self.diversity)
    }
}

fn lg(x: f64) -> f64 {
    ln_gamma_real(x).expect("positive gamma argument")
}

/// Direct quadrature of the coefficient integral, in the variable `t = ln y`.
pub fn c_numeric(pair: &BranchPair) -> Result<AsymptoticCoefficient> {
    let orders = pair.first.kernel_decay_order() + pair.second.kernel_decay_order();
    if orders <= 1.0 {
        return Err(Error::Divergence(format!(
            "kernel product decays like y^-{orders}; the coefficient integral needs an order above 1 \
             (m*beta/2 and m_s*beta_s/2 too small on these links)"
        )));
    }
    // y-scale where the kernels start to fall: E[a²] ~ Ω
    let y_char = 4.0 / (pair.first.omega() + pair.second.omega());
    let t_start = y_char.ln() - 25.0;
    let t_cap = NUMERIC_Y_CAP.ln();

    let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let integrand = |t: f64| -> f64 {
        let y = t.exp();
        match pair.kernel_product(y.sqrt()) {
            Ok(v) => y * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    // below t_start both kernels are 1 to within ~y, so ∫_0^{y0} ≈ y0
    let mut acc = t_start.exp();
    let mut err = t_start.exp() * t_start.exp() * 10.0;
    let mut prev_panel: Option<f64> = None;
    let mut t = t_start;
    let width = 1.0;
    let mut tail = f64::INFINITY;
    while t < t_cap {
        // absolute floor: far-tail panels sit at the kernel's own noise level
        let abs_tol = 1e-3 * NUMERIC_TOL * acc.abs();
        let r = integrate_adaptive(integrand, t, t + width, NUMERIC_TOL * 0.1, abs_tol, 400)?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        acc += r.value;
        err += r.error;
        t += width;
        let panel = r.abs_value;
        if let Some(prev) = prev_panel {
            let ratio = panel / prev;
            // past the peak: geometric tail estimate
            if ratio < 0.95 && t > y_char.ln() + 2.0 {
                tail = panel * ratio / (1.0 - ratio);
                if tail <= 0.01 * NUMERIC_TOL * acc.abs() {
                    break;
                }
            } else {
                tail = f64::INFINITY;
            }
        }
        prev_panel = Some(panel);
    }
    if !tail.is_finite() || tail > NUMERIC_TOL * acc.abs() * 100.0 {
        return Err(Error::Divergence(format!(
            "coefficient integral not settled at y = {NUMERIC_Y_CAP:e}: accumulated {acc:e}, tail estimate {tail:e}"
        )));
    }
    // add the geometric tail beyond the last panel
    if t >= t_cap {
        acc += tail;
    }
    let value = 0.25 * acc;
    Ok(AsymptoticCoefficient {
        value,
        method: CoefficientMethod::NumericOracle,
        achieved_tol: (err + tail) / acc.abs(),
    })
}

/// Mellin-Barnes data of the EGK coefficient: the `H^{2,2}_{2,2}` spec, its
/// argument and the log of its prefactor.
pub fn egk_coefficient_form(pair: &BranchPair) -> Result<(FoxHSpec, f64, f64)> {
    let p1 = pair
        .first
        .to_egk()
        .ok_or_else(|| Error::InvalidParameter("EGK closed form needs EGK or Generalized-K links (link 1 is Nakagami)".into()))?;
    let p2 = pair
        .second
        .to_egk()
        .ok_or_else(|| Error::InvalidParameter("EGK closed form needs EGK or Generalized-K links (link 2 is Nakagami)".into()))?;
    let (b1, bs1, b2, bs2) = (p1.b(), p1.b_s(), p2.b(), p2.b_s());
    let ln_prefactor = bs1.ln() + b1.ln() - lg(p1.m()) - lg(p2.m()) - lg(p1.m_s()) - lg(p2.m_s()) - p1.omega().ln();
    let x = p2.omega() * b1 * bs1 / (p1.omega() * b2 * bs2);
    let spec = FoxHSpec::new(
        2,
        2,
        vec![(1.0 - p2.m(), 2.0 / p2.beta()), (1.0 - p2.m_s(), 2.0 / p2.beta_s())],
        vec![
            (p1.m() - 2.0 / p1.beta(), 2.0 / p1.beta()),
            (p1.m_s() - 2.0 / p1.beta_s(), 2.0 / p1.beta_s()),
        ],
    )?;
    Ok((spec, x, ln_prefactor))
}

fn evaluate_on_midline(spec: &FoxHSpec, x: f64, ln_prefactor: f64) -> Result<(f64, f64)> {
    let (lo, hi) = spec.contour_strip()?;
    let c = 0.5 * (lo + hi);
    let v = mellin_barnes_line(spec, x, c, 0.5 * (hi - lo), ln_prefactor, CLOSED_FORM_TOL)?;
    Ok((v.value, v.tol))
}

/// EGK closed form: `A · H^{2,2}_{2,2}[x | ...]`.
pub fn c_egk(pair: &BranchPair) -> Result<AsymptoticCoefficient> {
    let (spec, x, ln_pref) = egk_coefficient_form(pair)?;
    let (value, tol) = evaluate_on_midline(&spec, x, ln_pref)?;
    Ok(AsymptoticCoefficient {
        value,
        method: CoefficientMethod::EgkClosedForm,
        achieved_tol: tol,
    })
}

fn gk_params(pair: &BranchPair) -> Result<((f64, f64, f64), (f64, f64, f64))> {
    let a = pair
        .first
        .as_generalized_k()
        .ok_or_else(|| Error::InvalidParameter("Generalized-K form needs beta = beta_s = 2 on link 1".into()))?;
    let b = pair
        .second
        .as_generalized_k()
        .ok_or_else(|| Error::InvalidParameter("Generalized-K form needs beta = beta_s = 2 on link 2".into()))?;
    Ok((a, b))
}

/// Generalized-K coefficient through the Meijer `G^{2,2}_{2,2}` form.
pub fn c_gk_meijer(pair: &BranchPair) -> Result<(f64, f64)> {
    let ((m1, ms1, o1), (m2, ms2, o2)) = gk_params(pair)?;
    let ln_b = ms1.ln() + m1.ln() - lg(m1) - lg(m2) - lg(ms1) - lg(ms2) - o1.ln();
    let x = o2 * m1 * ms1 / (o1 * m2 * ms2);
    let g = MeijerGSpec::new(2, 2, vec![1.0 - m2, 1.0 - ms2], vec![m1 - 1.0, ms1 - 1.0])?;
    evaluate_on_midline(&g.to_fox()?, x, ln_b)
}

/// Generalized-K coefficient through the Gauss hypergeometric form.
pub fn c_gk_hypergeometric(pair: &BranchPair) -> Result<(f64, f64)> {
    let ((m1, ms1, o1), (m2, ms2, o2)) = gk_params(pair)?;
    let total = m1 + m2 + ms1 + ms2 - 2.0;
    let ln_pref = lg(m2 + ms1 - 1.0) + lg(ms2 + ms1 - 1.0) + lg(m2 + m1 - 1.0) + lg(ms2 + m1 - 1.0)
        - lg(total)
        - lg(m1)
        - lg(m2)
        - lg(ms1)
        - lg(ms2)
        - (m2 - 1.0) * (ms1 * m1 / o1).ln()
        + m2 * (m2 * ms2 / o2).ln();
    let z = 1.0 - o1 * m2 * ms2 / (o2 * m1 * ms1);
    let f = hyp2f1(m1 + m2 - 1.0, m2 + ms1 - 1.0, total, z)?;
    Ok((ln_pref.exp() * f.value, f.tol + 1e-14))
}

/// Generalized-K coefficient: the 2F1 route, cross-checked against the Meijer-G route.
pub fn c_gk(pair: &BranchPair) -> Result<AsymptoticCoefficient> {
    let (hyp, hyp_tol) = c_gk_hypergeometric(pair)?;
    let (meijer, meijer_tol) = c_gk_meijer(pair)?;
    let diff = (hyp - meijer).abs() / hyp.abs();
    let allowed = GK_ROUTE_AGREEMENT.max(10.0 * (hyp_tol + meijer_tol));
    if !(diff <= allowed) {
        return Err(Error::Consistency {
            what: format!("Generalized-K coefficient: 2F1 route vs Meijer-G route (relative gap {diff:e})"),
            first: hyp,
            second: meijer,
        });
    }
    Ok(AsymptoticCoefficient {
        value: hyp,
        method: CoefficientMethod::GkClosedForm,
        achieved_tol: hyp_tol.max(diff),
    })
}

/// Nakagami-m closed form.
pub fn c_nakagami(pair: &BranchPair) -> Result<AsymptoticCoefficient> {
    let take = |f: &FadingFamily| match *f {
        FadingFamily::Nakagami { m, omega } => Ok((m, omega)),
        _ => Err(Error::InvalidParameter(format!(
            "Nakagami closed form needs Nakagami links, got {}",
            f.name()
        ))),
    };
    let (m1, o1) = take(&pair.first)?;
    let (m2, o2) = take(&pair.second)?;
    let ln_value = m1 * (m1 / o1).ln() - lg(m1) + m2 * (m2 / o2).ln() - lg(m2) + lg(m1 + m2 - 1.0)
        + (1.0 - m1 - m2) * (m1 / o1 + m2 / o2).ln();
    Ok(AsymptoticCoefficient {
        value: ln_value.exp(),
        method: CoefficientMethod::NakagamiClosedForm,
        achieved_tol: 1e-14,
    })
}

/// Best closed form for the pair: Nakagami, Generalized-K, else EGK.
pub fn c_closed_form(pair: &BranchPair) -> Result<AsymptoticCoefficient> {
    match (&pair.first, &pair.second) {
        (FadingFamily::Nakagami { .. }, FadingFamily::Nakagami { .. }) => c_nakagami(pair),
        _ if pair.first.as_generalized_k().is_some() && pair.second.as_generalized_k().is_some() => c_gk(pair),
        _ => c_egk(pair),
    }
}

/// `2^{L-1} Γ(L + 1/2) / (√π Γ(L + 1))`.
pub fn asym_prefactor(l: usize) -> f64 {
    assert!(l >= 1);
    let lf = l as f64;
    ((lf - 1.0) * 2f64.ln() + lg(lf + 0.5) - 0.5 * PI.ln() - lg(lf + 1.0)).exp()
}

/// High-`A` approximation of `(1/π) ∫_0^{π/2} Π_ℓ M_{Z_ℓ}(A / (2 sin²θ)) dθ`.
pub fn asym_pep(coeffs: &[f64], a_scale: f64) -> f64 {
    let l = coeffs.len();
    asym_prefactor(l) * coeffs.iter().product::<f64>() * a_scale.powi(-(l as i32))
}

/// Diversity and coding gain of `prefactor · asym_pep(coeffs, γ̄)`.
pub fn gains(coeffs: &[f64], prefactor: f64) -> GainPair {
    let l = coeffs.len();
    let lf = l as f64;
    let scale = prefactor * asym_prefactor(l) * coeffs.iter().product::<f64>();
    GainPair {
        diversity: lf,
        coding: scale.powf(-1.0 / lf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nak(m: f64, o: f64) -> FadingFamily {
        FadingFamily::nakagami(m, o).unwrap()
    }

    #[test]
    fn nakagami_closed_form_values() {
        let c = c_nakagami(&BranchPair::iid(nak(1.0, 1.0))).unwrap();
        assert!((c.value - 0.5).abs() < 1e-14);
        // Γ(2) 3^{-2} (1.5^{1.5}/Γ(1.5))²
        let c = c_nakagami(&BranchPair::iid(nak(1.5, 1.0))).unwrap();
        let want = (1.5f64.powf(1.5) / 0.886_226_925_452_758).powi(2) / 9.0;
        assert!((c.value - want).abs() < 1e-13);
        assert!((c.value - 0.477_466).abs() < 2e-6);
    }

    #[test]
    fn rayleigh_numeric_coefficient() {
        let c = c_numeric(&BranchPair::iid(nak(1.0, 1.0))).unwrap();
        assert!((c.value - 0.5).abs() < 1e-7, "{c:?}");
    }

    #[test]
    fn wrong_family_is_rejected() {
        let pair = BranchPair::iid(nak(1.0, 1.0));
        assert!(c_egk(&pair).is_err());
        assert!(c_gk(&pair).is_err());
        let egk = BranchPair::iid(FadingFamily::egk(1.5, 4.0, 2.0, 1.0, 1.0).unwrap());
        assert!(c_gk(&egk).is_err());
        assert!(c_nakagami(&egk).is_err());
    }

    #[test]
    fn slow_kernels_are_divergent() {
        // m β/2 = 0.3 on both links: product decays like y^-0.6
        let f = FadingFamily::egk(0.6, 1.0, 3.0, 2.0, 1.0).unwrap();
        assert!(matches!(c_numeric(&BranchPair::iid(f)), Err(Error::Divergence(_))));
        assert!(matches!(c_egk(&BranchPair::iid(f)), Err(Error::Contour { .. })));
    }

    #[test]
    fn asym_prefactor_values() {
        assert!((asym_prefactor(1) - 0.5).abs() < 1e-15);
        assert!((asym_prefactor(2) - 0.75).abs() < 1e-15);
        // 4 Γ(7/2) / (√π 3!) = 4 (15/8) / 6 = 1.25
        assert!((asym_prefactor(3) - 1.25).abs() < 1e-14);
        assert!((asym_pep(&[0.5], 100.0) - 0.0025).abs() < 1e-17);
        assert!((asym_pep(&[1.0, 1.0], 1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn asym_pep_matches_theta_quadrature_of_its_integrand() {
        // (1/π) ∫_0^{π/2} Π (c · 2 sin²θ / A) dθ
        let c = 0.477_466;
        let a = 1e3;
        let direct = crate::quadrature::gl64().integrate(0.0, PI / 2.0, |th| {
            (c * 2.0 * th.sin().powi(2) / a).powi(3)
        }) / PI;
        let got = asym_pep(&[c, c, c], a);
        assert!((got - direct).abs() / direct < 1e-13, "{got} vs {direct}");
    }

    #[test]
    fn gains_reproduce_the_bound() {
        let g = gains(&[0.5], 1.0);
        assert_eq!(g.diversity, 1.0);
        assert!((g.coding - 4.0).abs() < 1e-13);
        let coeffs = [0.31, 0.77];
        let g = gains(&coeffs, 3.5);
        for i in 0..50 {
            let gb = 10f64.powf(i as f64 / 10.0);
            let bound = 3.5 * asym_pep(&coeffs, gb);
            assert!((g.abep(gb) - bound).abs() <= 1e-14 * bound);
        }
    }

    #[test]
    fn coding_gain_scales_with_omega() {
        let k = 5.0;
        let c1 = c_nakagami(&BranchPair::iid(nak(1.5, 1.0))).unwrap().value;
        let ck = c_nakagami(&BranchPair::iid(nak(1.5, k))).unwrap().value;
        let g1 = gains(&[c1, c1], 4.0);
        let gk = gains(&[ck, ck], 4.0);
        assert!((gk.coding / g1.coding - k).abs() < 1e-12);
    }
}
