//! Finite-SNR error performance: the MGF of `Z = |z₂ - z₁|²`, the pairwise
//! error probability and the SSK / SM ABEP upper bounds.
//!
//! SNR convention: the user-facing axis is `E_s/N₀` in dB and the analysis works
//! with `γ̄ = E_s / (4 N₀)`. [`SnrPoint::from_db`] is the only conversion site.

use std::f64::consts::PI;

use crate::asymptotics::{asym_pep, c_closed_form, AsymptoticCoefficient};
use crate::error::{Error, Result};
use crate::fading::{mgf_link_snr, power_mgf_asymptote, BranchPair, FadingFamily};
use crate::quadrature::{gl128, gl16, gl64, integrate_adaptive};

/// One point of an `E_s/N₀` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    pub es_over_n0_db: f64,
    pub gamma_bar: f64,
}

impl SnrPoint {
    pub fn from_db(es_over_n0_db: f64) -> Self {
        SnrPoint {
            es_over_n0_db,
            gamma_bar: 10f64.powf(es_over_n0_db / 10.0) / 4.0,
        }
    }

    /// `E_s / N₀` in linear scale.
    pub fn es_over_n0(&self) -> f64 {
        10f64.powf(self.es_over_n0_db / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation {
    Ssk,
    /// Spatial modulation with an `M`-PSK constellation of modulus `κ₀`.
    Sm { m: usize, kappa0: f64 },
}

/// How the constellation modulus enters the SNR of the spatial PEP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulusScale {
    /// `γ̄ → κ₀² γ̄` (energy of the symbol).
    #[default]
    Kappa0Squared,
    /// `γ̄ → κ₀ γ̄`.
    Kappa0,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub modulation: Modulation,
    /// Fading of every transmit/receive link (i.i.d.).
    pub family: FadingFamily,
    pub modulus_scale: ModulusScale,
}

fn log2_exact(n: usize) -> Option<u32> {
    (n.is_power_of_two()).then(|| n.trailing_zeros())
}

impl SystemConfig {
    pub fn ssk(n_t: usize, n_r: usize, family: FadingFamily) -> Result<Self> {
        let cfg = SystemConfig {
            n_t,
            n_r,
            modulation: Modulation::Ssk,
            family,
            modulus_scale: ModulusScale::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sm(n_t: usize, n_r: usize, m: usize, kappa0: f64, family: FadingFamily) -> Result<Self> {
        let cfg = SystemConfig {
            n_t,
            n_r,
            modulation: Modulation::Sm { m, kappa0 },
            family,
            modulus_scale: ModulusScale::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_modulus_scale(mut self, scale: ModulusScale) -> Self {
        self.modulus_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 2 || log2_exact(self.n_t).is_none() {
            return Err(Error::InvalidParameter(format!("n_t = {} must be a power of two >= 2", self.n_t)));
        }
        if self.n_r < 1 {
            return Err(Error::InvalidParameter("n_r must be >= 1".into()));
        }
        if let Modulation::Sm { m, kappa0 } = self.modulation {
            if m < 2 || log2_exact(m).is_none() {
                return Err(Error::InvalidParameter(format!("M = {m} must be a power of two >= 2")));
            }
            if !(kappa0 > 0.0 && kappa0.is_finite()) {
                return Err(Error::InvalidParameter(format!("kappa0 = {kappa0} must be positive")));
            }
        }
        Ok(())
    }

    pub fn branch_pair(&self) -> BranchPair {
        BranchPair::iid(self.family)
    }

    /// Bits per channel use.
    pub fn bits_per_symbol(&self) -> u32 {
        let nt = log2_exact(self.n_t).expect("validated");
        match self.modulation {
            Modulation::Ssk => nt,
            Modulation::Sm { m, .. } => nt + log2_exact(m).expect("validated"),
        }
    }

    /// Multiplier of `γ̄` in the spatial PEP.
    pub fn snr_scale(&self) -> f64 {
        match self.modulation {
            Modulation::Ssk => 1.0,
            Modulation::Sm { kappa0, .. } => match self.modulus_scale {
                ModulusScale::Kappa0Squared => kappa0 * kappa0,
                ModulusScale::Kappa0 => kappa0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Asymptotic,
}

const MGF_TOL: f64 = 1e-7;

/// `E[e^{-sZ}] = 2 ∫_0^∞ u e^{-u²} K₁(2√s u) K₂(2√s u) du` by adaptive quadrature
/// on geometrically shrinking panels towards `u = 0`.
pub fn mgf_z(pair: &BranchPair, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("mgf_z needs finite s > 0, got {s}")));
    }
    let scale = 2.0 * s.sqrt();
    let mut failure = None;
    let mut f = |u: f64| match pair.kernel_product(scale * u) {
        Ok(k) => 2.0 * u * (-u * u).exp() * k,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let u_min = 1e-7 * (1.0f64).min(1.0 / scale);
    let mut panels = Vec::new();
    let mut hi = 7.0;
    while hi > u_min {
        let lo = (hi * 0.5).max(u_min);
        panels.push((lo, hi));
        hi = lo;
    }
    // rough pass fixes the absolute accuracy target
    let rough: f64 = panels
        .iter()
        .map(|&(lo, hi)| crate::quadrature::gl16().integrate(lo, hi, &mut f).abs())
        .sum();
    let abs_tol = MGF_TOL * 1e-2 * rough / panels.len() as f64;
    let mut total = u_min * u_min;
    for &(lo, hi) in &panels {
        total += integrate_adaptive(&mut f, lo, hi, MGF_TOL * 1e-2, abs_tol, 500)?.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total)
}

/// Tabulated `M_Z(s)` for repeated evaluation: the kernel product is sampled
/// once on a fixed quadrature grid in `ln R`, and each `s` only reweights it.
///
/// `M_Z(s) = (1/2s) ∫ R² e^{-R²/4s} K₁(R) K₂(R) d(ln R)`, plus the analytic
/// contribution of `[0, R_lo]` where the kernels equal one.
#[derive(Debug, Clone)]
pub struct MgfZTable {
    pair: BranchPair,
    v_lo: f64,
    v_hi: f64,
    /// (R², weight · R², K₁K₂)
    nodes: Vec<(f64, f64, f64)>,
}

const TABLE_PANEL: f64 = 0.25;
const TABLE_GAUSS_CUTOFF: f64 = 14.0;

impl MgfZTable {
    pub fn new(pair: BranchPair, s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_min > 0.0 && s_max >= s_min) {
            return Err(Error::Domain(format!("table range [{s_min}, {s_max}] invalid")));
        }
        let v_lo = (1e-5 * s_min.sqrt().min(1.0)).ln();
        let mut table = MgfZTable {
            pair,
            v_lo,
            v_hi: v_lo,
            nodes: Vec::new(),
        };
        table.extend_to(s_max)?;
        Ok(table)
    }

    fn covers(&self, s: f64) -> bool {
        (TABLE_GAUSS_CUTOFF * s.sqrt()).ln() <= self.v_hi && (1e-5 * s.sqrt().min(1.0)).ln() >= self.v_lo
    }

    fn extend_to(&mut self, s_max: f64) -> Result<()> {
        let target = (TABLE_GAUSS_CUTOFF * s_max.sqrt()).ln();
        while self.v_hi < target {
            let (a, b) = (self.v_hi, self.v_hi + TABLE_PANEL);
            for (v, w) in gl16().mapped(a, b) {
                let r = v.exp();
                let k = self.pair.kernel_product(r)?;
                self.nodes.push((r * r, w * r * r, k));
            }
            self.v_hi = b;
        }
        Ok(())
    }

    /// `M_Z(s)`; extends the table upwards when `s` needs it.
    pub fn eval(&mut self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("mgf_z needs finite s > 0, got {s}")));
        }
        if !self.covers(s) {
            if (1e-5 * s.sqrt().min(1.0)).ln() < self.v_lo {
                *self = MgfZTable::new(self.pair, s, self.s_max_covered())?;
            }
            self.extend_to(s)?;
        }
        Ok(self.eval_covered(s))
    }

    fn s_max_covered(&self) -> f64 {
        (self.v_hi.exp() / TABLE_GAUSS_CUTOFF).powi(2)
    }

    fn eval_covered(&self, s: f64) -> f64 {
        let inv4s = 0.25 / s;
        let mut acc = 0.0;
        for &(r2, wr2, k) in &self.nodes {
            let g = (-r2 * inv4s).exp();
            if g == 0.0 {
                break;
            }
            acc += wr2 * g * k;
        }
        let r_lo2 = (2.0 * self.v_lo).exp();
        acc / (2.0 * s) - (-r_lo2 * inv4s).exp_m1()
    }

    pub fn pair(&self) -> &BranchPair {
        &self.pair
    }
}

const THETA_REL_TOL: f64 = 1e-9;
const THETA_MAX_DEPTH: u32 = 14;

/// `∫_a^b f`: 64-point Gauss-Legendre checked against 128 points, bisecting
/// wherever the two disagree by more than `1e-9` relative.
pub fn theta_integral<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64) -> Result<f64> {
    fn rule<F: FnMut(f64) -> Result<f64>>(f: &mut F, r: &crate::quadrature::GaussLegendre, a: f64, b: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in r.mapped(a, b) {
            acc += w * f(x)?;
        }
        Ok(acc)
    }
    fn recurse<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64, depth: u32, scale: &mut f64) -> Result<f64> {
        let coarse = rule(f, gl64(), a, b)?;
        let fine = rule(f, gl128(), a, b)?;
        *scale = scale.max(fine.abs());
        if (fine - coarse).abs() <= THETA_REL_TOL * *scale {
            return Ok(fine);
        }
        if depth >= THETA_MAX_DEPTH {
            return Err(Error::Convergence {
                what: format!("theta quadrature on [{a}, {b}]"),
                estimate: fine,
                error: (fine - coarse).abs(),
            });
        }
        let mid = 0.5 * (a + b);
        Ok(recurse(f, a, mid, depth + 1, scale)? + recurse(f, mid, b, depth + 1, scale)?)
    }
    let mut scale = 0.0;
    recurse(&mut f, a, b, 0, &mut scale)
}

/// `(1/π) ∫_0^{π/2} M_Z(A / (2 sin²θ))^{N_r} dθ` on a table.
pub fn pep_exact_with(table: &mut MgfZTable, n_r: usize, a_scale: f64) -> Result<f64> {
    if !(a_scale > 0.0) {
        return Err(Error::Domain(format!("PEP needs A > 0, got {a_scale}")));
    }
    let n = n_r as i32;
    let v = theta_integral(
        |th| {
            let s = a_scale / (2.0 * th.sin().powi(2));
            Ok(table.eval(s)?.powi(n))
        },
        0.0,
        PI / 2.0,
    )?;
    Ok(v / PI)
}

/// Exact PEP of one transmit-antenna pair.
pub fn pep_exact(pair: &BranchPair, n_r: usize, a_scale: f64) -> Result<f64> {
    if n_r < 1 {
        return Err(Error::InvalidParameter("n_r must be >= 1".into()));
    }
    let s_min = a_scale / 2.0;
    let mut table = MgfZTable::new(*pair, s_min, s_min * 1e8)?;
    pep_exact_with(&mut table, n_r, a_scale)
}

/// Reduced fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Union-bound weights of the PEP in the spatial and the joint ABEP components of SM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmMultipliers {
    pub spatial: Ratio,
    pub joint: Ratio,
}

pub fn sm_multipliers(n_t: usize, m: usize) -> Result<SmMultipliers> {
    let (Some(lt), Some(lm)) = (log2_exact(n_t), log2_exact(m)) else {
        return Err(Error::InvalidParameter(format!("N_t = {n_t} and M = {m} must be powers of two")));
    };
    let (nt, mm, lt, lm) = (n_t as u64, m as u64, lt as u64, lm as u64);
    let den = 2 * (lt + lm);
    Ok(SmMultipliers {
        spatial: Ratio::new(nt * lt, den),
        joint: Ratio::new(mm * (nt - 1) * lm + nt * (mm - 1) * lt, den),
    })
}

/// ABEP bound of SM split into its three components; reported unclipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmBound {
    pub signal: f64,
    pub spatial: f64,
    pub joint: f64,
}

impl SmBound {
    pub fn total(&self) -> f64 {
        self.signal + self.spatial + self.joint
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityReport {
    pub spatial: f64,
    pub joint: f64,
    /// Only for SM.
    pub signal: Option<f64>,
    pub overall: f64,
}

/// Diversity orders: `N_r` for the antenna-index terms and
/// `N_r · min(mβ/2, m_s β_s/2)` for the PSK symbol term.
pub fn diversity_report(cfg: &SystemConfig) -> DiversityReport {
    let nr = cfg.n_r as f64;
    let signal = match cfg.modulation {
        Modulation::Ssk => None,
        Modulation::Sm { .. } => Some(nr * cfg.family.kernel_decay_order()),
    };
    DiversityReport {
        spatial: nr,
        joint: nr,
        signal,
        overall: signal.map_or(nr, |s| s.min(nr)),
    }
}

/// Bound evaluator for one configuration. Caches the asymptotic coefficient and
/// the tabulated MGF across SNR points.
#[derive(Debug, Clone)]
pub struct BoundEvaluator {
    cfg: SystemConfig,
    coefficient: Option<AsymptoticCoefficient>,
    table: Option<MgfZTable>,
}

impl BoundEvaluator {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(BoundEvaluator {
            cfg,
            coefficient: None,
            table: None,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn coefficient(&mut self) -> Result<AsymptoticCoefficient> {
        if let Some(c) = self.coefficient {
            return Ok(c);
        }
        let c = c_closed_form(&self.cfg.branch_pair())?;
        self.coefficient = Some(c);
        Ok(c)
    }

    /// PEP of one antenna pair at `A`.
    pub fn pep(&mut self, a_scale: f64, mode: Mode) -> Result<f64> {
        match mode {
            Mode::Asymptotic => {
                let c = self.coefficient()?.value;
                Ok(asym_pep(&vec![c; self.cfg.n_r], a_scale))
            }
            Mode::Exact => {
                let s_min = a_scale / 2.0;
                let table = match self.table.take() {
                    Some(t) => t,
                    None => MgfZTable::new(self.cfg.branch_pair(), s_min, s_min * 1e8)?,
                };
                let mut table = table;
                let r = pep_exact_with(&mut table, self.cfg.n_r, a_scale);
                self.table = Some(table);
                r
            }
        }
    }

    pub fn ssk(&mut self, pt: SnrPoint, mode: Mode) -> Result<f64> {
        if self.cfg.modulation != Modulation::Ssk {
            return Err(Error::InvalidParameter("SSK bound requested for an SM configuration".into()));
        }
        Ok(self.cfg.n_t as f64 / 2.0 * self.pep(pt.gamma_bar, mode)?)
    }

    pub fn sm(&mut self, pt: SnrPoint, mode: Mode) -> Result<SmBound> {
        let Modulation::Sm { m, .. } = self.cfg.modulation else {
            return Err(Error::InvalidParameter("SM bound requested for an SSK configuration".into()));
        };
        let mult = sm_multipliers(self.cfg.n_t, m)?;
        let pep = self.pep(self.cfg.snr_scale() * pt.gamma_bar, mode)?;
        let signal = match mode {
            Mode::Exact => abep_signal_mpsk(&self.cfg, pt)?,
            Mode::Asymptotic => abep_signal_mpsk_asymptotic(&self.cfg, pt)?,
        };
        Ok(SmBound {
            signal,
            spatial: mult.spatial.value() * pep,
            joint: mult.joint.value() * pep,
        })
    }

    /// The bound of the configured scheme as one number.
    pub fn abep(&mut self, pt: SnrPoint, mode: Mode) -> Result<f64> {
        match self.cfg.modulation {
            Modulation::Ssk => self.ssk(pt, mode),
            Modulation::Sm { .. } => Ok(self.sm(pt, mode)?.total()),
        }
    }
}

/// `(N_t/2) · PEP(γ̄)`.
pub fn abep_ssk_bound(cfg: &SystemConfig, pt: SnrPoint, mode: Mode) -> Result<f64> {
    BoundEvaluator::new(*cfg)?.ssk(pt, mode)
}

pub fn abep_sm_bound(cfg: &SystemConfig, pt: SnrPoint, mode: Mode) -> Result<SmBound> {
    BoundEvaluator::new(*cfg)?.sm(pt, mode)
}

fn psk_parts(cfg: &SystemConfig, pt: SnrPoint) -> Result<(usize, f64, f64)> {
    let Modulation::Sm { m, .. } = cfg.modulation else {
        return Err(Error::InvalidParameter("signal ABEP needs an SM configuration".into()));
    };
    // per-branch symbol SNR E_s κ₀²|h|²/N₀ = 2 · scale · γ̄ · |h|²
    let rho = 2.0 * cfg.snr_scale() * pt.gamma_bar;
    let g = (PI / m as f64).sin().powi(2);
    Ok((m, rho, g))
}

/// Bit error probability of Gray-mapped `M`-PSK over `N_r`-branch MRC:
/// `(1/log₂M) (1/π) ∫_0^{(M-1)π/M} M_γ(g / sin²θ)^{N_r} dθ`.
pub fn abep_signal_mpsk(cfg: &SystemConfig, pt: SnrPoint) -> Result<f64> {
    let (m, rho, g) = psk_parts(cfg, pt)?;
    let n = cfg.n_r as i32;
    let v = theta_integral(
        |th| Ok(mgf_link_snr(&cfg.family, rho, g / th.sin().powi(2))?.powi(n)),
        0.0,
        (m as f64 - 1.0) * PI / m as f64,
    )?;
    Ok(v / (PI * (m as f64).log2()))
}

/// High-SNR form of [`abep_signal_mpsk`], with the link MGF replaced by its asymptote.
pub fn abep_signal_mpsk_asymptotic(cfg: &SystemConfig, pt: SnrPoint) -> Result<f64> {
    let (m, rho, g) = psk_parts(cfg, pt)?;
    let asym = power_mgf_asymptote(&cfg.family);
    let n = cfg.n_r as i32;
    let v = theta_integral(
        |th| Ok(asym.eval(rho * g / th.sin().powi(2)).powi(n)),
        0.0,
        (m as f64 - 1.0) * PI / m as f64,
    )?;
    Ok(v / (PI * (m as f64).log2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rayleigh() -> FadingFamily {
        FadingFamily::nakagami(1.0, 1.0).unwrap()
    }

    fn rayleigh_pep(a: f64) -> f64 {
        0.5 * (1.0 - (a / (1.0 + a)).sqrt())
    }

    #[test]
    fn snr_conversion() {
        let p = SnrPoint::from_db(10.0);
        assert!((p.gamma_bar - 2.5).abs() < 1e-14);
        assert!((SnrPoint::from_db(0.0).gamma_bar - 0.25).abs() < 1e-16);
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::ssk(3, 1, rayleigh()).is_err());
        assert!(SystemConfig::ssk(1, 1, rayleigh()).is_err());
        assert!(SystemConfig::ssk(4, 0, rayleigh()).is_err());
        assert!(SystemConfig::sm(4, 1, 3, 1.0, rayleigh()).is_err());
        assert!(SystemConfig::sm(4, 1, 4, 0.0, rayleigh()).is_err());
        let c = SystemConfig::sm(8, 2, 4, 1.0, rayleigh()).unwrap();
        assert_eq!(c.bits_per_symbol(), 5);
    }

    #[test]
    fn rayleigh_mgf_z() {
        let pair = BranchPair::iid(rayleigh());
        for &s in &[1e-3, 0.2, 1.0, 7.0, 1e3] {
            let got = mgf_z(&pair, s).unwrap();
            let want = 1.0 / (1.0 + 2.0 * s);
            assert!((got - want).abs() / want < 1e-8, "s={s}: {got} vs {want}");
        }
        assert!((mgf_z(&pair, 1e-6).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn table_matches_adaptive_mgf() {
        for fam in [
            FadingFamily::egk(1.5, 4.0, 2.0, 1.0, 1.0).unwrap(),
            FadingFamily::generalized_k(1.5, 1.0931, 1.0).unwrap(),
            FadingFamily::nakagami(2.5, 0.7).unwrap(),
        ] {
            let pair = BranchPair::iid(fam);
            let mut table = MgfZTable::new(pair, 0.05, 1e4).unwrap();
            for &s in &[0.05, 0.3, 2.0, 40.0, 900.0, 1e4, 1e6] {
                let t = table.eval(s).unwrap();
                let a = mgf_z(&pair, s).unwrap();
                assert!((t - a).abs() / a < 1e-7, "{fam:?} s={s}: {t} vs {a}");
            }
        }
    }

    #[test]
    fn rayleigh_pep_closed_form() {
        let pair = BranchPair::iid(rayleigh());
        for &a in &[0.1, 1.0, 10.0, 100.0] {
            let got = pep_exact(&pair, 1, a).unwrap();
            assert!((got - rayleigh_pep(a)).abs() < 1e-9, "A={a}: {got} vs {}", rayleigh_pep(a));
        }
        // 0.5 - √A/2 near zero SNR
        assert!((pep_exact(&pair, 1, 1e-9).unwrap() - rayleigh_pep(1e-9)).abs() < 1e-12);
        assert!((pep_exact(&pair, 1, 1e-13).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn ssk_bound_values() {
        let cfg = SystemConfig::ssk(8, 1, rayleigh()).unwrap();
        let pt = SnrPoint { es_over_n0_db: 26.02, gamma_bar: 100.0 };
        let exact = abep_ssk_bound(&cfg, pt, Mode::Exact).unwrap();
        assert!((exact - 4.0 * rayleigh_pep(100.0)).abs() < 1e-9);
        let asym = abep_ssk_bound(&cfg, pt, Mode::Asymptotic).unwrap();
        assert!((asym - 0.01).abs() < 1e-15);
        let cfg2 = SystemConfig::ssk(2, 1, rayleigh()).unwrap();
        let pt = SnrPoint { es_over_n0_db: 46.02, gamma_bar: 1e4 };
        let e = abep_ssk_bound(&cfg2, pt, Mode::Exact).unwrap();
        let a = abep_ssk_bound(&cfg2, pt, Mode::Asymptotic).unwrap();
        assert!((e / a - 1.0).abs() < 1e-4);
    }

    #[test]
    fn multipliers() {
        let m = sm_multipliers(8, 4).unwrap();
        assert_eq!(m.spatial, Ratio::new(12, 5));
        assert_eq!(m.joint, Ratio::new(64, 5));
        let m = sm_multipliers(2, 2).unwrap();
        assert_eq!(m.spatial, Ratio::new(1, 2));
        assert_eq!(m.joint, Ratio::new(1, 1));
    }

    #[test]
    fn bpsk_rayleigh_signal_term() {
        let cfg = SystemConfig::sm(2, 1, 2, 1.0, rayleigh()).unwrap();
        for db in [0.0, 10.0, 20.0] {
            let pt = SnrPoint::from_db(db);
            let rho = 2.0 * pt.gamma_bar;
            let want = 0.5 * (1.0 - (rho / (1.0 + rho)).sqrt());
            let got = abep_signal_mpsk(&cfg, pt).unwrap();
            assert!((got - want).abs() < 1e-10 * want.max(1e-3), "{db} dB: {got} vs {want}");
        }
    }

    #[test]
    fn signal_term_zero_snr_limit() {
        let cfg = SystemConfig::sm(2, 2, 8, 1.0, FadingFamily::generalized_k(1.5, 38.0809, 1.0).unwrap()).unwrap();
        let got = abep_signal_mpsk(&cfg, SnrPoint::from_db(-90.0)).unwrap();
        assert!((got - 7.0 / 24.0).abs() < 1e-3);
    }

    #[test]
    fn kappa_one_matches_ssk_pep() {
        let fam = FadingFamily::nakagami(1.5, 1.0).unwrap();
        let sm = SystemConfig::sm(4, 2, 4, 1.0, fam).unwrap();
        let ssk = SystemConfig::ssk(4, 2, fam).unwrap();
        let pt = SnrPoint::from_db(12.0);
        let b = abep_sm_bound(&sm, pt, Mode::Exact).unwrap();
        let p = abep_ssk_bound(&ssk, pt, Mode::Exact).unwrap() / 2.0;
        let mult = sm_multipliers(4, 4).unwrap();
        assert!((b.spatial - mult.spatial.value() * p).abs() < 1e-15 * p);
    }

    #[test]
    fn diversity() {
        let gk = FadingFamily::generalized_k(1.5, 1.0931, 1.0).unwrap();
        let r = diversity_report(&SystemConfig::ssk(4, 3, gk).unwrap());
        assert_eq!(r.overall, 3.0);
        assert!(r.signal.is_none());
        let r = diversity_report(&SystemConfig::sm(8, 2, 4, 1.0, gk).unwrap());
        assert!((r.signal.unwrap() - 2.0 * 1.0931).abs() < 1e-12);
        assert_eq!(r.overall, 2.0);
    }
}
