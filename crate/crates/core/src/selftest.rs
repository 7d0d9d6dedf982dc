//! Fast identity checks gating a build: Rayleigh closed forms, the
//! EGK → Generalized-K → Nakagami coefficient chain, the two Generalized-K
//! evaluation routes and exact/asymptotic convergence.

use crate::asymptotics::{asym_pep, c_egk, c_gk, c_gk_hypergeometric, c_gk_meijer, c_nakagami, c_numeric};
use crate::exactperf::{pep_exact, BoundEvaluator, Mode, SnrPoint, SystemConfig};
use crate::fading::{BranchPair, FadingFamily};
use crate::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelftestOptions {
    /// Relative perturbation applied to the asymptotic PEP (`asym · (1 + p)`);
    /// lets tests confirm that the suite detects a wrong prefactor.
    pub asym_perturbation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    /// Allowed relative deviation.
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

impl CheckResult {
    fn relative(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        let passed = ((actual - expected) / expected).abs() <= tolerance;
        CheckResult {
            name: name.into(),
            expected,
            actual,
            tolerance,
            passed,
            note: None,
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        CheckResult {
            name: name.into(),
            expected: f64::NAN,
            actual: f64::NAN,
            tolerance: 0.0,
            passed: false,
            note: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn push(report: &mut SelftestReport, name: &str, r: Result<(f64, f64)>, tol: f64) {
    report.checks.push(match r {
        Ok((expected, actual)) => CheckResult::relative(name, expected, actual, tol),
        Err(e) => CheckResult::failed(name, e),
    });
}

pub fn run_selftest() -> SelftestReport {
    run_selftest_with(SelftestOptions::default())
}

pub fn run_selftest_with(opts: SelftestOptions) -> SelftestReport {
    let mut report = SelftestReport::default();
    let asym = |c: &[f64], a: f64| asym_pep(c, a) * (1.0 + opts.asym_perturbation);
    let rayleigh = FadingFamily::nakagami(1.0, 1.0).expect("valid");
    let rayleigh_pair = BranchPair::iid(rayleigh);
    let rayleigh_pep = |a: f64| 0.5 * (1.0 - (a / (1.0 + a)).sqrt());

    for a in [0.1, 1.0, 10.0, 100.0] {
        push(
            &mut report,
            &format!("rayleigh exact PEP, A = {a}"),
            pep_exact(&rayleigh_pair, 1, a).map(|v| (rayleigh_pep(a), v)),
            1e-7,
        );
    }
    push(&mut report, "rayleigh asymptotic PEP, A = 100", Ok((0.0025, asym(&[0.5], 100.0))), 1e-12);
    // asym/exact = 0.0025 / 0.0024814 = 1.0075: the asymptote lies above, within 1%
    push(
        &mut report,
        "rayleigh tightness asym/exact, A = 100",
        Ok((1.005, asym(&[0.5], 100.0) / rayleigh_pep(100.0))),
        0.005,
    );

    let sets = [(1.5, 2.0, 1.0, 1.0), (2.3, 1.0931, 0.7, 1.4), (0.8, 38.0809, 1.0, 2.5)];
    for &(m, ms, o1, o2) in &sets {
        let pair = |beta_egk: bool| -> Result<BranchPair> {
            if beta_egk {
                Ok(BranchPair::new(
                    FadingFamily::egk(m, 2.0, ms, 2.0, o1)?,
                    FadingFamily::egk(m + 0.4, 2.0, ms * 1.5, 2.0, o2)?,
                ))
            } else {
                Ok(BranchPair::new(
                    FadingFamily::generalized_k(m, ms, o1)?,
                    FadingFamily::generalized_k(m + 0.4, ms * 1.5, o2)?,
                ))
            }
        };
        push(
            &mut report,
            &format!("EGK(beta = 2) = GK coefficient, m = {m}, ms = {ms}"),
            (|| Ok((c_gk(&pair(false)?)?.value, c_egk(&pair(true)?)?.value)))(),
            1e-7,
        );
        push(
            &mut report,
            &format!("GK Meijer-G route = 2F1 route, m = {m}, ms = {ms}"),
            (|| Ok((c_gk_hypergeometric(&pair(false)?)?.0, c_gk_meijer(&pair(false)?)?.0)))(),
            1e-7,
        );
    }
    push(
        &mut report,
        "GK Meijer-G route = 2F1 route, heavy shadowing",
        (|| {
            let p = BranchPair::iid(FadingFamily::generalized_k(1.5, 1.0931, 1.0)?);
            Ok((c_gk_hypergeometric(&p)?.0, c_gk_meijer(&p)?.0))
        })(),
        1e-7,
    );
    push(
        &mut report,
        "GK (ms = 1e4) -> Nakagami coefficient",
        (|| {
            let gk = BranchPair::new(FadingFamily::generalized_k(1.0, 1e4, 1.0)?, FadingFamily::generalized_k(2.0, 1e4, 2.0)?);
            let nak = BranchPair::new(FadingFamily::nakagami(1.0, 1.0)?, FadingFamily::nakagami(2.0, 2.0)?);
            Ok((c_nakagami(&nak)?.value, c_gk(&gk)?.value))
        })(),
        1e-3,
    );
    push(
        &mut report,
        "Nakagami coefficient = direct integral, m = 1.5",
        (|| {
            let p = BranchPair::iid(FadingFamily::nakagami(1.5, 1.0)?);
            Ok((c_nakagami(&p)?.value, c_numeric(&p)?.value))
        })(),
        1e-4,
    );
    push(
        &mut report,
        "SSK 2x1 Rayleigh exact/asym at gamma_bar = 1e4",
        (|| {
            let cfg = SystemConfig::ssk(2, 1, rayleigh)?;
            let mut ev = BoundEvaluator::new(cfg)?;
            let pt = SnrPoint {
                es_over_n0_db: 10.0 * 4e4f64.log10(),
                gamma_bar: 1e4,
            };
            let exact = ev.ssk(pt, Mode::Exact)?;
            let a = asym(&[ev.coefficient()?.value], pt.gamma_bar);
            Ok((1.0, exact / a))
        })(),
        1e-4,
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_unperturbed() {
        let r = run_selftest();
        for c in r.failures() {
            panic!("{c:?}");
        }
        assert!(r.passed());
    }

    #[test]
    fn one_percent_prefactor_error_is_caught() {
        let r = run_selftest_with(SelftestOptions { asym_perturbation: 0.01 });
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name.contains("tightness")));
    }
}
