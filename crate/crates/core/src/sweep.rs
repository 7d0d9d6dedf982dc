//! SNR sweeps producing asymptotic bound, exact bound and simulated BER columns,
//! and their CSV form.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exactperf::{BoundEvaluator, Mode, Modulation, ModulusScale, SnrPoint, SystemConfig};
use crate::fading::FadingFamily;
use crate::montecarlo::{simulate_ber, StopRule};

pub const CSV_COLUMNS: &str = "snr_db,abep_asym,abep_exact,ber_sim,ci_low,ci_high";
pub const TOOL_VERSION: &str = concat!("smperf ", env!("CARGO_PKG_VERSION"));

/// `start:stop:step` in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::InvalidParameter("SNR grid values must be finite".into()));
        }
        if !(start <= stop) {
            return Err(Error::InvalidParameter(format!("SNR grid start {start} exceeds stop {stop}")));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!("SNR grid step {step} must be positive")));
        }
        Ok(SnrGrid { start, stop, step })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::InvalidParameter(format!("SNR grid '{text}' is not start:stop:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        SnrGrid::new(v[0], v[1], v[2])
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outputs {
    pub asym: bool,
    pub exact: bool,
    pub sim: bool,
}

impl Outputs {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Outputs::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "asym" => out.asym = true,
                "exact" => out.exact = true,
                "sim" => out.sim = true,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown output '{other}' (expected asym, exact, sim)"
                    )))
                }
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.asym || self.exact || self.sim) {
            return Err(Error::InvalidParameter("at least one of asym, exact, sim must be selected".into()));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        let mut v = Vec::new();
        if self.asym {
            v.push("asym");
        }
        if self.exact {
            v.push("exact");
        }
        if self.sim {
            v.push("sim");
        }
        v.join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub cfg: SystemConfig,
    pub grid: SnrGrid,
    pub outputs: Outputs,
    pub seed: u64,
    pub stop: StopRule,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.outputs.validate()?;
        SnrGrid::new(self.grid.start, self.grid.stop, self.grid.step)?;
        if self.stop.min_bit_errors == 0 || self.stop.max_bits == 0 {
            return Err(Error::InvalidParameter("stop rule values must be positive".into()));
        }
        Ok(())
    }
}

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    Absent,
    Value(f64),
    Failed,
}

impl Field {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Field::Value(v) => Some(v),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match *self {
            Field::Absent => String::new(),
            Field::Value(v) => format!("{v:.16e}"),
            Field::Failed => "ERR".into(),
        }
    }

    fn parse(text: &str) -> Result<Self> {
        match text {
            "" => Ok(Field::Absent),
            "ERR" => Ok(Field::Failed),
            t => t
                .parse::<f64>()
                .map(Field::Value)
                .map_err(|_| Error::InvalidParameter(format!("bad CSV number '{t}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub snr_db: f64,
    pub abep_asym: Field,
    pub abep_exact: Field,
    pub ber_sim: Field,
    pub ci_low: Field,
    pub ci_high: Field,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerformanceCurve {
    pub rows: Vec<CurveRow>,
    /// Per-point failure messages, in grid order.
    pub failures: Vec<String>,
}

/// Human-readable fading description for manifests and reports.
pub fn describe_family(f: &FadingFamily) -> String {
    match *f {
        FadingFamily::Nakagami { m, omega } => format!("nakagami m={m} omega={omega}"),
        FadingFamily::GeneralizedK { m, m_s, omega } => format!("gk m={m} ms={m_s} omega={omega}"),
        FadingFamily::Egk(p) => format!(
            "egk m={} beta={} ms={} betas={} omega={}",
            p.m(),
            p.beta(),
            p.m_s(),
            p.beta_s(),
            p.omega()
        ),
    }
}

pub fn describe_config(cfg: &SystemConfig) -> String {
    let modulation = match cfg.modulation {
        Modulation::Ssk => "ssk".to_string(),
        Modulation::Sm { m, kappa0 } => {
            let scale = match cfg.modulus_scale {
                ModulusScale::Kappa0Squared => "kappa0^2",
                ModulusScale::Kappa0 => "kappa0",
            };
            format!("sm M={m} kappa0={kappa0} modulus_scale={scale}")
        }
    };
    format!("{modulation} nt={} nr={} {}", cfg.n_t, cfg.n_r, describe_family(&cfg.family))
}

/// Evaluates every requested column on the grid. Numeric failures at a point
/// mark that cell `ERR` and the sweep carries on.
pub fn run_sweep(spec: &SweepSpec) -> Result<PerformanceCurve> {
    spec.validate()?;
    let mut evaluator = BoundEvaluator::new(spec.cfg)?;
    let mut curve = PerformanceCurve::default();
    for db in spec.grid.points() {
        let pt = SnrPoint::from_db(db);
        let mut bound = |mode: Mode, name: &str, curve: &mut PerformanceCurve| match evaluator.abep(pt, mode) {
            Ok(v) => Field::Value(v),
            Err(e) => {
                log::warn!("{name} bound at {db} dB failed: {e}");
                curve.failures.push(format!("{db} dB {name}: {e}"));
                Field::Failed
            }
        };
        let abep_asym = if spec.outputs.asym {
            bound(Mode::Asymptotic, "asym", &mut curve)
        } else {
            Field::Absent
        };
        let abep_exact = if spec.outputs.exact {
            bound(Mode::Exact, "exact", &mut curve)
        } else {
            Field::Absent
        };
        let (ber_sim, ci_low, ci_high) = if spec.outputs.sim {
            let est = simulate_ber(&spec.cfg, pt, spec.stop, spec.seed);
            log::info!("{db} dB: {} errors in {} bits", est.bit_errors, est.bits_sent);
            (Field::Value(est.ber), Field::Value(est.ci95_low), Field::Value(est.ci95_high))
        } else {
            (Field::Absent, Field::Absent, Field::Absent)
        };
        curve.rows.push(CurveRow {
            snr_db: db,
            abep_asym,
            abep_exact,
            ber_sim,
            ci_low,
            ci_high,
        });
    }
    Ok(curve)
}

/// CSV text: `#` manifest lines, the column header, one row per SNR point.
pub fn render_csv(spec: &SweepSpec, curve: &PerformanceCurve) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# tool: {TOOL_VERSION}");
    let _ = writeln!(out, "# config: {}", describe_config(&spec.cfg));
    let _ = writeln!(
        out,
        "# snr_db: {}:{}:{} outputs: {} seed: {} min_bit_errors: {} max_bits: {}",
        spec.grid.start,
        spec.grid.stop,
        spec.grid.step,
        spec.outputs.describe(),
        spec.seed,
        spec.stop.min_bit_errors,
        spec.stop.max_bits
    );
    let _ = writeln!(out, "# snr convention: gamma_bar = Es/(4 N0)");
    for f in &curve.failures {
        let _ = writeln!(out, "# error: {f}");
    }
    let _ = writeln!(out, "{CSV_COLUMNS}");
    for r in &curve.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            Field::Value(r.snr_db).render(),
            r.abep_asym.render(),
            r.abep_exact.render(),
            r.ber_sim.render(),
            r.ci_low.render(),
            r.ci_high.render()
        );
    }
    out
}

/// Rows of a CSV produced by [`render_csv`]; manifest lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == CSV_COLUMNS => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "CSV header mismatch: expected '{CSV_COLUMNS}', found {other:?}"
            )))
        }
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 6 {
                return Err(Error::InvalidParameter(format!("CSV row has {} fields: '{line}'", cells.len())));
            }
            let snr_db = Field::parse(cells[0])?
                .value()
                .ok_or_else(|| Error::InvalidParameter(format!("CSV row without SNR: '{line}'")))?;
            Ok(CurveRow {
                snr_db,
                abep_asym: Field::parse(cells[1])?,
                abep_exact: Field::parse(cells[2])?,
                ber_sim: Field::parse(cells[3])?,
                ci_low: Field::parse(cells[4])?,
                ci_high: Field::parse(cells[5])?,
            })
        })
        .collect()
}

/// Writes `contents` through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
