use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use smperf::asymptotics::{c_egk, c_gk, c_nakagami, c_numeric, AsymptoticCoefficient};
use smperf::exactperf::{diversity_report, ModulusScale, SystemConfig};
use smperf::fading::{BranchPair, FadingFamily};
use smperf::montecarlo::StopRule;
use smperf::selftest::{run_selftest_with, SelftestOptions};
use smperf::sweep::{render_csv, run_sweep, write_atomic, Outputs, SnrGrid, SweepSpec};
use smperf::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "smperf", version, about = "ABEP bounds, asymptotics and simulation for SSK/SM MIMO over generalized fading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Space shift keying sweep.
    Ssk(SskArgs),
    /// Spatial modulation (M-PSK) sweep.
    Sm(SmArgs),
    /// Print the high-SNR coefficient by every applicable method.
    Coeff(FadingArgs),
    /// Run the built-in identity checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Nakagami,
    Gk,
    Egk,
}

#[derive(Args, Debug)]
struct FadingArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    m: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    ms: Option<f64>,
    #[arg(long)]
    betas: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    nt: usize,
    #[arg(long, default_value_t = 1)]
    nr: usize,
    #[command(flatten)]
    fading: FadingArgs,
    /// E_s/N_0 grid in dB, `start:stop:step`.
    #[arg(long)]
    snr: String,
    /// Comma-separated subset of asym,exact,sim.
    #[arg(long, default_value = "asym,exact")]
    outputs: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    min_errors: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_bits: u64,
}

#[derive(Args, Debug)]
struct SskArgs {
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Kappa0Squared,
    Kappa0,
}

#[derive(Args, Debug)]
struct SmArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// PSK constellation size.
    #[arg(long = "M")]
    m_psk: usize,
    #[arg(long, default_value_t = 1.0)]
    kappa0: f64,
    #[arg(long, value_enum, default_value_t = ScaleArg::Kappa0Squared)]
    modulus_scale: ScaleArg,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb_asym: f64,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn family(a: &FadingArgs) -> Result<FadingFamily, Failure> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Failure::Usage(format!("--{name} is required for --family {:?}", a.family).to_lowercase()))
    };
    Ok(match a.family {
        Family::Nakagami => FadingFamily::nakagami(a.m, a.omega)?,
        Family::Gk => FadingFamily::generalized_k(a.m, need(a.ms, "ms")?, a.omega)?,
        Family::Egk => FadingFamily::egk(a.m, need(a.beta, "beta")?, need(a.ms, "ms")?, need(a.betas, "betas")?, a.omega)?,
    })
}

fn sweep(args: &SweepArgs, cfg: SystemConfig) -> Result<(), Failure> {
    let spec = SweepSpec {
        cfg,
        grid: SnrGrid::parse(&args.snr)?,
        outputs: Outputs::parse(&args.outputs)?,
        seed: args.seed,
        stop: StopRule {
            min_bit_errors: args.min_errors,
            max_bits: args.max_bits,
        },
    };
    spec.validate()?;
    let div = diversity_report(&cfg);
    log::info!("diversity: {div:?}");
    let curve = run_sweep(&spec)?;
    let csv = render_csv(&spec, &curve);
    match &args.out {
        Some(path) => write_atomic(path, &csv)?,
        None => print!("{csv}"),
    }
    if !curve.failures.is_empty() {
        return Err(Failure::Numeric(curve.failures.join("; ")));
    }
    Ok(())
}

fn print_coefficient(name: &str, r: smperf::Result<AsymptoticCoefficient>) -> bool {
    match r {
        Ok(c) => {
            println!("{name:<10} {:.16e}  (achieved tol {:.1e})", c.value, c.achieved_tol);
            true
        }
        Err(e) => {
            println!("{name:<10} error: {e}");
            false
        }
    }
}

fn coeff(args: &FadingArgs) -> Result<(), Failure> {
    let pair = BranchPair::iid(family(args)?);
    let mut ok = print_coefficient("numeric", c_numeric(&pair));
    match pair.first {
        FadingFamily::Nakagami { .. } => ok &= print_coefficient("nakagami", c_nakagami(&pair)),
        _ => {
            if pair.first.as_generalized_k().is_some() {
                ok &= print_coefficient("gk", c_gk(&pair));
            }
            ok &= print_coefficient("egk", c_egk(&pair));
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Numeric("a coefficient evaluation failed".into()))
    }
}

fn selftest(args: &SelftestArgs) -> ExitCode {
    let report = run_selftest_with(SelftestOptions {
        asym_perturbation: args.perturb_asym,
    });
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        match &c.note {
            Some(n) => println!("{status} {}: {n}", c.name),
            None => println!(
                "{status} {}: expected {:.10e}, actual {:.10e}, tolerance {:.1e}",
                c.name, c.expected, c.actual, c.tolerance
            ),
        }
    }
    if report.passed() {
        println!("selftest: {} checks passed", report.checks.len());
        ExitCode::SUCCESS
    } else {
        println!("selftest: {} of {} checks failed", report.failures().count(), report.checks.len());
        ExitCode::from(EXIT_SELFTEST)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Ssk(a) => family(&a.sweep.fading)
            .and_then(|f| Ok(SystemConfig::ssk(a.sweep.nt, a.sweep.nr, f)?))
            .and_then(|cfg| sweep(&a.sweep, cfg)),
        Command::Sm(a) => family(&a.sweep.fading)
            .and_then(|f| Ok(SystemConfig::sm(a.sweep.nt, a.sweep.nr, a.m_psk, a.kappa0, f)?))
            .map(|cfg| {
                cfg.with_modulus_scale(match a.modulus_scale {
                    ScaleArg::Kappa0Squared => ModulusScale::Kappa0Squared,
                    ScaleArg::Kappa0 => ModulusScale::Kappa0,
                })
            })
            .and_then(|cfg| sweep(&a.sweep, cfg)),
        Command::Coeff(a) => coeff(a),
        Command::Selftest(a) => return selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
