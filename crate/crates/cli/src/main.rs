#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordloc::calibrate::{Calibration, NumericSettings};
use ordloc::check::{run_check, Budget, Suite};
use ordloc::data::{self, Reduction, Source};
use ordloc::estimate::EstimatorKind;
use ordloc::family::{
    exponential_family, normal_family, FamilyKind, LocationFamily, ObservationPair,
};
use ordloc::loss::{make_loss, LossKind, LossSpec};
use ordloc::report::{estimate_all, estimates_to_text, run_estimate_table};
use ordloc::risklab::{
    gpn_sweep, risk_sweep, theta_range, SweepConfig, DEFAULT_REPS, DEFAULT_SEED,
};
use ordloc::Error;

#[derive(Parser, Debug)]
#[command(
    name = "ordloc",
    version,
    about = "Estimators of the larger of two location parameters"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// normal or exponential (ingest defaults to exponential)
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true, default_value_t = 1.0)]
    sigma: f64,
    /// squared, linex or absolute
    #[arg(long, global = true, default_value = "squared")]
    loss: String,
    #[arg(long, global = true, allow_hyphen_values = true)]
    linex_a: Option<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    quad_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    root_tol: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print c0, b0, m0 and the u-indexed curves
    Calibrate {
        /// Comma-separated spacings
        #[arg(long, default_value = "0.5,1,2,5")]
        u: String,
    },
    /// Evaluate the estimators at one observation pair
    Estimate {
        #[arg(long, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, allow_hyphen_values = true)]
        x2: f64,
        /// Include the Pitman-nearness estimators
        #[arg(long)]
        all: bool,
    },
    /// Simulated risk curves
    RiskSweep {
        /// lo:hi:step or a comma-separated list
        #[arg(long, default_value = "0:5:0.25")]
        theta: String,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value = "natural,stein,b0,bz")]
        estimators: String,
    },
    /// Simulated generalized Pitman nearness of est1 relative to est2
    GpnSweep {
        #[arg(long, default_value = "0:5:0.25")]
        theta: String,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value = "pn_improved_m0")]
        est1: String,
        #[arg(long, default_value = "pn")]
        est2: String,
    },
    /// Read a two-sample data set and tabulate estimates (bundled jute data by default)
    Ingest {
        /// CSV with group,value rows
        #[arg(long, conflicts_with = "files")]
        csv: Option<PathBuf>,
        /// Two one-column files
        #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
        files: Option<Vec<PathBuf>>,
        #[arg(long, value_enum, default_value = "sample-minimum")]
        reduction: ReductionArg,
        /// Scale of the raw observations
        #[arg(long, default_value_t = data::JUTE_SIGMA_HAT)]
        sigma_hat: f64,
        /// Comma-separated losses; linex is included when --linex-a is given
        #[arg(long)]
        losses: Option<String>,
    },
    /// Run an invariant suite
    Check {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value = "quick")]
        budget: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReductionArg {
    RawPair,
    SampleMinimum,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
        Err(Failure::Check(report)) => {
            eprintln!("{report}");
            ExitCode::from(3)
        }
    }
}

fn output(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Failure::Usage(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn family(g: &Global, default: FamilyKind) -> CliResult<LocationFamily> {
    let kind = match &g.family {
        Some(name) => name.parse::<FamilyKind>()?,
        None => default,
    };
    Ok(match kind {
        FamilyKind::Normal => normal_family(g.sigma)?,
        FamilyKind::Exponential => exponential_family(g.sigma)?,
        FamilyKind::Custom => {
            return Err(Failure::Usage("custom families are library-only".into()))
        }
    })
}

fn loss_named(name: &str, a: Option<f64>) -> CliResult<LossSpec> {
    Ok(make_loss(name.parse::<LossKind>()?, a)?)
}

fn settings(g: &Global) -> CliResult<NumericSettings> {
    if !(g.quad_tol > 0.0) || !(g.root_tol > 0.0) {
        return Err(Failure::Usage("tolerances must be positive".into()));
    }
    Ok(NumericSettings::new(g.quad_tol, g.root_tol))
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("not a number: '{p}'")))
        })
        .collect()
}

fn parse_theta(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => parse_list(s),
        3 => {
            let v = parse_list(&parts.join(","))?;
            if v.len() != 3 || !(v[2] > 0.0) || v[1] < v[0] {
                return Err(Failure::Usage(format!("bad theta range '{s}'")));
            }
            Ok(theta_range(v[0], v[1], v[2]))
        }
        _ => Err(Failure::Usage(format!(
            "theta must be lo:hi:step or a list, got '{s}'"
        ))),
    }
}

fn sweep_config(g: &Global, theta: &str, reps: usize) -> CliResult<SweepConfig> {
    let mut cfg = SweepConfig::new(
        family(g, FamilyKind::Normal)?,
        loss_named(&g.loss, g.linex_a)?,
    );
    cfg.theta_grid = parse_theta(theta)?;
    cfg.reps = reps;
    cfg.seed = g.seed;
    cfg.settings = settings(g)?;
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Calibrate { u } => {
            let fam = family(g, FamilyKind::Normal)?;
            let loss = loss_named(&g.loss, g.linex_a)?;
            let cal = Calibration::with_settings(&fam, &loss, settings(g)?)?;
            let summary = cal.summary(&parse_list(u)?)?;
            let mut w = output(&g.out)?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&summary)?)?,
                Format::Csv => {
                    writeln!(w, "u,c0u,phi_bz,m0u")?;
                    for r in &summary.curves {
                        writeln!(
                            w,
                            "{:.16e},{:.16e},{:.16e},{:.16e}",
                            r.u, r.c0u, r.phi_bz, r.m0u
                        )?;
                    }
                }
                Format::Text => {
                    writeln!(
                        w,
                        "c0 = {:.10}  b0 = {:.10}  m0 = {:.10}",
                        summary.c0, summary.b0, summary.m0
                    )?;
                    writeln!(
                        w,
                        "{:>12}  {:>14}  {:>14}  {:>14}",
                        "u", "c(0,u)", "phi_bz(u)", "m(0,u)"
                    )?;
                    for r in &summary.curves {
                        writeln!(
                            w,
                            "{:>12.6}  {:>14.8}  {:>14.8}  {:>14.8}",
                            r.u, r.c0u, r.phi_bz, r.m0u
                        )?;
                    }
                }
            }
            w.flush()?;
        }
        Command::Estimate { x1, x2, all } => {
            let fam = family(g, FamilyKind::Normal)?;
            let loss = loss_named(&g.loss, g.linex_a)?;
            let cal = Calibration::with_settings(&fam, &loss, settings(g)?)?;
            let pair = ObservationPair::new(*x1, *x2);
            let mut list = estimate_all(&pair, &cal)?;
            if !all {
                list.truncate(4);
            }
            let mut w = output(&g.out)?;
            match g.format.unwrap_or(Format::Text) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&list)?)?,
                Format::Csv => {
                    writeln!(w, "estimator,value,shrink")?;
                    for e in &list {
                        writeln!(w, "{},{:.16e},{:.16e}", e.kind, e.value, e.shrink)?;
                    }
                }
                Format::Text => write!(w, "{}", estimates_to_text(&list))?,
            }
            w.flush()?;
        }
        Command::RiskSweep {
            theta,
            reps,
            estimators,
        } => {
            let mut cfg = sweep_config(g, theta, *reps)?;
            cfg.estimators = estimators
                .split(',')
                .map(|s| s.parse::<EstimatorKind>())
                .collect::<Result<Vec<_>, _>>()?;
            let curve = risk_sweep(&cfg)?;
            let mut w = output(&g.out)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&curve)?)?,
                _ => curve.write_csv(&mut w)?,
            }
            w.flush()?;
        }
        Command::GpnSweep {
            theta,
            reps,
            est1,
            est2,
        } => {
            let cfg = sweep_config(g, theta, *reps)?;
            let curve = gpn_sweep(&cfg, est1.parse()?, est2.parse()?)?;
            let mut w = output(&g.out)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&curve)?)?,
                _ => curve.write_csv(&mut w)?,
            }
            w.flush()?;
        }
        Command::Ingest {
            csv,
            files,
            reduction,
            sigma_hat,
            losses,
        } => {
            let ds = match (csv, files) {
                (Some(path), _) => data::ingest(Source::TwoColumnCsv(path))?,
                (None, Some(f)) => data::ingest(Source::TwoFiles(&f[0], &f[1]))?,
                (None, None) => data::jute(),
            };
            let kind = match &g.family {
                Some(name) => name.parse::<FamilyKind>()?,
                None => FamilyKind::Exponential,
            };
            let reduction = match reduction {
                ReductionArg::RawPair => Reduction::RawPair,
                ReductionArg::SampleMinimum => Reduction::SampleMinimum,
            };
            let reduced = data::reduce(&ds, kind, *sigma_hat, reduction)?;
            let fam = match kind {
                FamilyKind::Exponential => exponential_family(reduced.sigma_eff)?,
                _ => normal_family(reduced.sigma_eff)?,
            };
            let names = losses.clone().unwrap_or_else(|| {
                if g.linex_a.is_some() {
                    "squared,linex,absolute".into()
                } else {
                    "squared,absolute".into()
                }
            });
            let specs = names
                .split(',')
                .map(|n| loss_named(n.trim(), g.linex_a))
                .collect::<CliResult<Vec<_>>>()?;
            let table = run_estimate_table(&reduced.pair, &fam, &specs)?;
            let mut w = output(&g.out)?;
            match g.format.unwrap_or(Format::Text) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&table)?)?,
                Format::Csv => {
                    writeln!(w, "loss,natural,stein,b0,brewster_zidek")?;
                    for r in &table.rows {
                        writeln!(
                            w,
                            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                            r.loss, r.natural, r.stein, r.b0, r.brewster_zidek
                        )?;
                    }
                }
                Format::Text => {
                    writeln!(
                        w,
                        "groups {} (n={}) and {} (n={}), sigma_eff = {}",
                        ds.labels[0],
                        ds.groups[0].len(),
                        ds.labels[1],
                        ds.groups[1].len(),
                        reduced.sigma_eff
                    )?;
                    write!(w, "{}", table.to_text())?;
                }
            }
            w.flush()?;
        }
        Command::Check { suite, budget } => {
            let suite: Suite = suite.parse()?;
            let budget: Budget = budget.parse()?;
            let report = run_check(suite, budget)?;
            let mut w = output(&g.out)?;
            match g.format.unwrap_or(Format::Text) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?,
                _ => writeln!(w, "{report}")?,
            }
            w.flush()?;
            if !report.passed() {
                return Err(Failure::Check(format!("check suite failed: {suite:?}")));
            }
        }
    }
    Ok(())
}
