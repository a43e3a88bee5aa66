use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use supertransport::config::{Config, DEFAULT_CONFIG};
use supertransport::flows::{flow_even, flow_odd_trajectory};
use supertransport::grassmann::Parity;
use supertransport::transport::{adiabatic_sweep, transport, SolverOptions};
use supertransport::{verify, Error};

/// Parallel transport along superpaths, flows of super vector fields and an
/// identity-verification suite, all driven by a JSON config (schema 1).
///
/// Exit codes: 0 success, 1 configuration error, 2 numerical error or a
/// failed verify check. Errors are printed to stderr as JSON.
#[derive(Debug, Parser)]
#[command(name = "supertransport", version)]
struct Cli {
    /// Config file; the bundled default config is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of integration steps: overrides the transport step size
    /// (h = body(t_end) / steps) and the flow step count.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Print the per-check residual/tolerance table to stderr (verify).
    #[arg(long, global = true, default_value_t = false)]
    tolerance_report: bool,
    /// Seed for the randomized verify instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transport map SP(c) (JSON) along the configured path to the end point.
    Transport,
    /// Trajectory (CSV) of the configured even or odd flow.
    Flow,
    /// Identity suite report (JSON).
    Verify,
    /// Adiabatic sweep over the configured λ list (JSON).
    Sweep,
}

enum Failure {
    Lib(Error),
    Io(String),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn solver(cfg: &Config, steps: Option<usize>) -> Result<SolverOptions, Failure> {
    match steps {
        None => Ok(cfg.solver()),
        Some(0) => Err(Error::Config("--steps must be positive".into()).into()),
        Some(k) => {
            let body = cfg.end_point()?.body().abs();
            Ok(SolverOptions { h: if body > 0.0 { body / k as f64 } else { cfg.h } })
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => Config::from_path(path)?,
        None => Config::from_str(DEFAULT_CONFIG)?,
    };
    match cli.command {
        Command::Transport => {
            let map = transport(
                &cfg.superpath()?,
                &cfg.source()?,
                &cfg.end_point()?,
                supertransport::geometry::Variant::D,
                solver(&cfg, cli.steps)?,
            )?;
            emit(&cli.out, &pretty(&map.to_json()))
        }
        Command::Flow => {
            let spec = cfg.flow.as_ref().ok_or_else(|| Error::Config("config has no \"flow\"".into()))?;
            let steps = cli.steps.unwrap_or(spec.steps);
            let field = cfg.flow_field()?;
            let init = cfg.flow_initial()?;
            let traj = match spec.parity {
                Parity::Even => flow_even(&field, &init, spec.t_end, steps)?,
                Parity::Odd => flow_odd_trajectory(&field, &init, &cfg.flow_theta()?, spec.t_end, steps)?,
            };
            let (names, rows) = traj.table();
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<String> = std::iter::once("t".to_string()).chain(names).collect();
            w.write_record(&header).map_err(|e| Failure::Io(e.to_string()))?;
            for row in rows {
                w.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(|e| Failure::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
            emit(&cli.out, &String::from_utf8(bytes).expect("CSV of numbers is UTF-8"))
        }
        Command::Verify => {
            let report = verify::run(&cfg, cli.seed)?;
            if cli.tolerance_report {
                eprint!("{}", report.tolerance_table());
            }
            emit(&cli.out, &pretty(&serde_json::to_value(&report).expect("report serializes")))?;
            if report.all_pass {
                Ok(())
            } else {
                Err(Failure::ChecksFailed)
            }
        }
        Command::Sweep => {
            let spec = cfg.sweep.as_ref().ok_or_else(|| Error::Config("config has no \"sweep\"".into()))?;
            let sc = cfg.superconnection()?;
            let rows = adiabatic_sweep(&cfg.superpath()?, &sc, &cfg.end_point()?, &spec.lambdas, solver(&cfg, cli.steps)?)?;
            let v = serde_json::Value::Array(rows.iter().map(|r| r.to_json()).collect());
            emit(&cli.out, &pretty(&v))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Lib(e) => (if e.is_config() { 1 } else { 2 }, e.kind().to_string(), e.to_string()),
                Failure::Io(m) => (1, "io".into(), m),
                Failure::ChecksFailed => (2, "verify".into(), "one or more identity checks failed".into()),
            };
            let body = serde_json::json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
