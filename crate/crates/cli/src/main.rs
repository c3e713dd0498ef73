use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;
mod text;

use commands::{Flags, Outcome, Status};

#[derive(Parser)]
#[command(name = "nctorus", version, about = "Trace ranges, orbifold criteria and Heisenberg module checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// JSON input document.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, alias = "t_max", default_value_t = 64)]
    t_max: u64,
    #[arg(long, global = true, alias = "coeff_bound", default_value_t = 10)]
    coeff_bound: u32,
    #[arg(long, global = true, alias = "max_order", default_value_t = 24)]
    max_order: usize,
    #[arg(long, global = true, alias = "orbit_iterations", default_value_t = nctorus::orbit::DEFAULT_ORBIT_ITERATIONS)]
    orbit_iterations: usize,
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Pfaffian of a skew matrix, or of one principal minor.
    Pfaffian,
    /// All pfaffian minors.
    Minors,
    /// Smallest t with every minor of θ + tZ positive.
    #[command(alias = "find_t")]
    FindT,
    /// Whether Wᵗ θ W ≡ θ modulo integer matrices.
    #[command(alias = "check_symplectic")]
    CheckSymplectic,
    /// Order of an integer matrix.
    Order,
    /// Whether no nonzero lattice point is fixed by a nontrivial power of W.
    Freeness,
    /// The module-extension condition for one or all index tuples.
    #[command(alias = "extension_check")]
    ExtensionCheck,
    /// ℤ-module generated by 1 and the pfaffian minors.
    #[command(alias = "trace_range")]
    TraceRange,
    /// Lower and upper bounds for the crossed-product trace range.
    #[command(alias = "orbifold_range")]
    OrbifoldRange,
    /// Search for λ > 0 with R1 = λ·R2.
    #[command(alias = "morita_lambda")]
    MoritaLambda,
    /// Whether two numbers are GL(2,ℤ)-equivalent.
    #[command(alias = "gl2_orbit")]
    Gl2Orbit,
    /// Numerical checks of the Heisenberg module relations.
    #[command(alias = "verify_module")]
    VerifyModule,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Pfaffian => "pfaffian",
            Command::Minors => "minors",
            Command::FindT => "find-t",
            Command::CheckSymplectic => "check-symplectic",
            Command::Order => "order",
            Command::Freeness => "freeness",
            Command::ExtensionCheck => "extension-check",
            Command::TraceRange => "trace-range",
            Command::OrbifoldRange => "orbifold-range",
            Command::MoritaLambda => "morita-lambda",
            Command::Gl2Orbit => "gl2-orbit",
            Command::VerifyModule => "verify-module",
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<Value, (String, String)> {
    let path = path.as_ref().ok_or_else(|| ("SCHEMA_ERROR".to_string(), "--input is required".to_string()))?;
    let raw = fs::read_to_string(path).map_err(|e| ("IO_ERROR".to_string(), format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| ("PARSE_ERROR".to_string(), format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let o = &cli.opts;
    let flags = Flags {
        t_max: o.t_max,
        coeff_bound: o.coeff_bound,
        max_order: o.max_order,
        orbit_iterations: o.orbit_iterations,
        tolerance: o.tolerance,
    };
    let name = cli.command.name();
    let start = Instant::now();
    let outcome = match read_input(&o.input) {
        Ok(doc) => commands::run(name, &doc, &flags),
        Err((code, message)) => Outcome::error(code, message),
    };
    let elapsed = start.elapsed();

    let mut report = json!({
        "command": name,
        "status": outcome.status.as_str(),
        "payload": outcome.payload,
        "flags": flags.to_json(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let Some((code, message)) = &outcome.error {
        report["error"] = json!({ "code": code, "message": message });
    }
    if o.timing {
        report["timing_ms"] = json!(elapsed.as_secs_f64() * 1e3);
    }

    let mut bytes = match o.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize"),
        Format::Text => text::summary(name, &outcome, &flags),
    };
    bytes.push('\n');
    let written = match &o.output {
        Some(path) => fs::write(path, &bytes),
        None => std::io::stdout().write_all(bytes.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("nctorus: cannot write report: {e}");
        return ExitCode::from(1);
    }
    match outcome.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Error => ExitCode::from(1),
        Status::Unknown => ExitCode::from(2),
    }
}
