use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dressed_core::config::{parse_config_with, parse_override, Config};
use dressed_core::output::{emit_outputs, emit_sweep, summary};
use dressed_core::scenarios::{builtin, run_scenario, run_sweep, Output, BUILTIN_NAMES};
use dressed_core::{Error, ErrorCategory, Result};

/// Non-adiabatic dressed states of a driven two-level system.
///
/// CONFIG is a TOML file or the name of a built-in scenario
/// (see `dressed list-scenarios`).
#[derive(Parser)]
#[command(name = "dressed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its tables.
    Run(RunArgs),
    /// Run a parameter sweep and write sweep.csv.
    Sweep(RunArgs),
    /// Write only the adiabaticity report of a scenario.
    Check(RunArgs),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario or sweep file, or a built-in scenario name.
    config: String,
    /// Output directory [default: out/<name>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config value, e.g. `--set pulse.envelope.width=400`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Columns to plot as SVG, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "COL,...")]
    plot: Vec<String>,
    /// Oracle relative tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Oracle absolute tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
}

/// `println!` that ignores a closed stdout (e.g. output piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Validation => 2,
        ErrorCategory::Numerical => 3,
        ErrorCategory::Io => 4,
    }
}

fn load(args: &RunArgs) -> Result<Config> {
    let path = Path::new(&args.config);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?
    } else if builtin(&args.config).is_some() {
        format!("extends = {:?}\n", args.config)
    } else {
        return Err(Error::Config(format!(
            "`{}` is neither a readable file nor a built-in scenario ({})",
            args.config,
            BUILTIN_NAMES.join(", ")
        )));
    };
    let mut overrides = args
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    for (key, value) in [
        ("numerics.rel_tol", args.rel_tol),
        ("numerics.abs_tol", args.abs_tol),
    ] {
        if let Some(v) = value {
            overrides.push(parse_override(&format!("{key}={v:?}"))?);
        }
    }
    parse_config_with(&text, &overrides)
}

fn out_dir(args: &RunArgs, name: &str) -> PathBuf {
    args.out
        .clone()
        .unwrap_or_else(|| Path::new("out").join(name))
}

fn report(files: &[PathBuf]) {
    for f in files {
        say!("wrote {}", f.display());
    }
}

fn run(args: &RunArgs, check: bool) -> Result<()> {
    let Config::Scenario(mut scenario) = load(args)? else {
        return Err(Error::InvalidScenario(
            "this is a sweep file; use `dressed sweep`".into(),
        ));
    };
    if check {
        scenario.outputs = [Output::Adiabaticity].into();
    }
    let bundle = run_scenario(&scenario)?;
    let files = emit_outputs(&bundle, &out_dir(args, &scenario.name), &args.plot)?;
    say!("{}", summary(&bundle).trim_end());
    report(&files);
    Ok(())
}

fn sweep(args: &RunArgs) -> Result<()> {
    let Config::Sweep(spec) = load(args)? else {
        return Err(Error::InvalidScenario(
            "this is a scenario, not a sweep; a sweep file needs a [sweep] table".into(),
        ));
    };
    let table = run_sweep(&spec)?;
    let files = emit_sweep(
        &table,
        &spec,
        &out_dir(args, &format!("{}-sweep", spec.base.name)),
        &args.plot,
    )?;
    let failed = table.points.iter().filter(|p| p.error.is_some()).count();
    say!(
        "{} points along {}, {} failed",
        table.points.len(),
        table.axis,
        failed
    );
    for p in table.points.iter().filter(|p| p.error.is_some()) {
        say!(
            "  {} = {}: {}",
            table.axis,
            p.value,
            p.error.as_deref().unwrap_or_default()
        );
    }
    report(&files);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args, false),
        Command::Check(args) => run(args, true),
        Command::Sweep(args) => sweep(args),
        Command::ListScenarios => {
            for name in BUILTIN_NAMES {
                let s = builtin(name).expect("listed");
                say!("{name:20} {}", s.description.unwrap_or_default());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.category()))
        }
    }
}
