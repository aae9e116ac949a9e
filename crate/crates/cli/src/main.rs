//! `wqed-scatter`: command-line sweeps over the waveguide-QED scattering
//! library, exported as CSV.
//!
//! Usage: `wqed-scatter <scenario> --config <path> [--out <path>] [--emit-plot]`
//!
//! Scenarios: `spectrum` (transmon levels vs gate charge), `two-level`
//! (reflection/transmission vs probe detuning), `three-level` (probe
//! response under a control tone), `g2` (intensity correlations of the
//! scattered field).  The environment variable `WQED_THREADS` caps the
//! worker-thread count; results are identical for any setting.
//!
//! Exit codes: 0 success, 1 solver or output failure, 2 usage/configuration
//! error.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::Parser;

use config::{parse_config, RunConfig, Scenario};

#[derive(Parser)]
#[command(
    name = "wqed-scatter",
    version,
    about = "Microwave scattering on a transmission-line-coupled transmon: \
             spectra, line shapes, and photon correlations as CSV sweeps"
)]
struct Cli {
    /// Which sweep to run.
    #[arg(value_enum)]
    scenario: Scenario,

    /// Key=value configuration file (# starts a comment).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output CSV path [default: <scenario>.csv].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Also write a matplotlib script (same stem, .py) next to the CSV.
    #[arg(long)]
    emit_plot: bool,
}

/// Failure paired with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

/// Configuration or usage problem: exit code 2.
fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

/// Solver or output problem: exit code 1.
fn runtime(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn real_main(cli: Cli) -> Result<(), Failure> {
    init_thread_pool().map_err(usage)?;

    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("cannot read config file {}", cli.config.display()))
        .map_err(usage)?;
    let cfg: RunConfig = parse_config(&text, cli.scenario).map_err(usage)?;

    let table = run::execute(&cfg).map_err(runtime)?;

    let out = cli
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.scenario.name())));
    run::write_csv(&out, &table).map_err(runtime)?;
    println!("wrote {} ({} rows)", out.display(), table.rows.len());

    if cli.emit_plot {
        let csv_name = out
            .file_name()
            .ok_or_else(|| usage(anyhow!("output path {} has no file name", out.display())))?
            .to_string_lossy()
            .into_owned();
        let script_path = out.with_extension("py");
        let script = run::plot_script(cli.scenario, &csv_name, &table);
        std::fs::write(&script_path, script)
            .with_context(|| format!("cannot write plot script {}", script_path.display()))
            .map_err(runtime)?;
        println!("wrote {}", script_path.display());
    }
    Ok(())
}

/// Applies the `WQED_THREADS` cap to the global worker pool.  Unset means
/// one worker per available core; the output is bytewise identical either
/// way, only the wall time changes.
fn init_thread_pool() -> anyhow::Result<()> {
    match std::env::var("WQED_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(anyhow!("environment variable WQED_THREADS is not valid UTF-8"))
        }
        Ok(s) => match s.parse::<usize>() {
            Ok(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot configure the worker-thread pool"),
            _ => Err(anyhow!(
                "environment variable WQED_THREADS must be a positive integer, got \"{s}\""
            )),
        },
    }
}
