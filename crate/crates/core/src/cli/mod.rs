//! Command-line front end: argument parsing, config overrides, dispatch and
//! report rendering.

mod args;
mod commands;
mod output;

pub use args::{
    AscentArgs, CensusFn, Cli, Command, ControlsKind, Dynamics, Format, GlobalArgs, Kappa, RunConfig, SystemKind,
};
pub use commands::{run, CliError, RunReport, EXIT_CONFIG, EXIT_EXPECTATION, EXIT_NUMERICAL, EXIT_OK};
pub use output::{format_float, hex_float, with_hex, Cell, Table};

use std::io::Write;

use clap::Parser;

pub const THREADS_ENV: &str = "LANDSCAPE_LAB_THREADS";

/// Parses `argv`, runs the command, writes the report and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let config = match resolve_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    configure_threads(config.threads);

    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = write_report(&report, &config) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if report.expectation_failed {
        eprintln!("check failed: expected condition did not hold");
        return EXIT_EXPECTATION;
    }
    EXIT_OK
}

/// Flags first, then the `--config` file on top.
pub fn resolve_config(cli: Cli) -> Result<RunConfig, CliError> {
    let path = cli.global.config.clone();
    let config = RunConfig::from_cli(cli);
    match path {
        None => Ok(config),
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("cannot read {p}: {e}")))?;
            let overrides: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{p}: {e}")))?;
            config.with_overrides(&overrides).map_err(CliError::Config)
        }
    }
}

/// Renders the report in the configured format.
pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn write_report(report: &RunReport, config: &RunConfig) -> std::io::Result<()> {
    let text = render(report, config.format);
    match &config.output {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(flag: Option<usize>) {
    let cap = flag.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = cap.filter(|&n| n > 0) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_flag: Option<usize>) {}
