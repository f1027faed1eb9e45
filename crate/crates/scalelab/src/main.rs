use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use scalelab::cli::Cli;
use scalelab::{exit, run, write_csv, write_json};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match cli.resolve_from_env().and_then(|config| run(&config)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("scalelab: {e}");
            return ExitCode::from(exit::CONFIG_ERROR);
        }
    };
    if let Err(e) = emit(&report) {
        eprintln!("scalelab: {e:#}");
        return ExitCode::from(exit::GATE_FAILED);
    }
    let (pass, fail, errored) = report.tally();
    eprintln!("{pass} passed, {fail} failed, {errored} errored");
    ExitCode::from(if report.passed() { exit::PASS } else { exit::GATE_FAILED })
}

fn emit(report: &scalelab::Report) -> anyhow::Result<()> {
    let out = &report.config.output;
    match &out.json {
        Some(path) => write_json(report, path).context("emitting JSON report")?,
        None => print!("{}", report.to_json()),
    }
    if let Some(dir) = &out.csv_dir {
        write_csv(report, dir).context("emitting CSV sweeps")?;
    }
    Ok(())
}
