//! `framedim`: command-line front end. Exit status 0 on success, 2 when a
//! check fails, 1 on usage, I/O or numerical errors.

mod args;
mod commands;
mod levels;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;

use args::{Cli, Format};

fn execute(cli: &Cli, argv: &[String]) -> Result<bool> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let outcome = commands::run(&cli.command, &cli.global)?;
    let passed = outcome.checks.iter().all(|c| c.pass);

    if let Some(dir) = &cli.global.emit_plot_data {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, est) in &outcome.curves {
            let path = dir.join(format!("{name}.csv"));
            std::fs::write(&path, framedim::json::curve_csv(est))
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }

    match cli.global.format {
        Format::Json => {
            let summary = json!({
                "command": cli.command.name(),
                "arguments": argv,
                "seed": cli.global.seed,
                "status": if passed { "pass" } else { "fail" },
                "result": outcome.result,
            });
            print!("{}", framedim::json::canonical_value(&summary));
        }
        Format::Csv => {
            anyhow::ensure!(
                !outcome.curves.is_empty(),
                "`{}` has no curve to write as CSV",
                cli.command.name()
            );
            for (k, (name, est)) in outcome.curves.iter().enumerate() {
                if outcome.curves.len() > 1 {
                    if k > 0 {
                        println!();
                    }
                    println!("# {name}");
                }
                print!("{}", framedim::json::curve_csv(est));
            }
        }
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match execute(&cli, &argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
