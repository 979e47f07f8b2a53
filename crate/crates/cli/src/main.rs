//! `weylbound` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 convergence failure
//! (including a failed `--seed-check`). Warnings go to standard error.

mod args;
mod checks;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use weylbound::io::{to_csv, to_json, to_svg, Chart, Series};
use weylbound::Error;

use args::{Cli, Command, Format};
use commands::Report;

fn exit_for(e: &Error) -> ExitCode {
    if e.is_convergence() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

// Without a chart of its own, a table plots every numeric column against the first.
fn default_chart(r: &Report) -> Chart {
    let cols = &r.table.columns;
    let num = |c: &weylbound::io::Cell| match c {
        weylbound::io::Cell::Num(x) => Some(*x),
        weylbound::io::Cell::Text(_) => None,
    };
    let series = (1..cols.len())
        .map(|j| Series {
            name: cols[j].clone(),
            points: r.table.rows.iter().filter_map(|row| Some((num(&row[0])?, num(&row[j])?))).collect(),
        })
        .collect();
    Chart {
        title: String::new(),
        x_label: cols.first().cloned().unwrap_or_default(),
        y_label: String::new(),
        log_y: false,
        series,
    }
}

fn render(r: Report, format: Option<Format>) -> Result<String, Error> {
    match (format, &r.text) {
        (None, Some(text)) => Ok(format!("{text}\n")),
        (None | Some(Format::Csv), _) => to_csv(&r.table),
        (Some(Format::Json), _) => Ok(to_json(&r.table) + "\n"),
        (Some(Format::Svg), _) => Ok(to_svg(&r.chart.clone().unwrap_or_else(|| default_chart(&r)))),
    }
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

    if cli.common.seed_check {
        match checks::seed_check(&cli.command) {
            Ok(failed) if failed.is_empty() => eprintln!("seed check passed"),
            Ok(failed) => {
                for f in failed {
                    eprintln!("seed check FAILED: {f}");
                }
                return ExitCode::from(2);
            }
            Err(e) => {
                eprintln!("seed check FAILED: {e}");
                return ExitCode::from(2);
            }
        }
    }

    let mut format = cli.common.format;
    if let Command::HeatRemainder { svg: true, .. } = cli.command {
        format = Some(Format::Svg);
    }

    let report = match commands::run(&cli.command, cli.common.tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match render(report, format) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
