mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use report::RunReport;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let (command, parameters) = report::describe(&cli.command);
    match commands::dispatch(&cli) {
        Ok(outcome) => {
            let report = RunReport {
                command,
                parameters,
                result: outcome.result,
                seed: outcome.seeded.then_some(cli.seed),
                elapsed_ms: cli.timing.then(|| start.elapsed().as_millis()),
            };
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", outcome.text.unwrap_or_else(|| report::render_text(&report.result)));
                if let Some(ms) = report.elapsed_ms {
                    println!("elapsed: {ms} ms");
                }
            }
            ExitCode::from(if outcome.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
