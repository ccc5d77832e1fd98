use std::path::PathBuf;
use std::process::ExitCode;

use attoqo_cli::{parse_config, run, RunError, TOOL_VERSION};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "attoqo", about = "Quantum optics of intense laser-matter interaction", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its outputs and manifest.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// Print the tool version.
    Version,
}

fn fail(err: RunError, out: Option<&std::path::Path>) -> ExitCode {
    eprintln!("error: {err}");
    eprint!("{}", err.record());
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(dir.join("error.txt"), err.record());
        }
    }
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("attoqo {TOOL_VERSION}");
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match parse_config(&config) {
            Ok(cfg) => {
                println!("ok: scenario={}", cfg.scenario.name());
                ExitCode::SUCCESS
            }
            Err(e) => fail(RunError::Parse(e), None),
        },
        Command::Run { config, out, seed, threads } => {
            let mut cfg = match parse_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(RunError::Parse(e), out.as_deref()),
            };
            if let Some(s) = seed {
                cfg.seed = Some(s);
                if let Some(d) = cfg.drive.as_mut() {
                    d.seed = Some(s);
                }
            }
            let dir = out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
            match run(&cfg, Some(&dir), threads) {
                Ok(m) => {
                    println!("{} outputs written to {}", m.outputs.len(), dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e, Some(&dir)),
            }
        }
    }
}
