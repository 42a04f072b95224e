mod commands;
mod config;
mod output;

use clap::Parser;
use config::{Command, Config};
use std::path::PathBuf;
use std::process::ExitCode;

/// Scattering data and dispersive decay for −d²/dx² − 1/(4x²) + q(x) on the half-line.
#[derive(Debug, Parser)]
#[command(name = "critwave", version)]
struct Cli {
    /// What to run; overrides `command` in the config file.
    command: Option<Command>,
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files and plot scripts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (0 = all cores). Falls back to CRITWAVE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved; echoed into output headers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
    /// Override a config value, e.g. `--set potential.amplitude=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Print the effective config and exit.
    #[arg(long)]
    print_config: bool,
}

/// Exit codes: 2 configuration, 3 unmet hypothesis, 4 solver failure, 1 failed acceptance criteria.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "config".into(), message: message.into() }
    }
}

impl From<critwave::Error> for Failure {
    fn from(e: critwave::Error) -> Self {
        use critwave::Error::*;
        let code = match &e {
            Hypothesis(_) | ResonanceAtZero(_) => 3,
            Parameter(_) | Domain(_) | Grid(_) | SingularInput(_) => 2,
            _ => 4,
        };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

fn load(cli: &Cli) -> Result<Config, Failure> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            Config::from_toml(&text).map_err(Failure::config)?
        }
        None => Config::default(),
    };
    let mut cfg = base.with_overrides(&cli.sets).map_err(Failure::config)?;
    if cli.command.is_some() {
        cfg.command = cli.command;
    }
    Ok(cfg)
}

fn threads(cli: &Cli) -> Result<usize, Failure> {
    match cli.threads {
        Some(n) => Ok(n),
        None => match std::env::var("CRITWAVE_THREADS") {
            Ok(v) => v.trim().parse().map_err(|_| Failure::config(format!("CRITWAVE_THREADS={v:?} is not a count"))),
            Err(_) => Ok(0),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| {
        if cli.print_config {
            print!("{}", cfg.to_toml());
            return Ok(());
        }
        let n = threads(&cli)?;
        let ctx = commands::Context {
            cfg,
            base: cli.config.as_ref().and_then(|p| p.parent().map(|d| d.to_path_buf())),
            out: cli.out.clone(),
            seed: cli.seed,
            quiet: cli.quiet,
        };
        critwave::exec::with_threads(n, || commands::run(&ctx))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let record = serde_json::json!({
                "error": f.kind,
                "message": f.message,
                "exit_code": f.code,
            });
            eprintln!("{record}");
            ExitCode::from(f.code)
        }
    }
}
