use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spdc_cli::{run, Command, RunConfig};

/// Multimode squeezed light from SPDC with a shaped pump.
#[derive(Parser, Debug)]
#[command(name = "spdc", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::load(&cli.config).and_then(|mut config| {
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        run(cli.command, &config, &cli.out)
    });
    match result {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report.summary).unwrap_or_default());
            for name in &report.outputs {
                eprintln!("wrote {}", cli.out.join(name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
