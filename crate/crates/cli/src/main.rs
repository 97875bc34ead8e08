use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rtcheck::amplitude::emit_amplitude_text;
use rtcheck::{
    amplitude_command, catalog_text, emit_report, parse_config, run_suite, AmplitudeQuery, Format, ModelConfig,
};

#[derive(Parser)]
#[command(name = "rtcheck", version, about = "Numerical checks for reflection-transmission algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite on a model.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Overrides the seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the term list of the n-particle in/out amplitude.
    Amplitude {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long = "in", value_delimiter = ',', allow_hyphen_values = true)]
        in_momenta: Vec<f64>,
        #[arg(long = "out", value_delimiter = ',', allow_hyphen_values = true)]
        out_momenta: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        in_iso: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        out_iso: Vec<usize>,
        #[arg(long)]
        allow_nonphysical: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List built-in bulk S-matrices, defects and checks.
    Catalog,
}

fn load(path: &PathBuf) -> Result<ModelConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Verify { config, format, seed } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = run_suite(&cfg).map_err(|e| e.to_string())?;
            print!("{}", emit_report(&report, format));
            Ok(report.pass)
        }
        Command::Amplitude { config, n, in_momenta, out_momenta, in_iso, out_iso, allow_nonphysical, format } => {
            let cfg = load(&config)?;
            let query = AmplitudeQuery { n, in_momenta, out_momenta, in_iso, out_iso, allow_nonphysical };
            let report = amplitude_command(&cfg, &query).map_err(|e| e.to_string())?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
                Format::Text => print!("{}", emit_amplitude_text(&report)),
            }
            Ok(true)
        }
        Command::Catalog => {
            print!("{}", catalog_text());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
