use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use subrayleigh::config::{load_config, output_path};
use subrayleigh::output::{read_result, write_json, write_result, OutputFormat};
use subrayleigh::scan::{analyze, run_oracle_check, run_scan_with_workers, ScanResult};
use subrayleigh::Error;

/// Far-field diffraction and multi-photon correlation scans.
///
/// Exit status: 0 success, 2 configuration error, 3 numerical failure,
/// 4 I/O failure.
#[derive(Parser)]
#[command(name = "subrayleigh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario over its detector scan and write the result.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the far-field amplitude against the Fresnel integral.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Re-analyze a JSON scan result and print its fringe metrics.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output file; defaults to the config's output_path for `scan`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

impl Common {
    fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Scan { config, common } => {
            let config = load_config(&config)?;
            let result = run_scan_with_workers(&config, common.workers())?;
            let path = output_path(&config, common.output.as_deref());
            write_result(&result, common.format.into(), &path)?;
            print_summary(&result);
            println!("wrote {}", path.display());
        }
        Command::Oracle { config, common } => {
            let config = load_config(&config)?;
            let report = run_oracle_check(&config, common.workers())?;
            match &common.output {
                Some(path) => {
                    write_json(&report, path)?;
                    println!("wrote {}", path.display());
                }
                None => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ),
            }
            if !report.far_field_regime {
                eprintln!(
                    "warning: far-field validity margin {:.3} is below the far-field regime",
                    report.fraunhofer_validity_margin
                );
            }
        }
        Command::Report { input, common } => {
            let result = analyze(&read_result(&input)?)?;
            print_summary(&result);
            if let Some(path) = &common.output {
                write_result(&result, common.format.into(), path)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn print_summary(result: &ScanResult) {
    let (r, c) = (&result.report, &result.classical_report);
    println!("scenario            {:?}", result.metadata.config.scenario);
    println!("samples             {}", result.signal.len());
    println!("excluded            {}", result.metadata.excluded.len());
    println!("flattening          {:?}", result.metadata.flattening);
    println!(
        "dominant frequency  {:.6} /m (classical {:.6} /m)",
        r.dominant_frequency, c.dominant_frequency
    );
    println!("frequency ratio     {:.6}", result.metadata.frequency_ratio);
    println!(
        "zeros               {} (classical {})",
        r.zero_count, c.zero_count
    );
    println!("visibility          {:.6}", r.visibility);
}
