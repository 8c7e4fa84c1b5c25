use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shattering::baseline::DEFAULT_MULTIPLIER;
use shattering::bench::{self, SweepParams, Table1Params, DEFAULT_SIGMA};
use shattering::io::{read_signal, write_signal, SignalFormat};
use shattering::shatter::separates;
use shattering::{
    decode, dft, encode, find_sigma, generate_sparse, matrixform, Error, MeasurementSet, ShatterConfig,
    DEFAULT_THRESHOLD,
};

#[derive(Parser)]
#[command(
    name = "shatter",
    version,
    about = "Compressed shattering encoder, decoder and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random frequency-sparse real signal
    Gen(GenArgs),
    /// Encode a signal into a JSON measurement set
    Encode(EncodeArgs),
    /// Decode a JSON measurement set back into a signal
    Decode(DecodeArgs),
    /// Print stored measurements and operation counts of both methods as CSV
    Table1(Table1Args),
    /// Sweep stored measurements over sparsities and seeds as CSV
    Sweep(SweepArgs),
    /// Write the stacked 2T×N pipeline matrix as CSV
    DumpMatrix(DumpArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    sparsity: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the output file's extension
    #[arg(long)]
    format: Option<SignalFormat>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    filters: usize,
    /// Searched for from the signal's support when omitted
    #[arg(long)]
    sigma: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the input file's extension
    #[arg(long)]
    format: Option<SignalFormat>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the output file's extension
    #[arg(long)]
    format: Option<SignalFormat>,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    filters: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 25])]
    sparsity: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_MULTIPLIER)]
    multiplier: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: u64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 512)]
    filters: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32, 64, 128, 256])]
    sparsity: Vec<usize>,
    /// Design sparsity of the conventional baseline; the largest swept value when omitted
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MULTIPLIER)]
    multiplier: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0])]
    seed: Vec<u64>,
    /// Preferred σ; another is searched for when it collides
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: u64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    filters: usize,
    #[arg(long)]
    sigma: u64,
    /// Standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn format_for(path: &Path, explicit: Option<SignalFormat>) -> shattering::Result<SignalFormat> {
    explicit.map_or_else(|| SignalFormat::from_path(path), Ok)
}

fn output(path: Option<&Path>) -> shattering::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(command: Command) -> shattering::Result<()> {
    match command {
        Command::Gen(a) => {
            let format = format_for(&a.out, a.format)?;
            eprintln!("gen n={} sparsity={} seed={} format={format}", a.n, a.sparsity, a.seed);
            write_signal(&a.out, &generate_sparse(a.n, a.sparsity, a.seed)?, format)
        }
        Command::Encode(a) => {
            let x = read_signal(&a.input, format_for(&a.input, a.format)?)?;
            let n = x.len();
            let sigma = match a.sigma {
                Some(s) => s,
                None => {
                    let support: BTreeSet<usize> = dft(&x).occupied_bins().into_iter().collect();
                    if ShatterConfig::new(n, a.filters, DEFAULT_SIGMA, a.threshold).is_ok()
                        && separates(&support, n, a.filters, DEFAULT_SIGMA)
                    {
                        DEFAULT_SIGMA
                    } else {
                        find_sigma(n, a.filters, &support, DEFAULT_SIGMA)?
                    }
                }
            };
            let config = ShatterConfig::new(n, a.filters, sigma, a.threshold)?;
            eprintln!(
                "encode n={n} filters={} sigma={sigma} threshold={}",
                a.filters, a.threshold
            );
            let set = encode(&x, &config)?;
            std::fs::write(&a.out, set.to_json()?)?;
            eprintln!("retained {} of {} filters", set.entries.len(), a.filters);
            Ok(())
        }
        Command::Decode(a) => {
            let format = format_for(&a.out, a.format)?;
            let set = MeasurementSet::from_json(&std::fs::read_to_string(&a.input)?)?;
            eprintln!(
                "decode n={} filters={} sigma={} threshold={} entries={} format={format}",
                set.n,
                set.t,
                set.sigma,
                set.threshold,
                set.entries.len()
            );
            write_signal(&a.out, &decode(&set)?, format)
        }
        Command::Table1(a) => {
            let params = Table1Params {
                n: a.n,
                t: a.filters,
                sparsities: a.sparsity,
                multiplier: a.multiplier,
                sigma: a.sigma,
                threshold: a.threshold,
                seed: a.seed,
            };
            eprintln!("table1 {params:?}");
            let rows = bench::table1(&params)?;
            bench::write_table1(&rows, output(a.out.as_deref())?)
        }
        Command::Sweep(a) => {
            let params = SweepParams {
                n: a.n,
                t: a.filters,
                sparsities: a.sparsity,
                m_max: a.m_max,
                multiplier: a.multiplier,
                seeds: a.seed,
                sigma: a.sigma,
                threshold: a.threshold,
            };
            eprintln!("sweep {params:?}");
            let rows = bench::sweep_measurements(&params)?;
            bench::write_sweep(&rows, output(a.out.as_deref())?)
        }
        Command::DumpMatrix(a) => {
            let config = ShatterConfig::new(a.n, a.filters, a.sigma, DEFAULT_THRESHOLD)?;
            eprintln!("dump-matrix n={} filters={} sigma={}", a.n, a.filters, a.sigma);
            matrixform::write_csv(&matrixform::build_stacked(&config)?, output(a.out.as_deref())?)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_domain() {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
