//! `bri`: generate matrices, invert them block by block, verify results
//! against a dense LU inverse, and benchmark the memory/time trade-off.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bri", version, about = "Block recursive matrix inversion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print machine-readable JSON instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded test matrix as a BRIM file.
    ///
    /// randn draws i.i.d. standard normal entries and then adds m to every
    /// diagonal entry, so the matrix stays well conditioned. Pass --no-shift
    /// for the raw normal matrix.
    Gen(GenArgs),
    /// Invert a BRIM matrix with BRI (all k² blocks) or dense LU.
    Invert(InvertArgs),
    /// Compute a single inverse block N(row, col) and write it as a BRIM file.
    InvertBlock(InvertBlockArgs),
    /// Compare a BRI inverse with the dense LU inverse.
    Verify(VerifyArgs),
    /// Time BRI for each k and the LU baseline; write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// Standard normal entries plus m·I.
    Randn,
    /// G·Gᵀ + I with standard normal G.
    Spd,
    /// LS-SVM system matrix with a Gaussian kernel, order n + 1.
    Lssvm,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Bri,
    Lu,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "randn")]
    kind: Kind,
    /// Matrix order for randn and spd.
    #[arg(long)]
    m: Option<usize>,
    /// Number of training points for lssvm.
    #[arg(long)]
    n: Option<usize>,
    /// Kernel width for lssvm.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Regularization for lssvm.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Input dimension of the lssvm points.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Skip the m·I diagonal shift for randn.
    #[arg(long)]
    no_shift: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct InvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Blocks per dimension; required for --method bri.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "bri")]
    method: MethodArg,
    /// Worker threads for the k² block runs. Peak memory grows with it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct InvertBlockArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    row: usize,
    #[arg(long)]
    col: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Check this inverse file instead of computing one.
    #[arg(long)]
    inverse: Option<PathBuf>,
    /// Largest accepted relative max-norm error.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Input matrix; when absent a randn matrix of order --m is generated.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value = "2,4,8")]
    k_list: String,
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    let res = match cli.command {
        Command::Gen(a) => commands::gen(a, json),
        Command::Invert(a) => commands::invert(a, json),
        Command::InvertBlock(a) => commands::invert_block(a, json),
        Command::Verify(a) => commands::verify(a, json),
        Command::Bench(a) => commands::bench(a, json),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bri: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
