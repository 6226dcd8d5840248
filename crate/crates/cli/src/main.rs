use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compaction_forge::ctx::{Config, Eps};
use compaction_forge::family::{Family, Request};
use compaction_forge::Strategy;

mod bench;
mod cmd;
mod lines;

#[derive(Parser, Debug)]
#[command(name = "compaction-forge", version, about = "Build, run and measure oblivious compaction circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a circuit file and print its gate counts.
    Build(BuildArgs),
    /// Evaluate a circuit file on one assignment.
    Eval(EvalArgs),
    /// Check a circuit against the reference oracles.
    Verify(VerifyArgs),
    /// Gate counts over a doubling range of n.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Opnet,
    Bristol,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, env = "COMPACTION_FORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    degree: usize,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    eps3: Option<f64>,
    #[arg(long)]
    eps4: Option<f64>,
}

impl Common {
    fn config(&self) -> Config {
        let d = Eps::default();
        Config {
            eps: Eps {
                e1: self.eps1.unwrap_or(d.e1),
                e2: self.eps2.unwrap_or(d.e2),
                e3: self.eps3.unwrap_or(d.e3),
                e4: self.eps4.unwrap_or(d.e4),
            },
            degree: self.degree,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Shape {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    w: usize,
    /// Rank for select and select-all.
    #[arg(long)]
    m: Option<usize>,
    /// Number of key values for sort.
    #[arg(long = "K")]
    k: Option<u64>,
    #[arg(long, default_value_t = Strategy::Ladder)]
    strategy: Strategy,
}

impl Shape {
    fn request(&self, common: &Common) -> Request {
        Request {
            m: self.m,
            k_values: self.k,
            strategy: self.strategy,
            cfg: common.config(),
            ..Request::new(self.family, self.n, self.w)
        }
    }
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    common: Common,
    /// Output path; defaults to `<family>_n<n>_w<w>.json` (or `.bristol`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `bristol` lowers first and writes the netlist next to the JSON file.
    #[arg(long, value_enum, default_value_t = Format::Opnet)]
    format: Format,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// One line of 0/1 per input bundle.
    #[arg(long)]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check this circuit file instead of building one.
    #[arg(long, conflicts_with_all = ["family", "n", "w"])]
    circuit: Option<PathBuf>,
    #[arg(long, requires_all = ["n", "w"])]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "K")]
    k: Option<u64>,
    #[arg(long, default_value_t = Strategy::Ladder)]
    strategy: Strategy,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    w: usize,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    /// Rank for the selection families; defaults to ceil(n/2).
    #[arg(long)]
    m: Option<usize>,
    /// Key ranges for sort, comma separated.
    #[arg(long = "K", value_delimiter = ',')]
    k: Vec<u64>,
    #[arg(long, default_value_t = Strategy::Ladder)]
    strategy: Strategy,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Build(a) => cmd::build(&a),
        Command::Eval(a) => cmd::eval(&a),
        Command::Verify(a) => cmd::verify(&a),
        Command::Bench(a) => bench::run(&a),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
