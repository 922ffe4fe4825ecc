//! `hyperpack`: analysis, host construction, packing, balancing, exact
//! search and certificate checking for k-partite k-graphs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_UNKNOWN: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "hyperpack", version, about = "Perfect packings of k-partite k-graphs")]
pub struct Cli {
    /// Worker threads for exact search (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural profile of a pattern: realisations, σ, τ, gcd and type.
    Analyze {
        pattern: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Writes an extremal host or a gadget with its sidecar file.
    Construct(ConstructArgs),
    /// Packs a pattern into a host and writes a certificate.
    Pack(PackArgs),
    /// Divisibility balancing with a report of the deletion phases.
    Balance(BalanceArgs),
    /// Exact search on small hosts.
    Search(SearchArgs),
    /// Checks a packing certificate; exit 0 iff it is valid and perfect.
    Verify {
        certificate: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Computed loose-cycle parameters against the closed forms.
    CycleCheck {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Lattice `V_p`, properties P1/P2 and the index-vector equation.
    Lattice(LatticeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
pub struct Out {
    /// Output file; without it the JSON goes to standard output. Relative
    /// paths resolve against `HYPERPACK_OUT_DIR` when that is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    Parity,
    Lattice,
    Cover,
    MarkedVertex,
    Balanced,
    Lopsided,
    Unbalanced,
    Phi,
    Akpq,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: ConstructKind,
    /// Pattern file (extremal hosts and gadgets).
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// Host vertex count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Vertex deficit of the cover host.
    #[arg(long, default_value_t = 0)]
    pub deficit: usize,
    /// Class sizes of the marked-vertex pattern, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub classes: Vec<usize>,
    /// Gadget parameter `s` of `U_s(K)` or `m` of `Φ(m)`.
    #[arg(long)]
    pub s: Option<usize>,
    #[command(flatten)]
    pub out: Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Balanced,
    NearlyBalanced,
    Lopsided,
    BalanceGcd1,
    BalanceFull,
    Akpq,
}

#[derive(Args, Debug)]
pub struct PackArgs {
    #[arg(long, value_enum)]
    pub algorithm: Algorithm,
    /// Pattern file (not used by `akpq`).
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long)]
    pub host: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub balance: BalanceOpts,
    /// `A^k_{p,q}` parameters.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[command(flatten)]
    pub out: Out,
}

#[derive(Args, Debug, Clone)]
pub struct Tuning {
    /// Margin α as `p/q`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Tolerance β as `p/q`.
    #[arg(long)]
    pub beta: Option<String>,
    /// Parameter `s` of the `U_s(K)` gadget.
    #[arg(long)]
    pub s: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct BalanceOpts {
    /// Class graph as index pairs, e.g. `0-1,2-3`.
    #[arg(long, default_value = "")]
    pub sa: String,
    /// Part file `{"parts": [[names...], ...]}` for explicit hosts.
    #[arg(long)]
    pub parts: Option<PathBuf>,
    /// Target modulus of `balance-gcd1`.
    #[arg(long)]
    pub d: Option<u64>,
    /// Residue moved per shift block.
    #[arg(long, default_value_t = 1)]
    pub d_prime: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BalanceMode {
    Full,
    Gcd1,
}

#[derive(Args, Debug)]
pub struct BalanceArgs {
    #[arg(long, value_enum, default_value = "full")]
    pub mode: BalanceMode,
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long)]
    pub host: PathBuf,
    #[command(flatten)]
    pub balance: BalanceOpts,
    #[arg(long)]
    pub s: Option<usize>,
    /// Also write the deleted copies as a certificate.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[command(flatten)]
    pub out: Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchKind {
    Decide,
    Copies,
    Through,
    OddSplit,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(value_enum)]
    pub kind: SearchKind,
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long)]
    pub host: PathBuf,
    /// Vertex name for `through`.
    #[arg(long)]
    pub vertex: Option<String>,
    /// Vertex names of `A` for `odd-split`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<String>,
    /// Count labelled maps instead of vertex sets (`copies`).
    #[arg(long)]
    pub labelled: bool,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub max_vertices: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[command(flatten)]
    pub out: Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LatticeKind {
    /// Exhaustive unit-increment check of `V_p`.
    Increment,
    /// Membership and dagger index of `--x`.
    Dagger,
    P1,
    P2,
    /// Solves the index-vector equation on `--graph` over `--parts`.
    Solve,
}

#[derive(Args, Debug)]
pub struct LatticeArgs {
    #[arg(value_enum)]
    pub kind: LatticeKind,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<u64>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub parts: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<u64>,
    /// Target index vector, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub v: Vec<u64>,
    #[command(flatten)]
    pub out: Out,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
