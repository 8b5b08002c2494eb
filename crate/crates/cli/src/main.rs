//! `ddesign`: construct, verify and transform dropout designs from the shell.
//!
//! Exit status 0 means success, 1 a failed verification or other domain
//! failure, 2 bad usage or unreadable input.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ddesign", version, about = "Balanced dropout designs: construction, verification, transforms")]
struct Cli {
    /// Worker threads for verification (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomised steps: an integer, or `random` for fresh entropy.
    #[arg(long, global = true, default_value = "0")]
    seed: Seed,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
pub enum Seed {
    Fixed(u64),
    Random,
}

impl std::str::FromStr for Seed {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(Seed::Random);
        }
        s.parse().map(Seed::Fixed).map_err(|_| format!("expected an integer or `random`, got {s:?}"))
    }
}

impl Seed {
    pub fn resolve(self) -> u64 {
        match self {
            Seed::Fixed(s) => s,
            Seed::Random => rand::random(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a design from a geometric family, a generator matrix or a product.
    Construct(ConstructArgs),
    /// Check every window of a design file at a type.
    Verify {
        file: PathBuf,
        /// Window type, e.g. `1,1` or `2,1`.
        #[arg(long = "type")]
        ty: String,
        /// Check window i at the type rotated left by i.
        #[arg(long)]
        shifted: bool,
        /// Budget of elementary containment tests.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Replace every sub-block by its complement in its layer.
    Complement {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delete points, given as `layer:point` with layers counted from 1.
    Delete {
        file: PathBuf,
        #[arg(long)]
        points: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a uniform design cyclically out to `n` layers.
    Extend {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Type to extend along (default: all ones over the design's layers).
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Keep only some layers, counted from 1.
    Restrict {
        file: PathBuf,
        #[arg(long)]
        layers: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct product of several designs over disjoint layers.
    Product {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a design as one bitstring mask per block.
    ExportMasks {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Develop a difference family into cyclic filter matrices.
    FilterGen {
        #[arg(long)]
        v: u32,
        /// Block size; a family is searched for when no base block is given.
        #[arg(long)]
        k: Option<usize>,
        /// Base block(s), e.g. `0,1,3` or `0,1;0,2`.
        #[arg(long)]
        base: Option<String>,
        /// Permute rows and columns with this seed (`random` allowed).
        #[arg(long)]
        scramble_seed: Option<Seed>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the balance conditions of a filter file.
    FilterVerify { file: PathBuf },
    /// Determinants of random incidence matrices under the four margin regimes.
    Experiment {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct ConstructArgs {
    /// oa | pg-pencil-lines | pg-pencil-planes | ag-hyperplane | spread | product
    #[arg(long)]
    family: String,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// Column parts of the generator, e.g. `2,1`.
    #[arg(long)]
    partition: Option<String>,
    /// Declared type, e.g. `1,1` or `2,1`.
    #[arg(long = "type")]
    ty: Option<String>,
    /// Geometric generator: pg-points | cap | line-split | two-lines.
    #[arg(long)]
    source: Option<String>,
    /// Explicit generator rows over GF(q), e.g. `1,0,1;1,2,2`.
    #[arg(long)]
    generator: Option<String>,
    /// Design files for `--family product`.
    #[arg(long = "part", num_args = 1..)]
    parts: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<dropout_design::Error> for Failure {
    fn from(e: dropout_design::Error) -> Self {
        use dropout_design::Error::*;
        let code = match e {
            NotPrimePower(_)
            | UnsupportedOrder(_)
            | DimensionMismatch(_)
            | InvalidParameters(_)
            | NoSpreadExists { .. }
            | InvalidGenerator(_)
            | InfeasiblePartition(_)
            | TypeNeedsSupplement(_)
            | Parse { .. }
            | InconsistentMargins(_)
            | InvalidDesign(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

pub type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let seed = cli.seed;
    let result = match cli.command {
        Command::Construct(args) => commands::construct(&args),
        Command::Verify { file, ty, shifted, budget } => commands::verify(&file, &ty, shifted, budget),
        Command::Complement { file, out } => commands::complement(&file, out.as_deref()),
        Command::Delete { file, points, out } => commands::delete(&file, &points, out.as_deref()),
        Command::Extend { file, n, ty, out } => commands::extend(&file, n, ty.as_deref(), out.as_deref()),
        Command::Restrict { file, layers, out } => commands::restrict(&file, &layers, out.as_deref()),
        Command::Product { files, out } => commands::product(&files, out.as_deref()),
        Command::ExportMasks { file, out } => commands::export_masks(&file, out.as_deref()),
        Command::FilterGen { v, k, base, scramble_seed, out } => {
            commands::filter_gen(v, k, base.as_deref(), scramble_seed, out.as_deref())
        }
        Command::FilterVerify { file } => commands::filter_verify(&file),
        Command::Experiment { samples, out } => commands::experiment(samples, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
