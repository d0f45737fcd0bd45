use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "rankcone", version, about = "Entrywise maps on rank-constrained PSD cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Function literal (`plain:α`, `phi:α`, `psi:α`, `poly:c0,c1,...`) or JSON file.
    #[arg(short = 'f', long = "function", global = true)]
    pub function: Option<String>,

    /// Matrix order.
    #[arg(short = 'n', global = true)]
    pub n: Option<usize>,

    /// Source rank.
    #[arg(short = 'l', global = true)]
    pub l: Option<usize>,

    /// Target rank.
    #[arg(short = 'k', global = true)]
    pub k: Option<usize>,

    /// `<kind>:<R|inf>` with kind `0` for [0,R) or `sym` for (-R,R).
    #[arg(long, global = true)]
    pub interval: Option<String>,

    /// Target the PSD cone instead of all symmetric matrices.
    #[arg(long, global = true)]
    pub psd: bool,

    /// Scalar backend for probe samples.
    #[arg(long, value_enum, global = true)]
    pub backend: Option<BackendArg>,

    /// Master seed; every random stream derives from it.
    #[arg(long, env = "RANKCONE_SEED", default_value_t = 0, global = true)]
    pub seed: u64,

    /// Sweep trials or search draws.
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Relative singular-value cutoff for float rank.
    #[arg(long = "tol-rank", global = true)]
    pub tol_rank: Option<f64>,

    /// Absolute eigenvalue slack for float PSD tests.
    #[arg(long = "tol-psd", global = true)]
    pub tol_psd: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "out", global = true)]
    pub out: Option<PathBuf>,

    /// Report format; csv is only available for sweep.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether f[−] maps the source cone into the target cone.
    Classify {
        /// Also write the witness of a violates verdict here.
        #[arg(long = "witness-out")]
        witness_out: Option<PathBuf>,
    },
    /// Build a witness bundle, re-verify it, and write it out.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
    /// Re-verify a witness bundle read from disk.
    Verify { file: PathBuf },
    /// Run a seeded verification sweep; writes CSV rows by default.
    Sweep {
        /// soundness, sharpness, schur, eboyd, block-sum, rank-minors, float-exact or rank-one-division.
        #[arg(long)]
        check: String,
    },
    /// Sampling tests of necessary conditions on a function.
    Probe {
        #[arg(long, value_enum)]
        test: ProbeTest,
        /// `uniform:lo:hi:points`, `lattice:step:m0:m1` or `geometric:top:rho:points`.
        #[arg(long)]
        grid: Option<String>,
        /// Highest difference order for abs-monotone.
        #[arg(long, default_value_t = 6)]
        order: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeTest {
    AbsMonotone,
    TwoByTwo,
    Loewner,
    Continuity,
}

#[derive(Subcommand, Debug)]
pub enum WitnessKind {
    /// A named matrix: a4, a6, padding, akl, cosine, b_x0, continuity, continuity_limit, block_sum, bordered.
    Canned {
        name: String,
        /// Extra parameters as a JSON object, e.g. '{"x0":"-1/4"}'.
        #[arg(long)]
        params: Option<String>,
    },
    /// vvᵀ on nodes 1..n; needs -f and -n.
    Vandermonde,
    /// Rank-l Gram witness attaining the binomial bound; needs -f, -l, -n.
    Multinomial,
    /// a·1 + uuᵀ with its exact expansion; needs -f.
    Special {
        #[arg(short = 'a')]
        a: String,
        /// Comma-separated entries of u.
        #[arg(short = 'u')]
        u: String,
    },
    /// Embed a PSD 2x2 matrix [[a,b],[b,c]] as a special rank-2 matrix; needs -n.
    Embed {
        /// `a,b,c`.
        #[arg(long)]
        matrix: String,
    },
    /// Seeded search for u with f[a·1 + uuᵀ] of full rank; needs -f, -n.
    Search {
        #[arg(short = 'a')]
        a: String,
        #[arg(long, default_value = "1/2")]
        eps: String,
    },
}
