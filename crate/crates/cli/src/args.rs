use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cryptkit_core::boolshare::ShareMode;
use cryptkit_core::dlog::Strategy;
use cryptkit_core::fpe::{PrfBackend, Variant};
use cryptkit_core::gfs::GfsVariant;
use cryptkit_core::puzzles::Side;
use cryptkit_core::quantum::Corrector;

/// Cryptanalysis toolkit.
#[derive(Debug, Parser)]
#[command(name = "cryptkit", version, arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Seed for every randomized step.
    #[arg(long, global = true, env = "CRYPTKIT_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Arithmetic puzzles.
    #[command(subcommand)]
    Puzzle(PuzzleCmd),
    /// Format-preserving encryption on {0, ..., n-1}.
    #[command(subcommand)]
    Fpe(FpeCmd),
    /// Discrete logs through an encoding oracle.
    #[command(subcommand)]
    Dlog(DlogCmd),
    /// Masked-message instances and the linearization attack.
    #[command(subcommand)]
    Mask(MaskCmd),
    /// Closeness to permutation of x xor (x + alpha).
    #[command(subcommand)]
    Permclose(PermcloseCmd),
    /// Parity of generalized Feistel round maps.
    #[command(subcommand)]
    Gfs(GfsCmd),
    /// Boolean sharings.
    #[command(subcommand)]
    Share(ShareCmd),
    /// S-box analysis.
    #[command(subcommand)]
    Sbox(SboxCmd),
    /// State-vector quantum simulation.
    #[command(subcommand)]
    Qsim(QsimCmd),
    /// Two-layer routing of a bit permutation.
    Route(RouteArgs),
    /// Run the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PuzzleCmd {
    /// Cheapest way to generate exactly L bits.
    Cost {
        #[arg(value_name = "L")]
        len: usize,
    },
    /// Whether the n-th Fibonacci difference string is balanced.
    Fibstring {
        n: u32,
        /// Also build the string and show it.
        #[arg(long)]
        check: bool,
    },
    /// Every password related to e.
    Passwords {
        e: String,
        #[arg(long)]
        side: Side,
    },
    /// Quadratic-residue check on y^2 = x^3 + ax.
    EcQr(EcQrArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EcQrArgs {
    #[arg(long, required_unless_present = "p_max", requires = "a")]
    pub p: Option<u64>,
    #[arg(long, requires = "p")]
    pub a: Option<u64>,
    /// Sweep every curve over primes up to this bound instead.
    #[arg(long, conflicts_with_all = ["p", "a"])]
    pub p_max: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FpeCommon {
    #[arg(long)]
    pub n: u64,
    /// 128-bit key as 32 hex digits.
    #[arg(long)]
    pub key: String,
    #[arg(long, default_value_t = 3)]
    pub rounds: u32,
    #[arg(long, default_value = "composite")]
    pub variant: Variant,
    #[arg(long, default_value = "speck")]
    pub backend: PrfBackend,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpeCmd {
    Encrypt {
        #[command(flatten)]
        #[serde(flatten)]
        common: FpeCommon,
        x: u64,
    },
    Decrypt {
        #[command(flatten)]
        #[serde(flatten)]
        common: FpeCommon,
        y: u64,
    },
    /// Encrypt and decrypt every input; report bijectivity and PRF calls.
    Sweep {
        #[command(flatten)]
        #[serde(flatten)]
        common: FpeCommon,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DlogCmd {
    /// Create a machine file with a random encoding key.
    Simulate {
        #[arg(long)]
        n: u64,
        /// Secret exponent; random when omitted.
        #[arg(long)]
        k: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover the secret exponent of a machine file.
    Solve {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "ph-bsgs")]
        strategy: Strategy,
        /// Primitive root; the smallest one by default.
        #[arg(long)]
        g: Option<u64>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskCmd {
    /// Generate an instance file.
    Gen {
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the hidden suffix bits here.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = 6560)]
        message_bits: usize,
        #[arg(long, default_value_t = 20)]
        shares: usize,
        #[arg(long, default_value_t = 6432)]
        prefix_known: usize,
    },
    /// Recover the unknown suffix of an instance file.
    Attack { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CloseMethod {
    Brute,
    Rec,
    Both,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermcloseCmd {
    /// C(F_alpha) for one alpha.
    Value {
        #[arg(long)]
        n: u32,
        /// Decimal, 0x hex or 0b binary.
        #[arg(long, value_parser = parse_int)]
        alpha: u64,
        #[arg(long, value_enum, default_value = "rec")]
        method: CloseMethod,
    },
    /// Minimum over alpha and its minimizers.
    Min {
        #[arg(long)]
        n: u32,
        /// Confirm against the full table.
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GfsCmd {
    Sign(GfsSignArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMethod {
    Brute,
    Formula,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct GfsSignArgs {
    #[arg(long)]
    pub variant: GfsVariant,
    /// E.g. z4, z2^2, z2xz4.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value_t = 0)]
    pub h_seed: u64,
    #[arg(long, default_value_t = 0)]
    pub k_seed: u64,
    /// random, zero, bijective, const:<v> or order:<i>.
    #[arg(long, default_value = "random")]
    pub profile: String,
    #[arg(long, value_enum, default_value = "both")]
    pub method: SignMethod,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShareCmd {
    /// Decide whether a truth table is an s-share sharing.
    Check {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "any")]
        mode: ShareMode,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SboxCmd {
    /// Differential uniformity of x^d over GF(2^n).
    Apn {
        #[arg(long)]
        n: u32,
        #[arg(long = "exp")]
        d: u64,
        /// Field modulus including the leading term, e.g. 0x25.
        #[arg(long, value_parser = parse_int)]
        poly: Option<u64>,
    },
    /// Distance from a table to the nearest affine map.
    Dist {
        #[arg(long)]
        table: PathBuf,
    },
    /// Constant test on plaintext/ciphertext pairs.
    RoundsCheck {
        /// Pair file; the two known pairs when omitted.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// S-box table; the 4-bit S-box of the problem when omitted.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, value_parser = parse_int, default_value = "0xc")]
        u: u64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QsimCmd {
    /// Run a circuit file from |0...0>.
    Run {
        #[arg(long)]
        circuit: PathBuf,
        /// Sample this many measurements.
        #[arg(long, default_value_t = 0)]
        shots: u64,
    },
    /// Encode, flip, correct and report.
    QecDemo(QecArgs),
    /// Monte Carlo logical error rates.
    Noise {
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value = "three-toffoli")]
        corrector: Corrector,
        /// Add the exact rate from enumerating fault patterns.
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct QecArgs {
    #[arg(long, default_value_t = 0.3f64.cos(), allow_negative_numbers = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    #[arg(long, default_value_t = 0.3f64.sin(), allow_negative_numbers = true)]
    pub beta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_im: f64,
    /// Data wire to flip (0, 1 or 2).
    #[arg(long)]
    pub flip: Option<usize>,
    #[arg(long, default_value = "three-toffoli")]
    pub corrector: Corrector,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["present", "present16", "perm"])))]
pub struct RouteArgs {
    /// The 64-bit PRESENT bit permutation.
    #[arg(long)]
    pub present: bool,
    /// The 16-bit variant.
    #[arg(long)]
    pub present16: bool,
    /// JSON array, inline or as a file path.
    pub perm: Option<String>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Run the conflict checker on the plan.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    /// Smaller sweeps.
    #[arg(long)]
    pub quick: bool,
    /// Only these criteria.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=10))]
    pub only: Vec<u8>,
}

pub fn parse_int(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    let (digits, radix) = if let Some(h) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        (h, 16)
    } else if let Some(b) = s.strip_prefix("0b") {
        (b, 2)
    } else {
        (s.as_str(), 10)
    };
    u64::from_str_radix(digits, radix).map_err(|e| format!("{s:?}: {e}"))
}
