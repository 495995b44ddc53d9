use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use p2sheaf::gradecoh::{Fp, Route};

mod commands;
mod output;

use output::{CliError, Line};

#[derive(Parser, Debug)]
#[command(name = "p2sheaf", version, about = "Sheaves on P^2: characters, Gaeta resolutions, cone edges and finite-field checks")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Prime for finite-field computations.
    #[arg(long, global = true, env = "P2SHEAF_PRIME", default_value_t = 32003)]
    pub prime: u64,
    /// Base seed; trial i uses seed + i.
    #[arg(long, global = true, env = "P2SHEAF_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, env = "P2SHEAF_TRIALS", default_value_t = 3)]
    pub trials: u64,
    /// Emit one JSON object per line.
    #[arg(long, global = true, env = "P2SHEAF_JSON")]
    pub json: bool,
    /// Add wall-clock timings (makes output non-deterministic).
    #[arg(long, global = true, env = "P2SHEAF_TIMING")]
    pub timing: bool,
    /// Refuse computations whose forms exceed this degree.
    #[arg(long, global = true, env = "P2SHEAF_MAX_DEGREE", default_value_t = 64)]
    pub max_degree: i64,
    /// Depth cap for exceptional-slope searches.
    #[arg(long, global = true, env = "P2SHEAF_DEPTH_CAP", default_value_t = 64)]
    pub depth_cap: u32,
}

impl RunConfig {
    pub fn field(&self) -> Result<Fp, CliError> {
        let f = Fp::new(self.prime).map_err(|e| CliError::Usage(e.to_string()))?;
        if (self.prime as i128) <= 2 * self.max_degree as i128 {
            return Err(CliError::Usage(format!("prime {} must exceed twice the degree guard {}", self.prime, self.max_degree)));
        }
        Ok(f)
    }

    pub fn guard_degree(&self, deg: i64) -> Result<(), CliError> {
        if deg > self.max_degree {
            return Err(CliError::Unsupported(format!("forms of degree {deg} exceed --max-degree {}", self.max_degree)));
        }
        Ok(())
    }
}

/// A character given by three numbers.
#[derive(Args, Debug, Clone)]
pub struct CharArgs {
    /// Rank.
    #[arg(allow_hyphen_values = true)]
    pub a: String,
    /// Slope, or c1 with --ch.
    #[arg(allow_hyphen_values = true)]
    pub b: String,
    /// Discriminant, or ch2 with --ch.
    #[arg(allow_hyphen_values = true)]
    pub c: String,
    /// Read the numbers as (r, c1, ch2) instead of (r, mu, Delta).
    #[arg(long)]
    pub ch: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BranchArg {
    Primary,
    Secondary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RouteArg {
    Fiberwise,
    Ladder,
    KernelBundle,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Route {
        match r {
            RouteArg::Fiberwise => Route::Fiberwise,
            RouteArg::Ladder => Route::Ladder,
            RouteArg::KernelBundle => Route::KernelBundle,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Both coordinate forms, Euler characteristic, DLP position and Serre dual.
    Char(CharArgs),
    /// Look up the exceptional bundle of a slope, or enumerate them.
    Exceptional {
        #[arg(allow_hyphen_values = true)]
        slope: Option<String>,
        /// Enumerate slopes in [lo, hi] with rank below this bound.
        #[arg(long)]
        max_rank: Option<u64>,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        lo: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        hi: String,
    },
    /// Controlling exceptional bundle and orthogonal endpoints.
    Controlling {
        #[command(flatten)]
        xi: CharArgs,
        #[arg(long, value_enum, default_value_t = BranchArg::Primary)]
        branch: BranchArg,
    },
    /// Gaeta resolution, triangle case and Betti decomposition.
    Gaeta(CharArgs),
    /// Effective and movable primary edges of the Hilbert scheme of n points.
    Cones { n: u64 },
    /// Stable base locus table for n in {2,...,6, 12}.
    Table { n: u64 },
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Interpolation for triangular n = r(r+1)/2.
    InterpTri {
        #[arg(long = "r", required = true, num_args = 1..)]
        r: Vec<u64>,
        /// Fixed k; without it k escalates from 1 to --kmax.
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 3)]
        kmax: u64,
    },
    /// Interpolation for tangential n = 2s(s+1).
    InterpTan {
        #[arg(long = "s", required = true, num_args = 1..)]
        s: Vec<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 3)]
        kmax: u64,
        /// Defaults to the ladder for s <= 4 and the kernel bundle above.
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
    },
    /// Sections of T(-2s-1) (x) I_Z for the ideal of a (qk) matrix; expects k.
    Qk {
        #[arg(long = "s", required = true, num_args = 1..)]
        s: Vec<u64>,
        /// Defaults to every k in 1..=s.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Zero locus of a general section of T(2s-1).
    ZeroLocus {
        #[arg(long = "s", required = true, num_args = 1..)]
        s: Vec<u64>,
    },
    /// Sampled Betti diagrams against the table rows.
    Betti {
        #[arg(long)]
        n: u64,
        /// Defaults to every base locus of the table.
        #[arg(long)]
        stratum: Option<String>,
    },
    /// Betti block decomposition for exceptional bundles of small rank.
    Conjecture {
        #[arg(long, default_value_t = 30)]
        max_rank: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        d_lo: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 60)]
        d_hi: i64,
    },
}

fn run(cli: &Cli) -> Result<Vec<Line>, CliError> {
    let cfg = &cli.config;
    let start = Instant::now();
    let mut lines = match &cli.command {
        Command::Char(a) => commands::char(a),
        Command::Exceptional { slope, max_rank, lo, hi } => commands::exceptional(cfg, slope.as_deref(), *max_rank, lo, hi),
        Command::Controlling { xi, branch } => commands::controlling(cfg, xi, *branch),
        Command::Gaeta(a) => commands::gaeta(a),
        Command::Cones { n } => commands::cones(*n),
        Command::Table { n } => commands::table(*n),
        Command::Verify(v) => commands::verify(cfg, v),
    }?;
    if cfg.timing && !matches!(cli.command, Command::Verify(_)) {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for l in &mut lines {
            l.set_timing(ms);
        }
    }
    Ok(lines)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(lines) => {
            let ok = output::emit(&lines, cli.config.json);
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
