//! `coarse`: generate spaces, play and check decomposition games, evaluate
//! norms, build Rips complexes and run lemma checks.
//!
//! Exit codes: 0 success, 2 bad input, 3 a check failed, 4 malformed
//! certificate, 5 strategy stuck or challenges exhausted, 6 budget exceeded.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coarse_decomp::Error;

#[derive(Parser)]
#[command(name = "coarse", version, about = "Finite coarse geometry toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Budget for enumerations and searches.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Subdivision level for geodesic estimates.
    #[arg(long, global = true, default_value_t = 3)]
    pub subdivision: u32,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Only `json` is produced.
    #[arg(long, global = true, default_value = "json")]
    pub format: String,
    /// Add wall-clock timings to reports (makes them nondeterministic).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand)]
pub enum Command {
    #[command(subcommand)]
    Space(SpaceCmd),
    #[command(subcommand)]
    Decompose(DecomposeCmd),
    #[command(subcommand)]
    Norms(NormsCmd),
    #[command(subcommand)]
    Rips(RipsCmd),
    #[command(subcommand)]
    Pou(PouCmd),
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
pub enum SpaceCmd {
    /// Write a word-metric ball.
    Gen(GenArgs),
    /// Summarize a space.
    Show {
        #[arg(long)]
        space: String,
    },
}

#[derive(Args)]
pub struct GenArgs {
    /// zn, weighted, lamplighter, unipotent, or a JSON group spec file.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated generator weights for zn.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, default_value = "z2")]
    pub lamp: String,
    #[arg(long, default_value_t = 1)]
    pub max_deg: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub radius: String,
}

#[derive(Subcommand)]
pub enum DecomposeCmd {
    /// Play the game and write the certificate.
    Run {
        #[arg(long)]
        space: String,
        /// default, slabs, greedy, a JSON strategy, or a file holding one.
        #[arg(long, default_value = "default")]
        strategy: String,
        /// Comma-separated challenges.
        #[arg(long, conflicts_with = "random")]
        challenges: Option<String>,
        /// Number of seeded random challenges.
        #[arg(long)]
        random: Option<usize>,
        /// Largest random challenge.
        #[arg(long, default_value_t = 8)]
        max: i64,
    },
    /// Check a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum NormsCmd {
    /// Length of a matrix.
    Len {
        #[arg(long)]
        norm: String,
        /// `wreath:n=1,p=X^2` or rows like `1,X;0,1`.
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "f2")]
        field: String,
    },
    /// Enumerate `B_A(k, s)`.
    Ball {
        #[arg(long)]
        ring: String,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Discrete norms; defaults to the degree.
        #[arg(long, value_delimiter = ',')]
        norms: Vec<String>,
        /// Archimedean norms.
        #[arg(long, value_delimiter = ',')]
        arch: Vec<String>,
        /// Bound for the archimedean norms.
        #[arg(long, default_value = "1")]
        s: String,
    },
    /// Norm of an element.
    Eval {
        #[arg(long)]
        norm: String,
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
        #[arg(long, default_value = "f2")]
        field: String,
    },
}

#[derive(Args)]
pub struct ComplexArgs {
    #[arg(long)]
    pub space: String,
    /// Rips scale.
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Subset for the relative complex.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Subset for the scaled complex.
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Subcommand)]
pub enum RipsCmd {
    /// Export a complex.
    Build(ComplexArgs),
    /// Geodesic bounds between two vertices.
    Dist {
        #[command(flatten)]
        complex: ComplexArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Check one lemma.
    Verify {
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        space: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        m: Option<u32>,
        /// Vertex set; repeat for families.
        #[arg(long = "set")]
        sets: Vec<String>,
        /// Source nodes sampled by the retraction check.
        #[arg(long, default_value_t = 24)]
        samples: usize,
    },
    /// Run the corpus lemma sweep.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        factors: Vec<u32>,
    },
    /// Smallest factor in the list at which the retraction check passes.
    ConeFactor {
        #[arg(long)]
        space: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        w: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        factors: Vec<u32>,
    },
}

#[derive(Subcommand)]
pub enum PouCmd {
    /// Build an exactness witness from a certificate.
    Build {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long = "R")]
        r: String,
        #[arg(long)]
        eps: String,
    },
    /// Check a witness against the certificate's space.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum ReportCmd {
    /// Combine JSON reports, ordered by file name.
    Merge { files: Vec<PathBuf> },
}

/// A command's outcome: the JSON to emit and whether its check passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub ok: bool,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MalformedCertificate(_) => 4,
        Error::StrategyStuck(_) | Error::ChallengesExhausted(_) => 5,
        Error::BallTooLarge { .. }
        | Error::EnumerationBudgetExceeded(_)
        | Error::SearchBudgetExceeded
        | Error::DimensionCapExceeded(_) => 6,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.format != "json" {
        eprintln!("error[BAD_PARAMS]: unsupported format {:?}", cli.global.format);
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.json).expect("reports serialize") + "\n";
            let written = match &cli.global.out {
                Some(p) => std::fs::write(p, text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error[IO]: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if out.ok { 0 } else { 3 })
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
