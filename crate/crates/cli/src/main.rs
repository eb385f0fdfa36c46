//! `cellform`: enumerate configurations, compute leading coefficients, run the
//! congruence checks, and fit recurrences from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cellform::catalog::CACHE_DIR_ENV;

#[derive(Parser, Debug)]
#[command(name = "cellform", version, about = "Convergent configurations, leading coefficients and supercongruences")]
pub struct Cli {
    /// Directory holding the coefficient catalog.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of stdout; the run manifest goes next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the convergent configurations on N points and write them to a catalog.
    Enumerate {
        #[arg(long = "n", visible_alias = "N")]
        n: usize,
    },
    /// Leading coefficients J(0..=terms) of a configuration.
    Coeffs {
        /// Comma-separated permutation, e.g. 8,3,6,1,4,7,2,5.
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value_t = 5)]
        terms: u32,
        /// Constant-term backend.
        #[arg(long, default_value = cellform::ctengine::DEFAULT_BACKEND)]
        backend: String,
    },
    /// Run a congruence statement: thm1, thm2, ahlgren, beukers, coster_a, coster_b, conj1, lemmas.
    Verify {
        statement: String,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        /// Explicit primes (comma-separated), overriding --pmax.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<u64>>,
        /// Point counts for conj1 (comma-separated).
        #[arg(long = "n", visible_alias = "N", value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<u32>>,
    },
    /// Prime coefficients of the three newforms from every source, with an agreement column.
    Modform {
        #[arg(long, default_value_t = 50)]
        pmax: u64,
    },
    /// Finite-field 2F1 values and identity checks.
    Hyper {
        /// A single prime; overrides --pmax.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 13)]
        pmax: u64,
    },
    /// Fit a recurrence with polynomial coefficients to a configuration's coefficients.
    Fit {
        #[arg(long, default_value = "8,3,6,1,4,7,2,5")]
        sigma: String,
        /// Use terms 0..=terms.
        #[arg(long, default_value_t = 120)]
        terms: u32,
        /// Fix the order (with --degree) instead of searching.
        #[arg(long, requires = "degree")]
        order: Option<usize>,
        #[arg(long, requires = "order")]
        degree: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        #[arg(long, default_value_t = 15)]
        max_degree: usize,
        /// Extra terms to predict and check.
        #[arg(long, default_value_t = 10)]
        predict: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}
