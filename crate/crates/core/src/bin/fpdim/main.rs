use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fpdim::cache::TableCache;
use fpdim::output::OutputRecord;
use fpdim::quantum::ProductMode;
use fpdim::spectral::SpectralOptions;
use fpdim::Partition;

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "fpdim",
    version,
    about = "Quantum cohomology of Grassmannians and Frobenius-Perron dimensions"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Print one JSON record instead of a text table.
    #[arg(long, global = true)]
    json: bool,

    /// Power-iteration tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Power-iteration step limit.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_iter: usize,

    /// Worker threads for table construction and spectral work.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Neither read nor write the product-table cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

impl GlobalOpts {
    fn spectral(&self) -> SpectralOptions {
        SpectralOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    fn cache(&self) -> Option<TableCache> {
        if self.no_cache {
            None
        } else {
            TableCache::from_env()
        }
    }
}

fn partition(s: &str) -> Result<Partition, String> {
    s.parse().map_err(|e: fpdim::Error| e.to_string())
}

fn mode(s: &str) -> Result<ProductMode, String> {
    s.parse().map_err(|e: fpdim::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form FPdim of a Schubert class, optionally checked spectrally.
    Rho {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = partition)]
        lambda: Partition,
        /// Also build the multiplication matrix and run power iteration.
        #[arg(long)]
        exact_check: bool,
    },
    /// Dimension of the Schur functor S_lambda(C^k) by the hook-length formula.
    Dim {
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = partition)]
        lambda: Partition,
    },
    /// Littlewood-Richardson coefficient, or the whole product when --nu is omitted.
    Lr {
        #[arg(long, value_parser = partition)]
        lambda: Partition,
        #[arg(long, value_parser = partition)]
        mu: Partition,
        #[arg(long, value_parser = partition)]
        nu: Option<Partition>,
        /// Truncate the expansion to Gr(k, n) (needs --n).
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        n: Option<usize>,
    },
    /// Quantum product of two Schubert classes.
    Qprod {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = partition)]
        lambda: Partition,
        #[arg(long, value_parser = partition)]
        mu: Partition,
    },
    /// FPdim of every basis element of Gr(k, n), or of level r of a filtration.
    Fpdim {
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "r", required_unless_present = "r")]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, value_parser = mode, default_value = "quantum")]
        mode: ProductMode,
    },
    /// Fusion coefficients of the level-r Verlinde algebra of U(k).
    Fusion {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_parser = partition)]
        lambda: Partition,
        #[arg(long, value_parser = partition)]
        mu: Partition,
        #[arg(long, value_parser = partition)]
        nu: Option<Partition>,
    },
    /// Per-level FPdim of lambda along the Verlinde filtration and its limit.
    Limit {
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = partition)]
        lambda: Partition,
        #[arg(long)]
        r_max: usize,
        /// First level (default: lambda_1, or 1 for the empty partition).
        #[arg(long)]
        r_min: Option<usize>,
        /// Use power iteration on levels of rank at most this (0 = closed form only).
        #[arg(long, default_value_t = 0)]
        spectral_rank: usize,
        /// Tolerance for the extrapolated limit.
        #[arg(long, default_value_t = 1e-6)]
        limit_tol: f64,
    },
    /// Checks n * rho_{k,(1)}(n) >= k(n-k) + 1 over a range.
    Galkin {
        #[arg(long)]
        k_max: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Runs a named self-check suite.
    Verify {
        #[arg(value_parser = fpdim::verify::Suite::NAMES)]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = commands::run(&cli.command, &cli.global);
    match result {
        Ok(record) => {
            print(&record, cli.global.json);
            if record.is_clean() {
                ExitCode::SUCCESS
            } else {
                for v in &record.violations {
                    eprintln!("violation: {v}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn print(record: &OutputRecord, json: bool) {
    if json {
        println!("{}", record.to_json());
    } else {
        print!("{}", record.render_text());
    }
}
