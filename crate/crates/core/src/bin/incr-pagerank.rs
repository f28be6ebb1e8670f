use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use incr_pagerank::adversary::{growth_exponent, ArrivalScript, OrderMode};
use incr_pagerank::experiment::{
    family_script, fit_exponent, read_csv, replay, replay_full, replay_seeds, row_table, sweep, write_csv,
    FamilyKind, SweepConfig,
};
use incr_pagerank::pagerank::{aggregate_expected, estimate, DEFAULT_TAIL_TOL};
use incr_pagerank::{RngStream, WalkStore};

#[derive(Parser)]
#[command(name = "incr-pagerank", version, about = "Incremental Monte Carlo PageRank experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an arrival script ("u v row" per line).
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N")]
        n_top: usize,
        #[arg(long, value_enum, default_value_t = OrderMode::Adversarial)]
        order: OrderMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay one script and print its CSV record.
    Replay {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N", required_unless_present = "script")]
        n_top: Option<usize>,
        /// Replay this script file instead of building a family member.
        #[arg(long)]
        script: Option<PathBuf>,
        #[command(flatten)]
        walks: WalkArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OrderMode::Adversarial)]
        order: OrderMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay every (N, seed, order) combination and write CSV.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n_top: Vec<usize>,
        #[command(flatten)]
        walks: WalkArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        seeds: Vec<u64>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [OrderMode::Adversarial, OrderMode::Random])]
        order: Vec<OrderMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the log-log slope of normalized reroutes against m.
    Fit {
        /// CSV written by `sweep`.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderMode::Adversarial)]
        order: OrderMode,
    },
    /// Compare top-row reroutes per tree row with R·N·((1−ε)H_d)^i.
    VerifyRows {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "N")]
        n_top: usize,
        #[command(flatten)]
        walks: WalkArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 10])]
        seeds: Vec<u64>,
    },
    /// Replay an edge list, then compare the estimate against the exact
    /// expected visit frequencies and against freshly generated walks.
    Estimate {
        /// Edge list, one "u v" per line, in arrival order.
        edges: PathBuf,
        #[command(flatten)]
        walks: WalkArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the incremental estimate as "node,score" CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Binary,
    Dary,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyName::Binary)]
    family: FamilyName,
    /// Branching factor for the d-ary family.
    #[arg(long, default_value_t = 2)]
    d: usize,
}

impl FamilyArgs {
    fn kind(&self) -> FamilyKind {
        match self.family {
            FamilyName::Binary => FamilyKind::Binary,
            FamilyName::Dary => FamilyKind::Dary { d: self.d },
        }
    }
}

#[derive(Args)]
struct WalkArgs {
    /// Walks stored per node.
    #[arg(long = "R", default_value_t = 10)]
    walks_per_node: usize,
    /// Teleport probability.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            family,
            n_top,
            order,
            seed,
            out,
        } => {
            let script = family_script(family.kind(), n_top, order, seed)?;
            let mut out = output(&out)?;
            script.write_labeled(&mut out)?;
            out.flush()?;
        }
        Command::Replay {
            family,
            n_top,
            script,
            walks,
            seed,
            order,
            out,
        } => {
            let script = match script {
                Some(path) => {
                    let file = File::open(&path)
                        .with_context(|| format!("opening {}", path.display()))?;
                    ArrivalScript::read_labeled(BufReader::new(file))?
                }
                None => family_script(family.kind(), n_top.unwrap_or_default(), order, seed)?,
            };
            let record = replay(&script, walks.walks_per_node, walks.epsilon, seed)?;
            let mut out = output(&out)?;
            write_csv(&mut out, &[record])?;
            out.flush()?;
        }
        Command::Sweep {
            family,
            n_top,
            walks,
            seeds,
            order,
            out,
        } => {
            let config = SweepConfig {
                family: family.kind(),
                widths: n_top,
                walks_per_node: walks.walks_per_node,
                epsilon: walks.epsilon,
                seeds,
                orders: order,
            };
            if config.validate().is_err() {
                bail!("sweep needs at least 3 distinct N values spanning at least two octaves");
            }
            let records = sweep(&config)?;
            let mut out = output(&out)?;
            write_csv(&mut out, &records)?;
            out.flush()?;
        }
        Command::Fit { input, order } => {
            let file =
                File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let records = read_csv(BufReader::new(file))?;
            let fit = fit_exponent(&records, order)?;
            println!(
                "slope={:.6} intercept={:.6} r2={:.6} points={}",
                fit.slope, fit.intercept, fit.r_squared, fit.points
            );
            if let Some(r) = records.iter().find(|r| r.order == order) {
                if r.d >= 2 {
                    println!(
                        "predicted_exponent={:.6} (d={}, epsilon={})",
                        growth_exponent(r.epsilon, r.d),
                        r.d,
                        r.epsilon
                    );
                }
            }
        }
        Command::VerifyRows {
            family,
            n_top,
            walks,
            seeds,
        } => {
            let script = family.kind().build(n_top)?;
            let records = replay_seeds(&script, walks.walks_per_node, walks.epsilon, &seeds)?;
            println!("row,empirical,predicted,relative_error");
            for check in row_table(&records) {
                println!(
                    "{},{:.3},{:.3},{:.4}",
                    check.row,
                    check.empirical,
                    check.predicted,
                    check.relative_error()
                );
            }
        }
        Command::Estimate {
            edges,
            walks,
            seed,
            out,
        } => {
            let file = File::open(&edges).with_context(|| format!("opening {}", edges.display()))?;
            let script = ArrivalScript::read_labeled(BufReader::new(file))?;
            let replayed = replay_full(&script, walks.walks_per_node, walks.epsilon, seed)?;
            let oracle = aggregate_expected(&replayed.graph, walks.epsilon, DEFAULT_TAIL_TOL)?;
            let incremental = estimate(&replayed.store);
            let mut rng = RngStream::with_stream(seed, 2);
            let fresh_store =
                WalkStore::init(&replayed.graph, walks.walks_per_node, walks.epsilon, &mut rng)?;
            let fresh = estimate(&fresh_store);
            eprintln!(
                "tv_incremental={:.6} tv_fresh={:.6} reroutes={}",
                incremental.total_variation(&oracle),
                fresh.total_variation(&oracle),
                replayed.record.reroutes_total
            );
            let mut out = output(&out)?;
            incremental.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
