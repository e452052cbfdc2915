//! Command-line front end.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use edgex_core::directed::{self, DirectedOptions};
use edgex_core::optimal::{optimal_crossover_on, OptimalOptions, DEFAULT_MAX_CANDIDATES};
use edgex_core::undirected::{self, UndirectedOptions};
use edgex_core::{oracle, CrossoverOutcome, Error as CoreError, Permutation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{self, ExperimentConfig, Mode, Swaps};
use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Parser)]
#[command(name = "edgex", version, about = "Edge-preserving crossover for permutations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recombine the first two permutations of a file.
    Xover(XoverArgs),
    /// Enumerate every offspring of the first two permutations of a file.
    Oracle(OracleArgs),
    /// Run crossover batches over a grid and write CSV statistics.
    Bench(BenchArgs),
    /// Locate the worst swap level per size and fit it against size.
    Fit(FitArgs),
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_swaps(s: &str) -> std::result::Result<Swaps, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct XoverArgs {
    /// File with at least two permutations, one per line.
    pub parents: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "directed")]
    pub mode: Mode,
    /// Defaults to a random seed; the seed used is always printed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub avoid_trivial: bool,
    /// Trial cap (candidate cap in optimal mode).
    #[arg(long)]
    pub max_trials: Option<u64>,
    /// Required in optimal mode.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub respectful: bool,
    /// Directed mode: also return the complementary offspring.
    #[arg(long)]
    pub pair: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub parents: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "directed")]
    pub mode: Mode,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub respectful: bool,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_mode, default_value = "directed")]
    pub mode: Mode,
    /// Problem sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Swap counts, comma separated, or `random` for independent parents.
    #[arg(long, value_delimiter = ',', value_parser = parse_swaps, required = true)]
    pub swaps: Vec<Swaps>,
    #[arg(long, default_value_t = 5000)]
    pub batch: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[arg(long, action = ArgAction::Set, default_value_t = false)]
    pub avoid_trivial: bool,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub respectful: bool,
    /// Statistics CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Cumulative-curve CSV; defaults to the statistics path with a
    /// `.cumulative.csv` suffix.
    #[arg(long)]
    pub cumulative_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_parser = parse_mode, default_value = "directed")]
    pub mode: Mode,
    #[arg(long, value_delimiter = ',', default_value = "100,200,300,400,500,600,700,800,900,1000")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub swaps: Vec<usize>,
    #[arg(long, default_value_t = 5000)]
    pub batch: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command, writing its report to `stdout` unless an output
/// file is requested.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Xover(args) => {
            let mut text = String::new();
            let result = run_xover(args, &mut text);
            emit(args.out.as_deref(), &text, stdout)?;
            result
        }
        Command::Oracle(args) => {
            let text = run_oracle(args)?;
            emit(args.out.as_deref(), &text, stdout)
        }
        Command::Bench(args) => {
            let text = run_bench(args)?;
            emit(None, &text, stdout)
        }
        Command::Fit(args) => {
            let text = run_fit(args)?;
            emit(args.out.as_deref(), &text, stdout)
        }
    }
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn read_parents(path: &Path) -> Result<(Permutation, Permutation)> {
    let mut perms = io::read_permutation_file(path)?;
    if perms.len() < 2 {
        return Err(Error::Config(format!(
            "{}: need two parents, found {}",
            path.display(),
            perms.len()
        )));
    }
    perms.truncate(2);
    let b = perms.pop().expect("two parents");
    let a = perms.pop().expect("two parents");
    Ok((a, b))
}

fn read_instance(path: Option<&Path>, n: usize) -> Result<edgex_core::fitness::TspInstance> {
    let path = path.ok_or_else(|| Error::Config("optimal mode needs --instance".into()))?;
    let inst = io::read_instance_file(path)?;
    if inst.n() != n {
        return Err(Error::Core(CoreError::SizeMismatch {
            left: n,
            right: inst.n(),
        }));
    }
    Ok(inst)
}

fn outcome_lines(out: &mut String, o: &CrossoverOutcome) {
    let _ = writeln!(out, "offspring {}", o.offspring);
    let _ = writeln!(out, "trials {}", o.trials);
    let _ = writeln!(out, "trivial {}", o.trivial);
}

fn run_xover(args: &XoverArgs, out: &mut String) -> Result<()> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let _ = writeln!(out, "# seed {seed}");
    let _ = writeln!(out, "# mode {}", args.mode);
    let (a, b) = read_parents(&args.parents)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match args.mode {
        Mode::Directed => {
            let opts = DirectedOptions {
                avoid_trivial: args.avoid_trivial,
                max_trials: args.max_trials,
            };
            if args.pair {
                directed::crossover_pair(&a, &b, &mut rng, &opts).map(|(x, y)| {
                    outcome_lines(out, &x);
                    let _ = writeln!(out, "complement {}", y.offspring);
                })
            } else {
                directed::crossover(&a, &b, &mut rng, &opts).map(|o| outcome_lines(out, &o))
            }
        }
        Mode::Undirected => {
            let opts = UndirectedOptions {
                respectful: args.respectful,
                avoid_trivial_esets: args.avoid_trivial,
                max_trials: args.max_trials,
            };
            undirected::crossover(&a, &b, &mut rng, &opts).map(|o| outcome_lines(out, &o))
        }
        Mode::Optimal => {
            let inst = read_instance(args.instance.as_deref(), a.len())?;
            let opts = OptimalOptions {
                max_candidates: args.max_trials.unwrap_or(DEFAULT_MAX_CANDIDATES),
                maximize: false,
            };
            optimal_crossover_on(&a, &b, &inst, &opts).map(|o| {
                outcome_lines(out, &o.outcome);
                let _ = writeln!(out, "cost {}", o.cost);
            })
        }
    };
    if let Err(e) = &result {
        match e {
            CoreError::TrialBudgetExhausted { fallback, .. } => {
                let _ = writeln!(out, "fallback {fallback}");
            }
            CoreError::CandidateBudgetExhausted { fallback, cost, .. } => {
                let _ = writeln!(out, "fallback {fallback}");
                let _ = writeln!(out, "cost {cost}");
            }
            _ => {}
        }
    }
    Ok(result?)
}

fn run_oracle(args: &OracleArgs) -> Result<String> {
    let (a, b) = read_parents(&args.parents)?;
    let mut out = String::new();
    let _ = writeln!(out, "# mode {}", args.mode);
    match args.mode {
        Mode::Directed | Mode::Undirected => {
            let set = if args.mode == Mode::Directed {
                oracle::enumerate_directed(&a, &b)?
            } else {
                oracle::enumerate_undirected(&a, &b, args.respectful)?
            };
            let _ = writeln!(out, "# offspring {}", set.len());
            for p in set.iter() {
                let _ = writeln!(out, "{p}");
            }
        }
        Mode::Optimal => {
            let inst = read_instance(args.instance.as_deref(), a.len())?;
            let (p, cost) = oracle::optimal_offspring(&a, &b, &inst)?;
            let _ = writeln!(out, "offspring {p}");
            let _ = writeln!(out, "cost {cost}");
        }
    }
    Ok(out)
}

fn cumulative_path(stats: &Path) -> PathBuf {
    let stem = stats
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stats".into());
    stats.with_file_name(format!("{stem}.cumulative.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn run_bench(args: &BenchArgs) -> Result<String> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut records = Vec::with_capacity(args.n.len() * args.swaps.len());
    let mut template = ExperimentConfig::new(args.mode, 0, Swaps::Count(0), args.batch, seed);
    template.max_trials = args.max_trials;
    template.avoid_trivial = args.avoid_trivial;
    template.respectful = args.respectful;

    let mut header = vec![
        format!("seed {seed}"),
        format!("mode {}", args.mode),
        format!("n {}", join(&args.n)),
        format!("swaps {}", join(&args.swaps)),
        format!("batch {}", args.batch),
        format!("avoid_trivial {}", args.avoid_trivial),
    ];
    if let Some(m) = args.max_trials {
        header.push(format!("max_trials {m}"));
    }
    if args.mode == Mode::Undirected {
        header.push(format!("respectful {}", args.respectful));
    }

    // open outputs first so that a bad path fails before any work
    let cumulative = args
        .cumulative_out
        .clone()
        .unwrap_or_else(|| cumulative_path(&args.out));
    let stats_file = create(&args.out)?;
    let cumulative_file = create(&cumulative)?;

    let mut summary = String::new();
    for line in &header {
        let _ = writeln!(summary, "# {line}");
    }
    for &n in &args.n {
        for &swaps in &args.swaps {
            let cfg = ExperimentConfig {
                n,
                swaps,
                ..template.clone()
            };
            let rec = bench::run_batch(&cfg)?;
            let _ = writeln!(
                summary,
                "n={n} swaps={swaps} mean_trials={} fraction_nontrivial={} max_trials={}",
                rec.mean_trials,
                rec.fraction_nontrivial,
                rec.max_trials()
            );
            if args.mode == Mode::Undirected {
                let v = bench::ab_cycle_variety_estimate(&rec)?;
                let _ = writeln!(
                    summary,
                    "  min_ab_cycles={} log2_offspring_bound={}",
                    v.min_cycles, v.log2_bound
                );
            }
            records.push(rec);
        }
    }
    bench::write_stats_csv(stats_file, &header, &records)?;
    bench::write_cumulative_csv(cumulative_file, &header, &records)?;
    let _ = writeln!(summary, "wrote {}", args.out.display());
    let _ = writeln!(summary, "wrote {}", cumulative.display());
    Ok(summary)
}

fn run_fit(args: &FitArgs) -> Result<String> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let report = bench::sweep_and_fit(args.mode, &args.n, &args.swaps, args.batch, seed)?;
    let mut out = String::new();
    let _ = writeln!(out, "# seed {seed}");
    let _ = writeln!(out, "# mode {}", args.mode);
    let _ = writeln!(out, "# swaps {}", join(&args.swaps));
    let _ = writeln!(out, "# batch {}", args.batch);
    let _ = writeln!(out, "n,best_swaps,max_mean_trials");
    for row in &report.rows {
        let _ = writeln!(out, "{},{},{}", row.n, row.best_swaps, row.max_mean_trials);
    }
    let _ = writeln!(
        out,
        "# best_swaps = {} * n (r2 {})",
        report.location.slope, report.location.r_squared
    );
    let _ = writeln!(
        out,
        "# max_mean_trials = {} * n (r2 {})",
        report.value.slope, report.value.r_squared
    );
    Ok(out)
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
