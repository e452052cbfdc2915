//! Batch experiments: trial counts, trivial outcomes and cumulative success
//! curves for each operator, plus linear fits over problem size.
//!
//! Every crossover in a batch uses its own ChaCha stream derived from the
//! batch seed and the item index, so results do not depend on thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use edgex_core::directed::{self, DirectedOptions};
use edgex_core::fitness::{random_euclidean_instance, TspInstance};
use edgex_core::optimal::{optimal_crossover_on, OptimalOptions, DEFAULT_MAX_CANDIDATES};
use edgex_core::perm::{mutate_swaps, random_permutation};
use edgex_core::undirected::{self, UndirectedOptions};
use edgex_core::{CrossoverOutcome, Error as CoreError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Directed,
    Undirected,
    Optimal,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Directed => "directed",
            Mode::Undirected => "undirected",
            Mode::Optimal => "optimal",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directed" => Ok(Mode::Directed),
            "undirected" => Ok(Mode::Undirected),
            "optimal" => Ok(Mode::Optimal),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Dissimilarity of the second parent: a number of random transpositions
/// applied to the first, or an independent random tour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Swaps {
    Count(usize),
    Random,
}

impl fmt::Display for Swaps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Swaps::Count(s) => write!(f, "{s}"),
            Swaps::Random => f.write_str("random"),
        }
    }
}

impl FromStr for Swaps {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("random") {
            return Ok(Swaps::Random);
        }
        s.parse()
            .map(Swaps::Count)
            .map_err(|_| Error::Config(format!("invalid swap count {s:?}")))
    }
}

/// Cities for optimal mode: uniform in a `width x height` rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceOptions {
    pub width: f64,
    pub height: f64,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        Self {
            width: 1.0,
            height: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub swaps: Swaps,
    pub batch: usize,
    pub seed: u64,
    /// Trial cap per crossover; in optimal mode the candidate cap, which
    /// defaults to [`DEFAULT_MAX_CANDIDATES`].
    pub max_trials: Option<u64>,
    /// Exclude boundary selections. Off by default so that trivial outcomes
    /// are measured rather than suppressed.
    pub avoid_trivial: bool,
    /// Undirected mode only.
    pub respectful: bool,
    pub instance: InstanceOptions,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n: usize, swaps: Swaps, batch: usize, seed: u64) -> Self {
        Self {
            mode,
            n,
            swaps,
            batch,
            seed,
            max_trials: None,
            avoid_trivial: false,
            respectful: true,
            instance: InstanceOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::Config("batch must be at least 1".into()));
        }
        let min = if self.mode == Mode::Undirected { 3 } else { 2 };
        if self.n < min {
            return Err(Error::Config(format!(
                "n must be at least {min} in {} mode",
                self.mode
            )));
        }
        if self.max_trials == Some(0) {
            return Err(Error::Config("max trials must be at least 1".into()));
        }
        Ok(())
    }

    /// `key value` lines describing the run.
    pub fn describe(&self) -> Vec<String> {
        let mut lines = vec![
            format!("mode {}", self.mode),
            format!("n {}", self.n),
            format!("swaps {}", self.swaps),
            format!("batch {}", self.batch),
            format!("seed {}", self.seed),
            format!("avoid_trivial {}", self.avoid_trivial),
        ];
        if let Some(m) = self.max_trials {
            lines.push(format!("max_trials {m}"));
        }
        match self.mode {
            Mode::Undirected => lines.push(format!("respectful {}", self.respectful)),
            Mode::Optimal => lines.push(format!(
                "instance uniform {}x{}",
                self.instance.width, self.instance.height
            )),
            Mode::Directed => {}
        }
        lines
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatRecord {
    pub config: ExperimentConfig,
    pub mean_trials: f64,
    pub fraction_nontrivial: f64,
    /// Entry `k` is the fraction finished nontrivially within `k + 1` trials.
    pub cumulative: Vec<f64>,
    pub trials: Vec<u64>,
    pub trivial: Vec<bool>,
    /// Per crossover: inheritance cycles (directed, optimal) or the fewest
    /// AB-cycles over all traversals (undirected).
    pub units: Vec<usize>,
    /// Crossovers that hit the trial cap or failed otherwise; counted trivial.
    pub failures: usize,
}

impl StatRecord {
    pub fn trivial_count(&self) -> usize {
        self.trivial.iter().filter(|&&t| t).count()
    }

    pub fn max_trials(&self) -> u64 {
        self.trials.iter().copied().max().unwrap_or(0)
    }
}

struct Item {
    trials: u64,
    trivial: bool,
    units: usize,
    failed: bool,
}

fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_one(cfg: &ExperimentConfig, inst: Option<&TspInstance>, index: usize) -> Result<Item> {
    let mut rng = item_rng(cfg.seed, index);
    let a = random_permutation(cfg.n, &mut rng)?;
    let b = match cfg.swaps {
        Swaps::Count(s) => mutate_swaps(&a, s, &mut rng),
        Swaps::Random => random_permutation(cfg.n, &mut rng)?,
    };
    let result: edgex_core::Result<CrossoverOutcome> = match cfg.mode {
        Mode::Directed => {
            let opts = DirectedOptions {
                avoid_trivial: cfg.avoid_trivial,
                max_trials: cfg.max_trials,
            };
            directed::crossover(&a, &b, &mut rng, &opts)
        }
        Mode::Undirected => {
            let opts = UndirectedOptions {
                respectful: cfg.respectful,
                avoid_trivial_esets: cfg.avoid_trivial,
                max_trials: cfg.max_trials,
            };
            undirected::crossover(&a, &b, &mut rng, &opts)
        }
        Mode::Optimal => {
            let opts = OptimalOptions {
                max_candidates: cfg.max_trials.unwrap_or(DEFAULT_MAX_CANDIDATES),
                maximize: false,
            };
            let inst = inst.expect("optimal mode has an instance");
            optimal_crossover_on(&a, &b, inst, &opts).map(|o| o.outcome)
        }
    };
    let cap = cfg.max_trials.unwrap_or(match cfg.mode {
        Mode::Optimal => DEFAULT_MAX_CANDIDATES,
        _ => 1,
    });
    Ok(match result {
        Ok(out) => Item {
            trials: out.trials,
            trivial: out.trivial,
            units: out.units,
            failed: false,
        },
        Err(CoreError::TrialBudgetExhausted { trials, .. }) => Item {
            trials,
            trivial: true,
            units: 0,
            failed: true,
        },
        Err(CoreError::CandidateBudgetExhausted { candidates, .. }) => Item {
            trials: candidates,
            trivial: true,
            units: 0,
            failed: true,
        },
        Err(e @ (CoreError::SizeMismatch { .. } | CoreError::TooSmall { .. })) => return Err(e.into()),
        Err(_) => Item {
            trials: cap,
            trivial: true,
            units: 0,
            failed: true,
        },
    })
}

/// The instance used by every crossover of an optimal-mode batch.
pub fn batch_instance(cfg: &ExperimentConfig) -> Result<TspInstance> {
    let mut rng = item_rng(cfg.seed, usize::MAX);
    Ok(random_euclidean_instance(
        cfg.n,
        cfg.instance.width,
        cfg.instance.height,
        &mut rng,
    )?)
}

/// Runs `cfg.batch` independent crossovers.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<StatRecord> {
    cfg.validate()?;
    let inst = match cfg.mode {
        Mode::Optimal => Some(batch_instance(cfg)?),
        _ => None,
    };
    let items = (0..cfg.batch)
        .into_par_iter()
        .map(|i| run_one(cfg, inst.as_ref(), i))
        .collect::<Result<Vec<_>>>()?;

    let trials: Vec<u64> = items.iter().map(|it| it.trials).collect();
    let trivial: Vec<bool> = items.iter().map(|it| it.trivial).collect();
    let batch = cfg.batch as f64;
    let mean_trials = trials.iter().map(|&t| t as f64).sum::<f64>() / batch;
    let fraction_nontrivial = trivial.iter().filter(|&&t| !t).count() as f64 / batch;
    Ok(StatRecord {
        config: cfg.clone(),
        mean_trials,
        fraction_nontrivial,
        cumulative: cumulative_curve(&trials, &trivial),
        units: items.iter().map(|it| it.units).collect(),
        failures: items.iter().filter(|it| it.failed).count(),
        trials,
        trivial,
    })
}

/// For each `N` in `1..=max(trials)`, the fraction of crossovers that ended
/// nontrivially within `N` trials.
pub fn cumulative_curve(trials: &[u64], trivial: &[bool]) -> Vec<f64> {
    assert_eq!(trials.len(), trivial.len());
    let Some(&max) = trials.iter().max() else {
        return Vec::new();
    };
    let mut hist = vec![0u64; max as usize + 1];
    for (&t, &triv) in trials.iter().zip(trivial) {
        if !triv {
            hist[t as usize] += 1;
        }
    }
    let total = trials.len() as f64;
    let mut acc = 0u64;
    hist[1..]
        .iter()
        .map(|&h| {
            acc += h;
            acc as f64 / total
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares `y = slope * x`. The reported r² is the uncentred one,
/// `1 - SS_res / sum(y²)`, as is usual for regressions through the origin.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x).powi(2)).sum();
    LinearFit {
        slope,
        intercept: 0.0,
        r_squared: r_squared(ss_res, syy),
    }
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn fit_ordinary(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    LinearFit {
        slope,
        intercept,
        r_squared: r_squared(ss_res, syy),
    }
}

fn r_squared(ss_res: f64, ss_tot: f64) -> f64 {
    if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub best_swaps: usize,
    pub max_mean_trials: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub mode: Mode,
    pub rows: Vec<SweepRow>,
    /// `n -> swap level with the highest mean trials`
    pub location: LinearFit,
    /// `n -> highest mean trials`
    pub value: LinearFit,
    pub records: Vec<StatRecord>,
}

/// Runs every `(n, swaps)` combination, finds the swap level with the highest
/// mean trial count at each `n`, and fits both the location and the height
/// of that maximum against `n` through the origin.
pub fn sweep_and_fit(
    mode: Mode,
    n_values: &[usize],
    swap_values: &[usize],
    batch: usize,
    seed: u64,
) -> Result<FitReport> {
    if n_values.is_empty() || swap_values.is_empty() {
        return Err(Error::Config("sweep grids must be nonempty".into()));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    let mut records = Vec::with_capacity(n_values.len() * swap_values.len());
    for &n in n_values {
        let mut best: Option<(usize, f64)> = None;
        for &s in swap_values {
            let rec = run_batch(&ExperimentConfig::new(mode, n, Swaps::Count(s), batch, seed))?;
            if best.is_none_or(|(_, m)| rec.mean_trials > m) {
                best = Some((s, rec.mean_trials));
            }
            records.push(rec);
        }
        let (best_swaps, max_mean_trials) = best.expect("nonempty swap grid");
        rows.push(SweepRow {
            n,
            best_swaps,
            max_mean_trials,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let loc: Vec<f64> = rows.iter().map(|r| r.best_swaps as f64).collect();
    let val: Vec<f64> = rows.iter().map(|r| r.max_mean_trials).collect();
    Ok(FitReport {
        mode,
        location: fit_through_origin(&xs, &loc),
        value: fit_through_origin(&xs, &val),
        rows,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarietyBound {
    pub min_cycles: usize,
    pub max_trials: u64,
    /// `log2(2^min_cycles / max_trials)`
    pub log2_bound: f64,
}

impl VarietyBound {
    pub fn bound(&self) -> f64 {
        self.log2_bound.exp2()
    }
}

/// Conservative count of distinct offspring from an undirected batch: every
/// traversal offered at least `2^min_cycles` E-sets and no crossover needed
/// more than `max_trials` draws.
pub fn ab_cycle_variety_estimate(rec: &StatRecord) -> Result<VarietyBound> {
    if rec.config.mode != Mode::Undirected {
        return Err(Error::Config("variety estimate needs an undirected batch".into()));
    }
    let min_cycles = rec.units.iter().copied().min().unwrap_or(0);
    let max_trials = rec.max_trials().max(1);
    Ok(VarietyBound {
        min_cycles,
        max_trials,
        log2_bound: min_cycles as f64 - (max_trials as f64).log2(),
    })
}

fn write_comments<W: Write>(out: &mut W, lines: &[String]) -> Result<()> {
    for l in lines {
        writeln!(out, "# {l}").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

/// One row per record: `mode,n,swaps,batch,seed,mean_trials,fraction_nontrivial`.
pub fn write_stats_csv<W: Write>(mut out: W, comments: &[String], records: &[StatRecord]) -> Result<()> {
    write_comments(&mut out, comments)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "n", "swaps", "batch", "seed", "mean_trials", "fraction_nontrivial"])?;
    for r in records {
        let c = &r.config;
        w.write_record([
            c.mode.to_string(),
            c.n.to_string(),
            c.swaps.to_string(),
            c.batch.to_string(),
            c.seed.to_string(),
            r.mean_trials.to_string(),
            r.fraction_nontrivial.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

/// Long format: `mode,n,swaps,N,fraction`.
pub fn write_cumulative_csv<W: Write>(
    mut out: W,
    comments: &[String],
    records: &[StatRecord],
) -> Result<()> {
    write_comments(&mut out, comments)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "n", "swaps", "N", "fraction"])?;
    for r in records {
        let c = &r.config;
        let (mode, n, swaps) = (c.mode.to_string(), c.n.to_string(), c.swaps.to_string());
        for (k, f) in r.cumulative.iter().enumerate() {
            w.write_record([&mode, &n, &swaps, &(k + 1).to_string(), &f.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}
