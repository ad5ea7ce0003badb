//! Strategy × dataset sweeps and their aggregated reports.
//!
//! [`bench`] solves every (instance, strategy) pair and keeps one
//! [`RunSummary`] per pair. [`aggregate`] turns summaries into a
//! [`BenchReport`]; [`report`] re-reads stored summaries and goes through the
//! same aggregation, so both paths render identical CSV and text.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{cg_solve, CgConfig, CgRun, Termination};
use crate::instances::{generate, read_instance, write_instance, Category, GenConfig, Instance, ProblemKind};
use crate::selection::Strategy;
use crate::{Error, Result};

/// Overrides the worker count of [`bench`].
pub const THREADS_ENV: &str = "CG_LAB_THREADS";

pub const HARDWARE_DISCLAIMER: &str =
    "Runtimes depend on hardware and load; compare iteration counts across machines.";

/// A named, ordered list of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// `count` instances of a category with seeds `seed_base..seed_base+count`.
    pub fn generate(kind: ProblemKind, category: Category, count: usize, seed_base: u64) -> Result<Self> {
        let instances = (0..count as u64)
            .map(|i| generate(&GenConfig::category(kind, category, seed_base + i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            name: format!("{kind}-{category}"),
            instances,
        })
    }

    /// Writes `dir/00000.json`, `dir/00001.json`, ...
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, inst) in self.instances.iter().enumerate() {
            write_instance(inst, dir.join(format!("{i:05}.json")))?;
        }
        Ok(())
    }

    /// Reads every `*.json` in `dir`, sorted by file name. The dataset takes
    /// the directory's name.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
            .collect::<Result<Vec<_>>>()?;
        paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
        paths.sort();
        let instances = paths.iter().map(read_instance).collect::<Result<Vec<_>>>()?;
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string());
        Ok(Dataset { name, instances })
    }
}

/// One solved (instance, strategy) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub dataset: String,
    pub strategy: String,
    pub instance_seed: u64,
    pub seed: u64,
    pub iterations: usize,
    pub final_objective: f64,
    pub status: Termination,
    pub final_best_reduced_cost: f64,
    pub rmp_seconds: f64,
    pub pricing_seconds: f64,
    pub selection_seconds: f64,
    pub total_seconds: f64,
}

impl RunSummary {
    pub fn from_run(dataset: &str, seed: u64, run: &CgRun) -> Self {
        let (rmp, pricing, selection) = run.phase_seconds();
        RunSummary {
            run_id: format!("{dataset}/{}/{}", run.strategy, run.instance_seed),
            dataset: dataset.to_string(),
            strategy: run.strategy.clone(),
            instance_seed: run.instance_seed,
            seed,
            iterations: run.iterations,
            final_objective: run.final_objective,
            status: run.status,
            final_best_reduced_cost: run.final_best_reduced_cost,
            rmp_seconds: rmp,
            pricing_seconds: pricing,
            selection_seconds: selection,
            total_seconds: run.total_seconds,
        }
    }
}

/// Selection seed for an (instance seed, strategy name) pair: FNV-1a over
/// the seed bytes followed by the name bytes.
pub fn run_seed(instance_seed: u64, strategy: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in instance_seed.to_le_bytes().iter().chain(strategy.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Aggregate over one (dataset, strategy) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub strategy: String,
    pub instances: usize,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    pub cap_reached: usize,
    pub total_seconds: f64,
    pub rmp_seconds: f64,
    pub pricing_seconds: f64,
    pub selection_seconds: f64,
    /// Against the baseline strategy on the same instances: fewer iterations.
    pub wins: Option<usize>,
    pub losses: Option<usize>,
    pub ties: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub baseline: String,
    pub rows: Vec<ReportRow>,
}

impl BenchReport {
    pub fn row(&self, dataset: &str, strategy: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.strategy == strategy)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(CSV_HEADER).map_err(csv_error)?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:<12} {:>6} {:>10} {:>8} {:>4} {:>10} {:>8} {:>8} {:>8} {:>12}\n",
            "dataset", "strategy", "n", "mean_iter", "std", "cap", "total_s", "rmp%", "pp%", "sel%",
            format!("w/l/t vs {}", self.baseline)
        ));
        for r in &self.rows {
            let pct = |x: f64| {
                let phases = r.rmp_seconds + r.pricing_seconds + r.selection_seconds;
                if phases > 0.0 {
                    100.0 * x / phases
                } else {
                    0.0
                }
            };
            let wlt = match (r.wins, r.losses, r.ties) {
                (Some(w), Some(l), Some(t)) => format!("{w}/{l}/{t}"),
                _ => "-".to_string(),
            };
            out.push_str(&format!(
                "{:<16} {:<12} {:>6} {:>10.2} {:>8.2} {:>4} {:>10.3} {:>8.1} {:>8.1} {:>8.1} {:>12}\n",
                r.dataset,
                r.strategy,
                r.instances,
                r.mean_iterations,
                r.std_iterations,
                r.cap_reached,
                r.total_seconds,
                pct(r.rmp_seconds),
                pct(r.pricing_seconds),
                pct(r.selection_seconds),
                wlt
            ));
        }
        out.push_str(HARDWARE_DISCLAIMER);
        out.push('\n');
        out
    }

    /// Writes `report.csv` and `report.txt` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join("report.csv");
        fs::write(&csv_path, self.to_csv()?).map_err(|e| Error::io(&csv_path, e))?;
        let txt_path = dir.join("report.txt");
        fs::write(&txt_path, self.to_text()).map_err(|e| Error::io(&txt_path, e))?;
        Ok(())
    }
}

const CSV_HEADER: [&str; 13] = [
    "dataset",
    "strategy",
    "instances",
    "mean_iterations",
    "std_iterations",
    "cap_reached",
    "total_seconds",
    "rmp_seconds",
    "pricing_seconds",
    "selection_seconds",
    "wins",
    "losses",
    "ties",
];

fn csv_error(e: csv::Error) -> Error {
    Error::Report(e.to_string())
}

/// Groups summaries by (dataset, strategy), sorted by name. Sums run in
/// input order within a group.
pub fn aggregate(runs: &[RunSummary], baseline: &str) -> Result<BenchReport> {
    let mut seen = HashSet::new();
    for r in runs {
        if !seen.insert(r.run_id.as_str()) {
            return Err(Error::Report(format!("duplicate run id `{}`", r.run_id)));
        }
    }
    let mut groups: BTreeMap<(&str, &str), Vec<&RunSummary>> = BTreeMap::new();
    for r in runs {
        groups.entry((&r.dataset, &r.strategy)).or_default().push(r);
    }
    let rows = groups
        .iter()
        .map(|(&(dataset, strategy), group)| {
            let n = group.len();
            let total_iters: usize = group.iter().map(|r| r.iterations).sum();
            let mean = total_iters as f64 / n as f64;
            let var = group
                .iter()
                .map(|r| (r.iterations as f64 - mean).powi(2))
                .sum::<f64>()
                / n as f64;
            let base: Option<BTreeMap<u64, usize>> = groups.get(&(dataset, baseline)).map(|b| {
                b.iter().map(|r| (r.instance_seed, r.iterations)).collect()
            });
            let (mut wins, mut losses, mut ties) = (0, 0, 0);
            if let Some(base) = &base {
                for r in group {
                    match base.get(&r.instance_seed) {
                        Some(&b) if r.iterations < b => wins += 1,
                        Some(&b) if r.iterations > b => losses += 1,
                        Some(_) => ties += 1,
                        None => {}
                    }
                }
            }
            let sum = |f: fn(&RunSummary) -> f64| group.iter().map(|r| f(r)).sum::<f64>();
            ReportRow {
                dataset: dataset.to_string(),
                strategy: strategy.to_string(),
                instances: n,
                mean_iterations: mean,
                std_iterations: var.sqrt(),
                cap_reached: group
                    .iter()
                    .filter(|r| r.status == Termination::CapReached)
                    .count(),
                total_seconds: sum(|r| r.total_seconds),
                rmp_seconds: sum(|r| r.rmp_seconds),
                pricing_seconds: sum(|r| r.pricing_seconds),
                selection_seconds: sum(|r| r.selection_seconds),
                wins: base.as_ref().map(|_| wins),
                losses: base.as_ref().map(|_| losses),
                ties: base.as_ref().map(|_| ties),
            }
        })
        .collect();
    Ok(BenchReport {
        baseline: baseline.to_string(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub config: CgConfig,
    /// Worker threads; `None` uses the environment override or rayon's default.
    pub threads: Option<usize>,
    pub baseline: String,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            config: CgConfig::default(),
            threads: None,
            baseline: Strategy::GreedySingle.as_str().to_string(),
        }
    }
}

fn thread_count(requested: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_ENV}=`{v}` is not a positive integer"))),
        Err(_) => Ok(requested),
    }
}

/// Output of [`bench`]: per-run summaries in (dataset, strategy, instance)
/// order plus their aggregate.
#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub runs: Vec<RunSummary>,
    pub report: BenchReport,
}

impl BenchOutcome {
    /// Writes `runs/<dataset>/<strategy>.jsonl`, `report.csv` and `report.txt`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        let mut files: BTreeMap<PathBuf, Vec<&RunSummary>> = BTreeMap::new();
        for r in &self.runs {
            let path = dir.join("runs").join(&r.dataset).join(format!("{}.jsonl", r.strategy));
            files.entry(path).or_default().push(r);
        }
        for (path, runs) in &files {
            let parent = path.parent().expect("run files live under runs/");
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            for r in runs {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        self.report.write(dir)?;
        Ok(files.into_keys().collect())
    }
}

/// Solves every (instance, strategy) pair once.
pub fn bench(datasets: &[Dataset], strategies: &[Strategy], options: &BenchOptions) -> Result<BenchOutcome> {
    options.config.validate()?;
    let jobs: Vec<(&Dataset, Strategy, &Instance)> = datasets
        .iter()
        .flat_map(|d| {
            strategies
                .iter()
                .flat_map(move |&s| d.instances.iter().map(move |inst| (d, s, inst)))
        })
        .collect();
    let run_all = || {
        jobs.par_iter()
            .map(|&(d, s, inst)| {
                let seed = run_seed(inst.seed(), s.as_str());
                let run = cg_solve(inst, &s, &options.config, seed)?;
                Ok(RunSummary::from_run(&d.name, seed, &run))
            })
            .collect::<Result<Vec<_>>>()
    };
    let runs = match thread_count(options.threads)? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run_all)?,
        None => run_all()?,
    };
    let report = aggregate(&runs, &options.baseline)?;
    Ok(BenchOutcome { runs, report })
}

/// Reads run summaries from JSON-lines files, in the order given.
pub fn read_runs(files: &[PathBuf]) -> Result<Vec<RunSummary>> {
    let mut runs = Vec::new();
    for path in files {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            runs.push(serde_json::from_str(&line).map_err(|source| Error::Parse {
                path: path.clone(),
                source,
            })?);
        }
    }
    Ok(runs)
}

/// Aggregates stored run files.
pub fn report(files: &[PathBuf], baseline: &str) -> Result<BenchReport> {
    aggregate(&read_runs(files)?, baseline)
}
