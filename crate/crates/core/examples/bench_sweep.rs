//! A scaled-down strategy sweep that writes run files and reports, then
//! re-aggregates the run files.
//!
//! cargo run --release --example bench_sweep -- [instances-per-dataset]

use cg_lab::bench::{bench, report, BenchOptions, Dataset};
use cg_lab::instances::{Category, ProblemKind};
use cg_lab::selection::Strategy;

fn main() -> cg_lab::Result<()> {
    let count: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let datasets = vec![
        Dataset::generate(ProblemKind::Csp, Category::Easy, count, 0)?,
        Dataset::generate(ProblemKind::Gcp, Category::Easy, count, 0)?,
    ];
    let strategies = [Strategy::GreedySingle, Strategy::GreedyMulti, Strategy::DiverseMulti, Strategy::RandomMulti];
    let out = bench(&datasets, &strategies, &BenchOptions::default())?;
    let dir = std::env::temp_dir().join("cg-lab-bench");
    let files = out.write(&dir)?;
    print!("{}", out.report.to_text());
    let again = report(&files, "greedy-s")?;
    assert_eq!(again.to_csv()?, out.report.to_csv()?);
    println!("wrote {} run files and report.csv/report.txt under {}", files.len(), dir.display());
    Ok(())
}
