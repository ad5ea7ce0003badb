use std::fs;

use cg_lab::bench::{aggregate, bench, read_runs, report, BenchOptions, Dataset, RunSummary};
use cg_lab::engine::{CgConfig, Termination};
use cg_lab::instances::{Category, ProblemKind};
use cg_lab::selection::Strategy;
use cg_lab::Error;

fn easy(count: usize) -> Dataset {
    Dataset::generate(ProblemKind::Csp, Category::Easy, count, 100).unwrap()
}

#[test]
fn csv_has_one_row_per_strategy() {
    let ds = easy(100);
    let out = bench(&[ds], &[Strategy::GreedyMulti, Strategy::DiverseMulti], &BenchOptions::default()).unwrap();
    let csv = out.report.to_csv().unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    for row in &out.report.rows {
        assert_eq!(row.instances, 100);
        assert_eq!(row.cap_reached, 0);
    }
    assert_eq!(out.runs.len(), 200);
}

#[test]
fn stored_runs_reproduce_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let ds = easy(15);
    let strategies = [Strategy::GreedySingle, Strategy::GreedyMulti, Strategy::RandomMulti];
    let out = bench(&[ds], &strategies, &BenchOptions::default()).unwrap();
    let files = out.write(dir.path()).unwrap();
    assert_eq!(files.len(), 3);

    let rep = report(&files, "greedy-s").unwrap();
    assert_eq!(rep.to_csv().unwrap(), fs::read_to_string(dir.path().join("report.csv")).unwrap());
    assert_eq!(rep.to_text(), fs::read_to_string(dir.path().join("report.txt")).unwrap());

    // mean iterations from the per-instance lines
    let runs = read_runs(&files).unwrap();
    for row in &rep.rows {
        let its: Vec<usize> = runs
            .iter()
            .filter(|r| r.strategy == row.strategy)
            .map(|r| r.iterations)
            .collect();
        assert_eq!(row.mean_iterations, its.iter().sum::<usize>() as f64 / its.len() as f64);
    }
    let base = rep.row("csp-easy", "greedy-s").unwrap();
    assert_eq!((base.wins, base.losses, base.ties), (Some(0), Some(0), Some(15)));
    let gm = rep.row("csp-easy", "greedy-m").unwrap();
    assert!(gm.mean_iterations < base.mean_iterations);
}

#[test]
fn repeated_benches_agree() {
    let ds = easy(20);
    let strategies = [Strategy::RandomSingle, Strategy::RandomMulti, Strategy::DiverseMulti];
    let counts = |threads| {
        let opts = BenchOptions {
            threads: Some(threads),
            ..BenchOptions::default()
        };
        bench(std::slice::from_ref(&ds), &strategies, &opts)
            .unwrap()
            .runs
            .into_iter()
            .map(|r| (r.run_id, r.seed, r.iterations, r.final_objective))
            .collect::<Vec<_>>()
    };
    let a = counts(1);
    assert_eq!(a, counts(4));
    assert_eq!(a, counts(2));
}

#[test]
fn cap_reached_runs_are_counted() {
    let ds = easy(5);
    let opts = BenchOptions {
        config: CgConfig {
            max_iterations: 3,
            ..CgConfig::default()
        },
        ..BenchOptions::default()
    };
    let out = bench(&[ds], &[Strategy::GreedySingle], &opts).unwrap();
    let row = &out.report.rows[0];
    assert_eq!(row.cap_reached, 5);
    assert!(out.runs.iter().all(|r| r.status == Termination::CapReached && r.iterations == 3));
    assert!(out.report.to_csv().unwrap().lines().nth(1).unwrap().contains(",5,"));
}

#[test]
fn empty_and_missing_inputs() {
    let rep = report(&[], "greedy-s").unwrap();
    assert!(rep.rows.is_empty());
    let missing = std::path::PathBuf::from("/nonexistent/runs.jsonl");
    match report(std::slice::from_ref(&missing), "greedy-s") {
        Err(Error::Io { path, .. }) => assert_eq!(path, missing),
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_run_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&[easy(3)], &[Strategy::GreedyMulti], &BenchOptions::default()).unwrap();
    let files = out.write(dir.path()).unwrap();
    let twice = vec![files[0].clone(), files[0].clone()];
    assert!(matches!(report(&twice, "greedy-s"), Err(Error::Report(_))));
}

#[test]
fn datasets_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("csp-easy");
    let ds = easy(4);
    ds.save(&path).unwrap();
    let back = Dataset::load(&path).unwrap();
    assert_eq!(back, ds);
}

#[test]
fn aggregate_is_order_stable() {
    let out = bench(&[easy(6)], &[Strategy::GreedyMulti, Strategy::GreedySingle], &BenchOptions::default()).unwrap();
    let mut reversed: Vec<RunSummary> = out.runs.clone();
    reversed.reverse();
    let a = aggregate(&out.runs, "greedy-s").unwrap();
    let b = aggregate(&reversed, "greedy-s").unwrap();
    let strip = |r: &cg_lab::bench::BenchReport| {
        r.rows
            .iter()
            .map(|x| (x.dataset.clone(), x.strategy.clone(), x.instances, x.mean_iterations, x.wins))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}
