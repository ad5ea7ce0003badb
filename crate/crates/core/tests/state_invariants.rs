use cg_lab::engine::{CgConfig, CgEngine, IterationStatus};
use cg_lab::instances::{generate, Category, GenConfig, Instance, ProblemKind};
use cg_lab::selection::{Selection, Strategy};
use cg_lab::state::{col, row, StateSnapshot};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Snapshots of every decision point of a greedy-m run.
fn snapshots(inst: &Instance) -> Vec<StateSnapshot> {
    let mut engine = CgEngine::new(inst, CgConfig::default()).unwrap();
    let mut out = Vec::new();
    let mut status = engine.begin_iteration().unwrap();
    while status == IterationStatus::Select {
        out.push(engine.snapshot());
        let k = engine.pool().len().min(5);
        engine.apply_selection(&Selection::new((0..k).collect()), 0.0).unwrap();
        status = engine.begin_iteration().unwrap();
    }
    out
}

fn check(s: &StateSnapshot) {
    let m = s.constraints.len();
    let n_cols = s.columns.len();
    let edges = s.edges.len() as f64;
    let row_sum: f64 = s.constraints.iter().map(|f| f[row::CONNECTIVITY] * n_cols as f64).sum();
    let col_sum: f64 = s.columns.iter().map(|f| f[col::CONNECTIVITY] * m as f64).sum();
    assert!((row_sum - edges).abs() < 1e-6, "{row_sum} vs {edges}");
    assert!((col_sum - edges).abs() < 1e-6, "{col_sum} vs {edges}");
    for &(c, r, a) in &s.edges {
        assert!(c < n_cols && r < m && a > 0.0);
    }

    for (i, f) in s.columns.iter().enumerate() {
        let is_cand = s.candidates.contains(&i);
        assert_eq!(f[col::CANDIDATE] == 1.0, is_cand);
        if is_cand {
            assert_eq!(f[col::SOLUTION_VALUE], 0.0);
            assert_eq!(f[col::LEFT_BASIS], 0.0);
            assert_eq!(f[col::ENTERED_BASIS], 0.0);
        }
        assert!(f[col::ITERS_IN_BASIS] + f[col::ITERS_OUT_OF_BASIS] <= 1.0 + 1e-12);
        assert!((0.0..=1.0).contains(&f[col::WASTE]));
    }
    for f in &s.constraints {
        assert!(f[row::DUAL] >= -1e-9);
        assert!(f[row::SLACK] >= -1e-9);
        assert!(f[row::RHS] > 0.0 && f[row::RHS] <= 1.0);
    }

    let n = s.candidates.len();
    assert_eq!(s.cand_dist.len(), n * n.saturating_sub(1) / 2);
    for i in 0..n {
        assert_eq!(s.candidate_distance(i, i), (0.0, 0.0));
        for j in 0..n {
            let d = s.candidate_distance(i, j);
            assert_eq!(d, s.candidate_distance(j, i));
            assert!((0.0..=1.0).contains(&d.0) && (0.0..=1.0).contains(&d.1));
        }
    }
    assert_eq!(s.meta.n, 10);
    assert_eq!(s.meta.k, 5);
    assert!(s.meta.obj <= s.meta.obj0 + 1e-9);
}

#[test]
fn snapshots_satisfy_invariants() {
    for seed in 0..4 {
        for kind in [ProblemKind::Csp, ProblemKind::Gcp] {
            let inst = generate(&GenConfig::category(kind, Category::Easy, seed)).unwrap();
            let snaps = snapshots(&inst);
            assert!(!snaps.is_empty());
            for (t, s) in snaps.iter().enumerate() {
                check(s);
                assert_eq!(s.meta.t, t + 1);
                let arity = if kind == ProblemKind::Csp { 4 } else { 2 };
                assert_eq!(s.global.len(), arity);
            }
        }
    }
}

#[test]
fn serialization_is_canonical_and_lossless() {
    let inst = generate(&GenConfig::category(ProblemKind::Gcp, Category::Easy, 7)).unwrap();
    let a = snapshots(&inst);
    let b = snapshots(&inst);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        let (jx, jy) = (x.to_json().unwrap(), y.to_json().unwrap());
        assert_eq!(jx, jy);
        assert_eq!(&StateSnapshot::from_json(&jx).unwrap(), x);
    }
    let text = a[0].to_json().unwrap();
    let keys = ["\"constraints\"", "\"columns\"", "\"edges\"", "\"candidates\"", "\"cand_dist\"", "\"global\"", "\"meta\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn empty_candidate_snapshot_serializes() {
    let inst = Instance::Csp(cg_lab::instances::CspInstance::new(10, vec![(3, 2), (5, 1)]).unwrap());
    let mut engine = CgEngine::new(&inst, CgConfig::default()).unwrap();
    engine.begin_iteration().unwrap();
    let mut s = engine.snapshot();
    s.columns.truncate(s.candidates.first().copied().unwrap_or(s.columns.len()));
    s.candidates.clear();
    s.cand_dist.clear();
    let text = s.to_json().unwrap();
    assert!(text.contains("\"candidates\":[]"));
    assert_eq!(StateSnapshot::from_json(&text).unwrap(), s);
}

#[test]
fn first_iteration_features() {
    let inst = Instance::Csp(cg_lab::instances::CspInstance::new(10, vec![(3, 2), (5, 1)]).unwrap());
    let mut engine = CgEngine::new(&inst, CgConfig::default()).unwrap();
    engine.begin_iteration().unwrap();
    let s = engine.snapshot();
    assert!((s.constraints[0][row::DUAL] - 1.0 / 3.0).abs() < 1e-12);
    assert!((s.constraints[1][row::DUAL] - 0.5).abs() < 1e-12);
    assert!((s.columns[0][col::WASTE] - 0.1).abs() < 1e-12);
    // both initial columns entered on the first solve and stay basic
    assert_eq!(s.columns[0][col::ENTERED_BASIS], 1.0);
    assert_eq!(s.columns[0][col::ITERS_IN_BASIS], 1.0);
}

#[test]
fn selector_snapshots_are_pure() {
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, 2)).unwrap();
    let mut engine = CgEngine::new(&inst, CgConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut strategy = Strategy::DiverseMulti;
    assert_eq!(engine.step_with(&mut strategy, &mut rng).unwrap(), IterationStatus::Select);
    assert_eq!(engine.begin_iteration().unwrap(), IterationStatus::Select);
    let a = engine.snapshot();
    let b = engine.snapshot();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}
