use cg_lab::engine::{cg_solve, CgConfig, CgEngine, IterationRecord, IterationStatus, Termination};
use cg_lab::instances::{generate, material_lower_bound, GcpInstance, GenConfig, Instance};
use cg_lab::oracle::{independence_number, solve_full_enumeration};
use cg_lab::selection::{Selection, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_csp(seed: u64) -> Instance {
    generate(&GenConfig::csp(20, 6, 0.1, 0.7, seed)).unwrap()
}

fn small_gcp(seed: u64) -> Instance {
    generate(&GenConfig::gcp(8 + seed as usize % 5, 0.5, seed)).unwrap()
}

#[test]
fn converged_objective_matches_oracle() {
    let cfg = CgConfig::default();
    for seed in 0..8 {
        for inst in [small_csp(seed), small_gcp(seed)] {
            let oracle = solve_full_enumeration(&inst).unwrap();
            for s in Strategy::ALL {
                let run = cg_solve(&inst, &s, &cfg, seed).unwrap();
                assert_eq!(run.status, Termination::Converged);
                assert!(
                    (run.final_objective - oracle).abs() <= 1e-6,
                    "{s} on seed {seed}: {} vs {oracle}",
                    run.final_objective
                );
            }
        }
    }
}

#[test]
fn objective_is_monotone() {
    for seed in 0..10 {
        let inst = generate(&GenConfig::category(
            cg_lab::instances::ProblemKind::Csp,
            cg_lab::instances::Category::Easy,
            seed,
        ))
        .unwrap();
        for s in [Strategy::GreedySingle, Strategy::RandomMulti, Strategy::DiverseMulti] {
            let run = cg_solve(&inst, &s, &CgConfig::default(), seed).unwrap();
            for w in run.records.windows(2) {
                assert!(w[1].objective <= w[0].objective + 1e-9);
            }
        }
    }
}

#[test]
fn lower_bounds_hold() {
    for seed in 0..10 {
        let inst = small_csp(seed);
        let Instance::Csp(csp) = &inst else { unreachable!() };
        let lb = material_lower_bound(csp);
        let run = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0).unwrap();
        assert!(run.final_objective >= *lb.numer() as f64 / *lb.denom() as f64 - 1e-9);

        let inst = small_gcp(seed);
        let Instance::Gcp(gcp) = &inst else { unreachable!() };
        let alpha = independence_number(gcp);
        let run = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0).unwrap();
        assert!(run.final_objective >= gcp.node_count as f64 / alpha as f64 - 1e-9);
    }
}

#[test]
fn records_round_trip_as_json_lines() {
    let run = cg_solve(&small_csp(3), &Strategy::RandomMulti, &CgConfig::default(), 9).unwrap();
    let mut buf = Vec::new();
    run.write_jsonl(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let back: Vec<IterationRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(back, run.records);
    assert_eq!(back.len(), run.iterations);
    assert_eq!(back.last().unwrap().objective, run.final_objective);
}

#[test]
fn seeded_runs_repeat() {
    let inst = small_gcp(4);
    for s in Strategy::ALL {
        let a = cg_solve(&inst, &s, &CgConfig::default(), 5).unwrap();
        let b = cg_solve(&inst, &s, &CgConfig::default(), 5).unwrap();
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.final_objective, b.final_objective);
        let sel = |r: &cg_lab::engine::CgRun| r.records.iter().map(|x| x.selected.clone()).collect::<Vec<_>>();
        assert_eq!(sel(&a), sel(&b));
    }
}

#[test]
fn forcing_keeps_the_pricing_optimum() {
    let inst = small_csp(11);
    let run = cg_solve(&inst, &Strategy::RandomMulti, &CgConfig::default(), 2).unwrap();
    for rec in &run.records {
        if !rec.pool_reduced_costs.is_empty() && rec.pool_reduced_costs[0] < -1e-6 {
            assert!(rec.selected.contains(&0), "{:?}", rec.selected);
        }
    }
}

#[test]
fn step_api_drives_a_run() {
    let inst = Instance::Gcp(GcpInstance::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap());
    let mut engine = CgEngine::new(&inst, CgConfig::default()).unwrap();
    let mut status = engine.begin_iteration().unwrap();
    while status == IterationStatus::Select {
        let k = engine.pool().len().min(engine.config().select_count);
        engine.apply_selection(&Selection::new((0..k).collect()), 0.0).unwrap();
        status = engine.begin_iteration().unwrap();
    }
    assert_eq!(status, IterationStatus::Converged);
    assert!((engine.objective().unwrap() - 2.5).abs() <= 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut greedy = Strategy::GreedyMulti;
    let run = cg_solve(&inst, &greedy, &CgConfig::default(), 0).unwrap();
    assert_eq!(run.iterations, engine.iteration());
    let mut again = CgEngine::new(&inst, CgConfig::default()).unwrap();
    while again.step_with(&mut greedy, &mut rng).unwrap() == IterationStatus::Select {}
    assert_eq!(again.iteration(), engine.iteration());
}

#[test]
fn unforced_single_random_still_converges() {
    let cfg = CgConfig {
        force_optimum: false,
        ..CgConfig::default()
    };
    let inst = small_csp(21);
    let oracle = solve_full_enumeration(&inst).unwrap();
    let run = cg_solve(&inst, &Strategy::RandomSingle, &cfg, 1).unwrap();
    assert_eq!(run.status, Termination::Converged);
    assert!((run.final_objective - oracle).abs() <= 1e-6);
}
