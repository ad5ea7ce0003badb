//! Fractional chromatic number by column generation, checked against the
//! full independent-set LP on a small graph.

use cg_lab::engine::{cg_solve, CgConfig};
use cg_lab::instances::{generate, Category, GcpInstance, GenConfig, Instance, ProblemKind};
use cg_lab::oracle::{independence_number, solve_full_enumeration};
use cg_lab::selection::Strategy;

fn main() -> cg_lab::Result<()> {
    let petersen = GcpInstance::new(
        10,
        vec![
            (0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (6, 9), (6, 8), (5, 8),
        ],
    )?;
    let alpha = independence_number(&petersen);
    let inst = Instance::Gcp(petersen);
    let run = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0)?;
    println!(
        "Petersen graph: CG {:.6} in {} iterations, enumeration {:.6}, N/alpha = 10/{alpha}",
        run.final_objective,
        run.iterations,
        solve_full_enumeration(&inst)?
    );

    let inst = generate(&GenConfig::category(ProblemKind::Gcp, Category::Normal, 3))?;
    for s in [Strategy::GreedySingle, Strategy::GreedyMulti, Strategy::DiverseMulti] {
        let run = cg_solve(&inst, &s, &CgConfig::default(), 3)?;
        println!("N=40 graph, {s:<10} {:>4} iterations, LP bound {:.5}", run.iterations, run.final_objective);
    }
    Ok(())
}
