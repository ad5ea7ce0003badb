//! Column generation on one cutting stock instance with a per-iteration trace.
//!
//! cargo run --example cutting_stock_cg -- [seed] [strategy]

use cg_lab::engine::{cg_solve, CgConfig};
use cg_lab::instances::{generate, material_lower_bound, Category, GenConfig, Instance, ProblemKind};
use cg_lab::oracle::solve_full_enumeration;
use cg_lab::selection::Strategy;

fn main() -> cg_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let strategy: Strategy = args.next().as_deref().unwrap_or("greedy-m").parse()?;
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, seed))?;
    let Instance::Csp(csp) = &inst else { unreachable!() };
    println!("L={} orders={:?}", csp.roll_length, csp.orders);

    let run = cg_solve(&inst, &strategy, &CgConfig::default(), seed)?;
    for rec in &run.records {
        println!(
            "iter {:>3}  obj {:>10.5}  best rc {:>8.4}  added {}",
            rec.iteration,
            rec.objective,
            rec.pool_reduced_costs.first().copied().unwrap_or(0.0),
            rec.added_columns.len()
        );
    }
    let lb = material_lower_bound(csp);
    println!(
        "{strategy}: {:?} after {} iterations, LP bound {:.5} (material bound {lb})",
        run.status, run.iterations, run.final_objective
    );
    if csp.num_orders() <= 8 {
        println!("full enumeration: {:.5}", solve_full_enumeration(&inst)?);
    }
    Ok(())
}
