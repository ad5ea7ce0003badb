//! Candidate pools from both pricing oracles.

use cg_lab::instances::{CspInstance, GcpInstance};
use cg_lab::pricing::{solve_csp_pp, solve_gcp_pp};

fn main() -> cg_lab::Result<()> {
    let csp = CspInstance::new(10, vec![(3, 2), (5, 1)])?;
    let pool = solve_csp_pp(&csp, &[0.4, 0.7], 3);
    println!("cutting stock, duals (0.4, 0.7):");
    for (col, rc) in pool.columns().iter().zip(pool.reduced_costs()) {
        println!("  {:?}  rc {rc:+.3}", col.to_dense(csp.num_orders()));
    }

    // 6-cycle
    let gcp = GcpInstance::new(6, (0..6).map(|i| (i, (i + 1) % 6)).collect())?;
    let duals = [0.9, 0.1, 0.6, 0.3, 0.5, 0.2];
    let pool = solve_gcp_pp(&gcp, &duals, 5);
    println!("coloring C6, duals {duals:?}:");
    for (col, rc) in pool.columns().iter().zip(pool.reduced_costs()) {
        println!("  nodes {:?}  rc {rc:+.3}", col.support().collect::<Vec<_>>());
    }
    Ok(())
}
