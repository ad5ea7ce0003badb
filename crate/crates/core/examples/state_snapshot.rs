//! The bipartite state handed to a learned policy, and the action table.

use cg_lab::engine::{CgConfig, CgEngine};
use cg_lab::instances::{generate, Category, GenConfig, ProblemKind};
use cg_lab::state::{action_table, col, row};

fn main() -> cg_lab::Result<()> {
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, 4))?;
    let mut engine = CgEngine::new(&inst, CgConfig::default())?;
    engine.begin_iteration()?;
    let s = engine.snapshot();
    println!(
        "{} constraint nodes, {} column nodes ({} candidates), {} edges",
        s.constraints.len(),
        s.columns.len(),
        s.candidates.len(),
        s.edges.len()
    );
    println!("global {:?}", s.global);
    println!("meta   {:?}", s.meta);
    let c0 = &s.constraints[0];
    println!("row 0: dual {:.4} rhs {:.3} slack {:.3}", c0[row::DUAL], c0[row::RHS], c0[row::SLACK]);
    for &i in s.candidates.iter().take(3) {
        let f = &s.columns[i];
        println!("candidate {i}: rc {:+.4} waste {:.3}", f[col::REDUCED_COST], f[col::WASTE]);
    }
    let (cos, jac) = s.candidate_distance(0, 1);
    println!("distance(0, 1): cosine {cos:.4} jaccard {jac:.4}");
    let json = s.to_json()?;
    println!("serialized: {} bytes", json.len());

    let table = action_table(10, 5, true);
    println!("actions: {} total, {} valid with forcing", table.len(), table.valid_count());
    Ok(())
}
