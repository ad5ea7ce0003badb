//! Drives column generation with a policy in another process. The policy
//! here is a shell one-liner that always answers with the first k indices.
//!
//! cargo run --example external_policy -- [policy command]

use cg_lab::engine::{cg_solve, cg_solve_with, CgConfig};
use cg_lab::instances::{generate, Category, GenConfig, ProblemKind};
use cg_lab::selection::{spawn_policy, Strategy};

const FIRST_K: &str = r#"python3 -c '
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    n = len(req["state"]["candidates"])
    print(json.dumps({"action": list(range(min(req["k"], n)))}), flush=True)
'"#;

fn main() -> cg_lab::Result<()> {
    let cmd = std::env::args().nth(1).unwrap_or_else(|| FIRST_K.to_string());
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, 2))?;
    let (mut child, mut policy) = spawn_policy(&cmd)?;
    let run = cg_solve_with(&inst, &mut policy, &CgConfig::default(), 0)?;
    drop(policy);
    let _ = child.wait();
    let greedy = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0)?;
    println!(
        "external: {} iterations, objective {:.5}; greedy-m: {} iterations",
        run.iterations, run.final_objective, greedy.iterations
    );
    Ok(())
}
