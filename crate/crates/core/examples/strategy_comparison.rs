//! Mean iterations of every built-in strategy on a batch of easy instances.
//!
//! cargo run --release --example strategy_comparison -- [instances] [csp|gcp]

use cg_lab::engine::{cg_solve, CgConfig};
use cg_lab::instances::{generate, Category, GenConfig, ProblemKind};
use cg_lab::selection::Strategy;
use rayon::prelude::*;

fn main() -> cg_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(40);
    let kind: ProblemKind = args.next().as_deref().unwrap_or("csp").parse()?;
    let instances = (0..count)
        .map(|s| generate(&GenConfig::category(kind, Category::Easy, s)))
        .collect::<cg_lab::Result<Vec<_>>>()?;
    println!("{count} easy {kind} instances");
    for s in Strategy::ALL {
        let iters = instances
            .par_iter()
            .map(|inst| cg_solve(inst, &s, &CgConfig::default(), inst.seed()).map(|r| r.iterations))
            .collect::<cg_lab::Result<Vec<_>>>()?;
        let mean = iters.iter().sum::<usize>() as f64 / iters.len() as f64;
        println!("  {:<12} mean iterations {mean:>7.2}", s.as_str());
    }
    Ok(())
}
