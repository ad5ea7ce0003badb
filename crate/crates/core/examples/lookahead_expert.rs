//! Next-iteration objective of every forced 5-of-10 combination at one
//! decision point, and where greedy and diverse choices rank among them.

use cg_lab::engine::{CgConfig, CgEngine};
use cg_lab::instances::{generate, Category, GenConfig, ProblemKind};
use cg_lab::selection::{lookahead_objectives, select_diverse, select_greedy_multi, SelectionContext};

fn main() -> cg_lab::Result<()> {
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, 8))?;
    let mut engine = CgEngine::new(&inst, CgConfig::default())?;
    engine.begin_iteration()?;
    let ctx = SelectionContext {
        pool: engine.pool(),
        k: 5,
        force_first: true,
        rmp: engine.rmp(),
        state: None,
    };
    let mut all = lookahead_objectives(&ctx)?;
    all.sort_by(|a, b| a.1.total_cmp(&b.1));
    println!("current objective {:.5}; {} combinations", engine.objective().unwrap(), all.len());
    for (combo, obj) in all.iter().take(3) {
        println!("  {combo:?} -> {obj:.5}");
    }
    for (name, sel) in [("greedy-m", select_greedy_multi(&ctx)), ("diverse-m", select_diverse(&ctx))] {
        let mut idx = sel.indices().to_vec();
        idx.sort_unstable();
        let rank = all.iter().position(|(c, _)| *c == idx).unwrap();
        println!("{name} picks {idx:?}: rank {} of {}, objective {:.5}", rank + 1, all.len(), all[rank].1);
    }
    Ok(())
}
