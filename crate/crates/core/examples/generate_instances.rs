//! Generates a small dataset of each kind and writes it to a temp directory.
//!
//! cargo run --example generate_instances -- [count]

use cg_lab::bench::Dataset;
use cg_lab::instances::{material_lower_bound, Category, Instance, ProblemKind};

fn main() -> cg_lab::Result<()> {
    let count: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let root = std::env::temp_dir().join("cg-lab-instances");
    for kind in [ProblemKind::Csp, ProblemKind::Gcp] {
        for cat in Category::ALL {
            let ds = Dataset::generate(kind, cat, count, 0)?;
            let dir = root.join(&ds.name);
            ds.save(&dir)?;
            println!("{} -> {}", ds.name, dir.display());
            for inst in ds.instances.iter().take(2) {
                match inst {
                    Instance::Csp(c) => println!(
                        "  seed {}: L={} orders={} pieces={} material bound={}",
                        c.seed,
                        c.roll_length,
                        c.num_orders(),
                        c.total_demand(),
                        material_lower_bound(c)
                    ),
                    Instance::Gcp(g) => println!(
                        "  seed {}: N={} edges={} density={:.3}",
                        g.seed,
                        g.node_count,
                        g.edges.len(),
                        g.edge_density()
                    ),
                }
            }
        }
    }
    Ok(())
}
