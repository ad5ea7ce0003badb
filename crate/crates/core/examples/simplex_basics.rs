//! The dense simplex on a two-row covering LP, then a warm-started re-solve
//! after a column is appended.

use cg_lab::simplex::{basis_events, solve, DenseLp};

fn main() -> cg_lab::Result<()> {
    // min x0 + x1  s.t.  3 x0 >= 2,  2 x1 >= 1
    let mut lp = DenseLp::covering(vec![2.0, 1.0])?;
    lp.add_column(1.0, [(0, 3.0)])?;
    lp.add_column(1.0, [(1, 2.0)])?;
    let first = solve(&lp, None)?;
    println!("status   {:?}", first.status);
    println!("objective {:.6}", first.objective);
    println!("primal   {:?}", first.primal);
    println!("duals    {:?}", first.duals);

    let rc = |a: f64, b: f64| 1.0 - a * first.duals[0] - b * first.duals[1];
    println!("rc of (1,1): {:+.6}", rc(1.0, 1.0));
    println!("rc of (2,1): {:+.6}", rc(2.0, 1.0));
    lp.add_column(1.0, [(0, 2.0), (1, 1.0)])?;
    let second = solve(&lp, Some(&first.basis))?;
    let ev = basis_events(&first, &second);
    println!("after adding (2,1): objective {:.6} in {} pivots", second.objective, second.pivots);
    println!("entered {:?}, left {:?}", ev.entered, ev.left);
    Ok(())
}
