//! Brute-force oracles for small instances: every feasible column, the full
//! master LP over all of them, and the independence number.
//!
//! Nothing here uses the pricing search; enumeration is plain recursion over
//! counts (patterns) or subsets (independent sets).

use crate::column::Column;
use crate::engine::master_lp;
use crate::instances::{CspInstance, GcpInstance, Instance};
use crate::pricing::reduced_cost;
use crate::simplex::{self, LpStatus};
use crate::{Error, Result};

/// Default cap on enumerated columns.
pub const ENUMERATION_LIMIT: usize = 20_000;

/// Every nonzero pattern with `Σ ℓ_i a_i ≤ L`, in dense-lexicographic order.
pub fn enumerate_patterns(inst: &CspInstance, limit: usize) -> Result<Vec<Column>> {
    fn rec(
        i: usize,
        room: u32,
        lengths: &[u32],
        cur: &mut Vec<u32>,
        out: &mut Vec<Column>,
        limit: usize,
    ) -> Result<()> {
        if i == lengths.len() {
            if cur.iter().any(|&c| c > 0) {
                if out.len() == limit {
                    return Err(Error::EnumerationLimit { limit });
                }
                out.push(Column::from_dense(cur));
            }
            return Ok(());
        }
        for c in 0..=room / lengths[i] {
            cur[i] = c;
            rec(i + 1, room - c * lengths[i], lengths, cur, out, limit)?;
        }
        cur[i] = 0;
        Ok(())
    }
    let lengths: Vec<u32> = inst.piece_lengths().collect();
    let mut out = Vec::new();
    rec(0, inst.roll_length, &lengths, &mut vec![0; lengths.len()], &mut out, limit)?;
    Ok(out)
}

fn independent_subsets(inst: &GcpInstance) -> Vec<Vec<usize>> {
    let adj = inst.adjacency();
    let mut out = Vec::new();
    fn rec(v: usize, adj: &[Vec<bool>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == adj.len() {
            out.push(cur.clone());
            return;
        }
        rec(v + 1, adj, cur, out);
        if cur.iter().all(|&u| !adj[u][v]) {
            cur.push(v);
            rec(v + 1, adj, cur, out);
            cur.pop();
        }
    }
    rec(0, &adj, &mut Vec::new(), &mut out);
    out
}

/// Every independent set, including the empty one.
pub fn enumerate_independent_sets(inst: &GcpInstance, limit: usize) -> Result<Vec<Vec<usize>>> {
    let all = independent_subsets(inst);
    if all.len() > limit {
        return Err(Error::EnumerationLimit { limit });
    }
    Ok(all)
}

/// Every maximal independent set.
pub fn enumerate_maximal_independent_sets(inst: &GcpInstance, limit: usize) -> Result<Vec<Column>> {
    let adj = inst.adjacency();
    let n = inst.node_count;
    let mut out = Vec::new();
    for set in enumerate_independent_sets(inst, usize::MAX)? {
        let maximal = (0..n).all(|v| set.contains(&v) || set.iter().any(|&u| adj[u][v]));
        if maximal {
            if out.len() == limit {
                return Err(Error::EnumerationLimit { limit });
            }
            out.push(Column::from_support(set));
        }
    }
    Ok(out)
}

/// All feasible master columns of an instance.
pub fn enumerate_columns(inst: &Instance, limit: usize) -> Result<Vec<Column>> {
    match inst {
        Instance::Csp(c) => enumerate_patterns(c, limit),
        Instance::Gcp(g) => {
            if g.node_count > 24 {
                return Err(Error::EnumerationLimit { limit });
            }
            enumerate_maximal_independent_sets(g, limit)
        }
    }
}

/// Optimum of the complete master LP over every feasible column.
pub fn solve_full_enumeration(inst: &Instance) -> Result<f64> {
    let columns = enumerate_columns(inst, ENUMERATION_LIMIT)?;
    let mut lp = master_lp(inst)?;
    for col in &columns {
        lp.add_column(1.0, col.coeffs().iter().map(|&(r, v)| (r, f64::from(v))))?;
    }
    let sol = simplex::solve(&lp, None)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("full master LP ended with {:?}", sol.status)));
    }
    Ok(sol.objective)
}

/// The `k` smallest reduced costs over all feasible columns, ascending.
pub fn k_best_reduced_costs(inst: &Instance, duals: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut rcs: Vec<f64> = enumerate_columns(inst, ENUMERATION_LIMIT)?
        .iter()
        .map(|c| reduced_cost(c, duals))
        .collect();
    rcs.sort_by(f64::total_cmp);
    rcs.truncate(k);
    Ok(rcs)
}

/// Size of a largest independent set.
pub fn independence_number(inst: &GcpInstance) -> usize {
    independent_subsets(inst).iter().map(Vec::len).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_csp_full_lp() {
        let inst = Instance::Csp(CspInstance::new(10, vec![(3, 2), (5, 1)]).unwrap());
        assert_eq!(enumerate_columns(&inst, 100).unwrap().len(), 6);
        let obj = solve_full_enumeration(&inst).unwrap();
        assert!((obj - 7.0 / 6.0).abs() < 1e-9, "{obj}");
    }

    #[test]
    fn triangle_and_edgeless() {
        let tri = Instance::Gcp(GcpInstance::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        assert!((solve_full_enumeration(&tri).unwrap() - 3.0).abs() < 1e-9);
        let empty = Instance::Gcp(GcpInstance::new(3, vec![]).unwrap());
        assert!((solve_full_enumeration(&empty).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn five_cycle_fractional_chromatic() {
        let c5 = GcpInstance::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(independence_number(&c5), 2);
        let obj = solve_full_enumeration(&Instance::Gcp(c5)).unwrap();
        assert!((obj - 2.5).abs() < 1e-9, "{obj}");
    }

    #[test]
    fn guard_trips() {
        let inst = Instance::Csp(CspInstance::new(100, vec![(1, 1), (2, 1), (3, 1)]).unwrap());
        assert!(matches!(
            enumerate_columns(&inst, 50),
            Err(Error::EnumerationLimit { limit: 50 })
        ));
    }
}
