//! MDP surface over the column generation loop: state snapshots, the action
//! table and the per-transition reward.
//!
//! A snapshot is a bipartite graph between constraint nodes and column nodes
//! (every master column followed by the current candidates) plus a global
//! feature vector describing the instance.
//!
//! Feature scaling:
//! - duals and reduced costs are raw (unit column costs keep them O(1));
//! - right-hand sides are divided by the largest right-hand side;
//! - slack is the raw `lhs - rhs` at the current primal solution;
//! - connectivity is degree divided by the node count of the other side;
//! - in/out-of-basis counters are divided by the number of master solves so
//!   far (the 1-based iteration `t`);
//! - solution values are raw, waste is `(L - Σ ℓ_i a_i) / L` (0 for coloring).

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::column::{cosine_distance, jaccard_distance, Column};
use crate::engine::CgEngine;
use crate::instances::Instance;
use crate::{Error, Result};

pub const CONSTRAINT_FEATURES: usize = 4;
pub const COLUMN_FEATURES: usize = 9;

/// Column feature positions.
pub mod col {
    pub const REDUCED_COST: usize = 0;
    pub const CONNECTIVITY: usize = 1;
    pub const SOLUTION_VALUE: usize = 2;
    pub const WASTE: usize = 3;
    pub const LEFT_BASIS: usize = 4;
    pub const ENTERED_BASIS: usize = 5;
    pub const ITERS_IN_BASIS: usize = 6;
    pub const ITERS_OUT_OF_BASIS: usize = 7;
    pub const CANDIDATE: usize = 8;
}

/// Constraint feature positions.
pub mod row {
    pub const DUAL: usize = 0;
    pub const CONNECTIVITY: usize = 1;
    pub const RHS: usize = 2;
    pub const SLACK: usize = 3;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub obj: f64,
    pub obj0: f64,
}

/// Field order matches the wire schema; serialization is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub constraints: Vec<[f64; CONSTRAINT_FEATURES]>,
    pub columns: Vec<[f64; COLUMN_FEATURES]>,
    /// `(column node, constraint node, coefficient)`.
    pub edges: Vec<(usize, usize, f64)>,
    /// Column-node indices of the candidates, in pool order.
    pub candidates: Vec<usize>,
    /// `(cosine, jaccard)` for candidate pairs `i < j`, upper triangle
    /// row-major.
    pub cand_dist: Vec<(f64, f64)>,
    pub global: Vec<f64>,
    pub meta: StateMeta,
}

impl StateSnapshot {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Distance pair for candidates `i != j` (pool positions).
    pub fn candidate_distance(&self, i: usize, j: usize) -> (f64, f64) {
        if i == j {
            return (0.0, 0.0);
        }
        let (a, b) = (i.min(j), i.max(j));
        let n = self.candidates.len();
        // offset of row a in the strict upper triangle
        let idx = a * (2 * n - a - 1) / 2 + (b - a - 1);
        self.cand_dist[idx]
    }

    /// Zeroes the global vector (feature ablation).
    pub fn without_global(mut self) -> Self {
        self.global.iter_mut().for_each(|g| *g = 0.0);
        self
    }
}

/// Global features: `[L, Σ d_i, min ℓ_i / L, max ℓ_i / L]` for cutting
/// stock, `[N, |E| / C(N, 2)]` for coloring.
pub fn global_features(inst: &Instance) -> Vec<f64> {
    match inst {
        Instance::Csp(c) => {
            let l = f64::from(c.roll_length);
            let min = c.piece_lengths().min().unwrap_or(0);
            let max = c.piece_lengths().max().unwrap_or(0);
            vec![l, c.total_demand() as f64, f64::from(min) / l, f64::from(max) / l]
        }
        Instance::Gcp(g) => vec![g.node_count as f64, g.edge_density()],
    }
}

fn waste(inst: &Instance, col: &Column) -> f64 {
    match inst {
        Instance::Csp(c) => {
            let used: u64 = col
                .coeffs()
                .iter()
                .map(|&(r, a)| u64::from(c.orders[r].0) * u64::from(a))
                .sum();
            (f64::from(c.roll_length) - used as f64) / f64::from(c.roll_length)
        }
        Instance::Gcp(_) => 0.0,
    }
}

/// Builds the snapshot for the iteration the engine is currently at (master
/// solved, pool priced).
pub fn extract_state(engine: &CgEngine) -> StateSnapshot {
    let inst = engine.instance();
    let rmp = engine.rmp();
    let pool = engine.pool();
    let m = rmp.num_rows();
    let existing = rmp.columns();
    let n_cols = existing.len() + pool.len();
    let t = engine.iteration().max(1) as f64;
    let lp = rmp.lp();

    let (duals, primal, basic) = match rmp.solution() {
        Some(s) => (s.duals.clone(), s.primal.clone(), s.basic_columns()),
        None => (vec![0.0; m], vec![0.0; existing.len()], Default::default()),
    };
    let events = rmp.events();

    let mut edges = Vec::new();
    let mut row_degree = vec![0usize; m];
    let all_columns = existing.iter().chain(pool.columns());
    for (node, column) in all_columns.enumerate() {
        for &(r, a) in column.coeffs() {
            edges.push((node, r, f64::from(a)));
            row_degree[r] += 1;
        }
    }

    let max_rhs = lp.rhs().iter().copied().fold(0.0, f64::max);
    let rhs_scale = if max_rhs > 0.0 { max_rhs } else { 1.0 };
    let activity = lp.activities(&primal);
    let constraints = (0..m)
        .map(|i| {
            let mut f = [0.0; CONSTRAINT_FEATURES];
            f[row::DUAL] = duals[i];
            f[row::CONNECTIVITY] = if n_cols > 0 {
                row_degree[i] as f64 / n_cols as f64
            } else {
                0.0
            };
            f[row::RHS] = lp.rhs()[i] / rhs_scale;
            f[row::SLACK] = activity[i] - lp.rhs()[i];
            f
        })
        .collect();

    let mut columns = Vec::with_capacity(n_cols);
    for (j, column) in existing.iter().enumerate() {
        let mut f = [0.0; COLUMN_FEATURES];
        f[col::REDUCED_COST] = lp.reduced_cost(j, &duals);
        f[col::CONNECTIVITY] = column.nnz() as f64 / m as f64;
        f[col::SOLUTION_VALUE] = primal.get(j).copied().unwrap_or(0.0);
        f[col::WASTE] = waste(inst, column);
        f[col::LEFT_BASIS] = f64::from(u8::from(events.left.contains(&j)));
        f[col::ENTERED_BASIS] = f64::from(u8::from(events.entered.contains(&j) && basic.contains(&j)));
        f[col::ITERS_IN_BASIS] = f64::from(rmp.iterations_in_basis(j)) / t;
        f[col::ITERS_OUT_OF_BASIS] = f64::from(rmp.iterations_out_of_basis(j)) / t;
        columns.push(f);
    }
    for (column, &rc) in pool.columns().iter().zip(pool.reduced_costs()) {
        let mut f = [0.0; COLUMN_FEATURES];
        f[col::REDUCED_COST] = rc;
        f[col::CONNECTIVITY] = column.nnz() as f64 / m as f64;
        f[col::WASTE] = waste(inst, column);
        f[col::CANDIDATE] = 1.0;
        columns.push(f);
    }

    let candidates: Vec<usize> = (existing.len()..n_cols).collect();
    let cand_dist = pool
        .columns()
        .iter()
        .tuple_combinations()
        .map(|(a, b)| (cosine_distance(a, b), jaccard_distance(a, b)))
        .collect();

    let cfg = engine.config();
    StateSnapshot {
        constraints,
        columns,
        edges,
        candidates,
        cand_dist,
        global: global_features(inst),
        meta: StateMeta {
            n: cfg.pool_size,
            k: cfg.select_count,
            t: engine.iteration(),
            obj: engine.objective().unwrap_or(0.0),
            obj0: engine.initial_objective().unwrap_or(0.0),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardParams {
    pub alpha: f64,
    pub beta: f64,
    /// Discount, consumed by the trainer only.
    pub gamma: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            alpha: 300.0,
            beta: 0.02,
            gamma: 0.9,
        }
    }
}

impl RewardParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(Error::InvalidConfig("reward weights must be nonnegative".into()));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig("discount must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// `Σ_{i<j} (1 - cos(u_i, u_j))` over the selected columns.
pub fn diversity(selected: &[&Column]) -> f64 {
    selected
        .iter()
        .tuple_combinations()
        .map(|(a, b)| cosine_distance(a, b))
        .sum()
}

/// `-1 + α (obj_{t-1} - obj_t) / obj_0 + β Σ_{pairs} (1 - cos)`.
pub fn compute_reward(
    prev_obj: f64,
    new_obj: f64,
    obj0: f64,
    selected: &[&Column],
    params: &RewardParams,
) -> Result<f64> {
    if !(obj0 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "initial objective must be positive to normalize, got {obj0}"
        )));
    }
    let mut r = -1.0;
    if params.alpha != 0.0 {
        r += params.alpha * (prev_obj - new_obj) / obj0;
    }
    if params.beta != 0.0 {
        r += params.beta * diversity(selected);
    }
    Ok(r)
}

/// Every `k`-combination of `0..n` in lexicographic order, with a mask of
/// the combinations containing index 0 when forcing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTable {
    pub actions: Vec<Vec<usize>>,
    pub mask: Vec<bool>,
}

impl ActionTable {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn position(&self, action: &[usize]) -> Option<usize> {
        let mut sorted = action.to_vec();
        sorted.sort_unstable();
        self.actions.binary_search(&sorted).ok()
    }
}

pub fn action_table(n: usize, k: usize, force_optimum: bool) -> ActionTable {
    let actions: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let mask = actions
        .iter()
        .map(|a| !force_optimum || a.contains(&0))
        .collect();
    ActionTable { actions, mask }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reward_examples() {
        let p = RewardParams::default();
        let unit: Vec<Column> = (0..5).map(|i| Column::from_support([i])).collect();
        let refs: Vec<&Column> = unit.iter().collect();
        let r = compute_reward(1.1, 1.0, 1.0, &refs, &p).unwrap();
        assert_abs_diff_eq!(r, 29.2, epsilon = 1e-9);

        let same = Column::from_dense(&[1, 2]);
        let r = compute_reward(2.0, 2.0, 2.0, &[&same, &same], &p).unwrap();
        assert_eq!(r, -1.0);

        let a = Column::from_dense(&[1, 0]);
        let b = Column::from_dense(&[1, 1]);
        let r = compute_reward(1.0, 1.0, 1.0, &[&a, &b], &p).unwrap();
        assert_abs_diff_eq!(r, -1.0 + 0.02 * (1.0 - 1.0 / 2f64.sqrt()), epsilon = 1e-15);

        assert!(compute_reward(1.0, 1.0, 0.0, &[], &p).is_err());
    }

    #[test]
    fn action_table_sizes() {
        let t = action_table(10, 5, false);
        assert_eq!(t.len(), 252);
        assert_eq!(t.valid_count(), 252);
        let t = action_table(10, 5, true);
        assert_eq!(t.valid_count(), 126);
        assert!(t.actions.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(t.position(&[4, 0, 1, 2, 3]), Some(0));
        assert_eq!(action_table(3, 3, true).len(), 1);
    }

    #[test]
    fn triangle_index() {
        let snap = StateSnapshot {
            constraints: vec![],
            columns: vec![],
            edges: vec![],
            candidates: vec![0, 1, 2, 3],
            cand_dist: (0..6).map(|i| (i as f64, 0.0)).collect(),
            global: vec![],
            meta: StateMeta {
                n: 4,
                k: 2,
                t: 1,
                obj: 1.0,
                obj0: 1.0,
            },
        };
        assert_eq!(snap.candidate_distance(0, 1).0, 0.0);
        assert_eq!(snap.candidate_distance(0, 3).0, 2.0);
        assert_eq!(snap.candidate_distance(2, 1).0, 3.0);
        assert_eq!(snap.candidate_distance(2, 3).0, 5.0);
    }
}
