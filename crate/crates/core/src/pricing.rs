//! Pricing: the `k` best columns for the current duals.
//!
//! For cutting stock this is a bounded integer knapsack (`a_i ≤ ⌊L/ℓ_i⌋`),
//! for graph coloring a maximum weight independent set problem restricted to
//! maximal independent sets. Both are solved exactly by depth-first branch and
//! bound that keeps the `k` best solutions seen so far and prunes subtrees
//! whose bound falls below the current `k`-th value.
//!
//! Solutions are ranked by dual value `Σ u_i a_i` (descending, i.e. reduced
//! cost ascending); equal values are ordered by coefficient vector,
//! lexicographically ascending.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::column::Column;
use crate::instances::{CspInstance, GcpInstance, Instance};
use crate::{Error, Result};

/// Slack on bound pruning so float noise in the bound never cuts a tie.
const BOUND_SLACK: f64 = 1e-9;

/// Largest graph the bitset pricer supports.
pub const MAX_GCP_NODES: usize = 128;

/// `1 - Σ_i u_i a_i` (every column has unit cost).
pub fn reduced_cost(col: &Column, duals: &[f64]) -> f64 {
    1.0 - col.dot(duals)
}

/// Up to `pool_size` distinct columns, best reduced cost first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidatePool {
    columns: Vec<Column>,
    reduced_costs: Vec<f64>,
}

impl CandidatePool {
    /// Builds a pool from unsorted entries: sorts by reduced cost (ties by
    /// column order), drops duplicates keeping the best entry, truncates.
    pub fn from_entries(mut entries: Vec<(Column, f64)>, pool_size: usize) -> Self {
        entries.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.0, &b.0)));
        let mut pool = CandidatePool::default();
        for (col, rc) in entries {
            if pool.columns.len() == pool_size {
                break;
            }
            if !pool.columns.contains(&col) {
                pool.columns.push(col);
                pool.reduced_costs.push(rc);
            }
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn reduced_costs(&self) -> &[f64] {
        &self.reduced_costs
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    pub fn best_reduced_cost(&self) -> Option<f64> {
        self.reduced_costs.first().copied()
    }
}

/// Lexicographic order of dense coefficient vectors, computed on the sparse
/// form: at the first row where they differ, the smaller value wins.
pub fn lex_cmp(a: &Column, b: &Column) -> Ordering {
    let (ca, cb) = (a.coeffs(), b.coeffs());
    let (mut i, mut j) = (0, 0);
    loop {
        match (ca.get(i), cb.get(j)) {
            (None, None) => return Ordering::Equal,
            // `a` is zero from here on while `b` still has a positive entry.
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(&(ra, va)), Some(&(rb, vb))) => match ra.cmp(&rb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match va.cmp(&vb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    other => return other,
                },
            },
        }
    }
}

/// Fixed-capacity list of the best `(value, column)` pairs found so far.
struct TopK {
    cap: usize,
    items: Vec<(f64, Column)>,
}

impl TopK {
    fn new(cap: usize) -> Self {
        TopK {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    fn better(a: &(f64, Column), b: &(f64, Column)) -> bool {
        match b.0.total_cmp(&a.0) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => lex_cmp(&a.1, &b.1) == Ordering::Less,
        }
    }

    /// Value a subtree must reach (allowing ties) to matter.
    fn threshold(&self) -> Option<f64> {
        if self.items.len() < self.cap {
            None
        } else {
            self.items.last().map(|x| x.0)
        }
    }

    fn prunes(&self, bound: f64) -> bool {
        matches!(self.threshold(), Some(t) if bound < t - BOUND_SLACK)
    }

    fn offer(&mut self, value: f64, col: Column) {
        let entry = (value, col);
        if self.items.len() == self.cap {
            match self.items.last() {
                Some(last) if Self::better(&entry, last) => {}
                _ => return,
            }
        }
        let pos = self.items.partition_point(|x| Self::better(x, &entry));
        self.items.insert(pos, entry);
        self.items.truncate(self.cap);
    }

    fn into_pool(self, duals: &[f64]) -> CandidatePool {
        let entries = self
            .items
            .into_iter()
            .map(|(_, col)| {
                let rc = reduced_cost(&col, duals);
                (col, rc)
            })
            .collect();
        CandidatePool::from_entries(entries, self.cap)
    }
}

/// Cutting stock pricing: the `pool_size` best nonzero patterns.
pub fn solve_csp_pp(inst: &CspInstance, duals: &[f64], pool_size: usize) -> CandidatePool {
    assert_eq!(duals.len(), inst.num_orders(), "one dual per order");
    if pool_size == 0 {
        return CandidatePool::default();
    }
    let cap = inst.roll_length;
    let lengths: Vec<u32> = inst.piece_lengths().collect();
    let bounds: Vec<u32> = lengths.iter().map(|&l| cap / l).collect();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = duals[a] / f64::from(lengths[a]);
        let rb = duals[b] / f64::from(lengths[b]);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut search = KnapsackSearch {
        lengths: &lengths,
        bounds: &bounds,
        duals,
        order: &order,
        counts: vec![0; lengths.len()],
        top: TopK::new(pool_size),
    };
    search.descend(0, cap, 0.0);
    search.top.into_pool(duals)
}

struct KnapsackSearch<'a> {
    lengths: &'a [u32],
    bounds: &'a [u32],
    duals: &'a [f64],
    order: &'a [usize],
    counts: Vec<u32>,
    top: TopK,
}

impl KnapsackSearch<'_> {
    /// Fractional relaxation of the remaining items.
    fn upper_bound(&self, depth: usize, mut room: u32) -> f64 {
        let mut extra = 0.0;
        for &i in &self.order[depth..] {
            let u = self.duals[i];
            if u <= 0.0 || room == 0 {
                break;
            }
            let fit = (room / self.lengths[i]).min(self.bounds[i]);
            extra += f64::from(fit) * u;
            room -= fit * self.lengths[i];
            if fit < self.bounds[i] && room > 0 {
                extra += u * f64::from(room) / f64::from(self.lengths[i]);
                break;
            }
        }
        extra
    }

    fn descend(&mut self, depth: usize, room: u32, partial: f64) {
        if depth == self.order.len() {
            if self.counts.iter().all(|&c| c == 0) {
                return;
            }
            let col = Column::from_dense(&self.counts);
            let value = col.dot(self.duals);
            self.top.offer(value, col);
            return;
        }
        if self.top.prunes(partial + self.upper_bound(depth, room)) {
            return;
        }
        let i = self.order[depth];
        let max = (room / self.lengths[i]).min(self.bounds[i]);
        for c in (0..=max).rev() {
            self.counts[i] = c;
            let value = partial + f64::from(c) * self.duals[i];
            self.descend(depth + 1, room - c * self.lengths[i], value);
        }
        self.counts[i] = 0;
    }
}

/// Adjacency as bitsets, one `u128` per node.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<u128>,
}

impl Graph {
    pub fn new(inst: &GcpInstance) -> Result<Self> {
        let n = inst.node_count;
        if n > MAX_GCP_NODES {
            return Err(Error::InvalidInstance(format!(
                "graph pricing supports at most {MAX_GCP_NODES} nodes, got {n}"
            )));
        }
        let mut adj = vec![0u128; n];
        for &(u, v) in &inst.edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Graph { n, adj })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    fn all(&self) -> u128 {
        if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        }
    }

    pub fn is_independent(&self, nodes: &[usize]) -> bool {
        let set = to_bits(nodes);
        nodes.iter().all(|&v| self.adj[v] & set == 0)
    }

    pub fn is_maximal_independent(&self, nodes: &[usize]) -> bool {
        let set = to_bits(nodes);
        self.is_independent(nodes) && (0..self.n).all(|v| set >> v & 1 == 1 || self.adj[v] & set != 0)
    }

    /// Adds nodes in ascending index order while the set stays independent.
    pub fn extend_to_maximal(&self, nodes: &[usize]) -> Vec<usize> {
        let mut set = to_bits(nodes);
        for v in 0..self.n {
            if set >> v & 1 == 0 && self.adj[v] & set == 0 {
                set |= 1 << v;
            }
        }
        from_bits(set)
    }
}

fn to_bits(nodes: &[usize]) -> u128 {
    nodes.iter().fold(0u128, |acc, &v| acc | 1 << v)
}

fn from_bits(mut set: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(set.count_ones() as usize);
    while set != 0 {
        let v = set.trailing_zeros() as usize;
        out.push(v);
        set &= set - 1;
    }
    out
}

/// Graph coloring pricing: the `pool_size` best maximal independent sets for
/// node weights `duals`.
pub fn solve_gcp_pp(inst: &GcpInstance, duals: &[f64], pool_size: usize) -> CandidatePool {
    let graph = Graph::new(inst).expect("graph too large for bitset pricing");
    solve_gcp_pp_graph(&graph, duals, pool_size)
}

pub fn solve_gcp_pp_graph(graph: &Graph, duals: &[f64], pool_size: usize) -> CandidatePool {
    assert_eq!(duals.len(), graph.n, "one dual per node");
    if pool_size == 0 {
        return CandidatePool::default();
    }
    let mut order: Vec<usize> = (0..graph.n).collect();
    order.sort_by(|&a, &b| duals[b].total_cmp(&duals[a]).then(a.cmp(&b)));
    let mut search = MisSearch {
        graph,
        duals,
        order: &order,
        top: TopK::new(pool_size),
    };
    search.descend(0, 0, graph.all(), 0, 0.0);
    let mut pool = search.top.into_pool(duals);
    // B&B output is already maximal; the extension pass keeps the column
    // contract explicit and re-sorts if it ever changes anything.
    let extended: Vec<(Column, f64)> = pool
        .columns
        .iter()
        .map(|c| {
            let nodes: Vec<usize> = c.support().collect();
            let col = Column::from_support(graph.extend_to_maximal(&nodes));
            let rc = reduced_cost(&col, duals);
            (col, rc)
        })
        .collect();
    if extended.iter().map(|e| &e.0).ne(pool.columns.iter()) {
        pool = CandidatePool::from_entries(extended, pool_size);
    }
    pool
}

struct MisSearch<'a> {
    graph: &'a Graph,
    duals: &'a [f64],
    order: &'a [usize],
    top: TopK,
}

impl MisSearch<'_> {
    /// `chosen`: the set so far; `cand`: undecided nodes not adjacent to it;
    /// `excluded`: nodes branched out, which must end up adjacent to `chosen`.
    fn descend(&mut self, depth: usize, chosen: u128, cand: u128, excluded: u128, value: f64) {
        // Every excluded node not yet dominated needs a candidate neighbour.
        let mut open = excluded & !self.dominated(chosen);
        while open != 0 {
            let x = open.trailing_zeros() as usize;
            if self.graph.adj[x] & cand == 0 {
                return;
            }
            open &= open - 1;
        }
        if cand == 0 {
            let col = Column::from_support(from_bits(chosen));
            let value = col.dot(self.duals);
            self.top.offer(value, col);
            return;
        }
        let bound = value
            + from_bits(cand)
                .into_iter()
                .map(|v| self.duals[v].max(0.0))
                .sum::<f64>();
        if self.top.prunes(bound) {
            return;
        }
        let mut d = depth;
        while cand >> self.order[d] & 1 == 0 {
            d += 1;
        }
        let v = self.order[d];
        let bit = 1u128 << v;
        self.descend(
            d + 1,
            chosen | bit,
            cand & !bit & !self.graph.adj[v],
            excluded,
            value + self.duals[v],
        );
        self.descend(d + 1, chosen, cand & !bit, excluded | bit, value);
    }

    fn dominated(&self, chosen: u128) -> u128 {
        let mut dom = 0u128;
        let mut set = chosen;
        while set != 0 {
            let v = set.trailing_zeros() as usize;
            dom |= self.graph.adj[v];
            set &= set - 1;
        }
        dom
    }
}

/// Instance-level pricing entry point with precomputed graph data.
#[derive(Debug, Clone)]
pub enum Pricer {
    Csp(CspInstance),
    Gcp(Graph),
}

impl Pricer {
    pub fn new(inst: &Instance) -> Result<Self> {
        Ok(match inst {
            Instance::Csp(c) => Pricer::Csp(c.clone()),
            Instance::Gcp(g) => Pricer::Gcp(Graph::new(g)?),
        })
    }

    pub fn price(&self, duals: &[f64], pool_size: usize) -> CandidatePool {
        match self {
            Pricer::Csp(c) => solve_csp_pp(c, duals, pool_size),
            Pricer::Gcp(g) => solve_gcp_pp_graph(g, duals, pool_size),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn csp_small() -> CspInstance {
        CspInstance::new(10, vec![(3, 2), (5, 1)]).unwrap()
    }

    #[test]
    fn reduced_cost_examples() {
        let col = Column::from_dense(&[0, 2]);
        assert_abs_diff_eq!(reduced_cost(&col, &[0.4, 0.7]), -0.4, epsilon = 1e-12);
        assert_eq!(reduced_cost(&col, &[0.0, 0.0]), 1.0);
        let is = Column::from_support([0, 2]);
        assert_abs_diff_eq!(reduced_cost(&is, &[0.5, 0.6, 0.7]), -0.2, epsilon = 1e-12);
    }

    #[test]
    fn csp_three_best() {
        let pool = solve_csp_pp(&csp_small(), &[0.4, 0.7], 3);
        let got: Vec<Vec<u32>> = pool.columns().iter().map(|c| c.to_dense(2)).collect();
        assert_eq!(got, vec![vec![0, 2], vec![3, 0], vec![1, 1]]);
        let rc = pool.reduced_costs();
        assert_abs_diff_eq!(rc[0], -0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(rc[1], -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(rc[2], -0.1, epsilon = 1e-12);
    }

    #[test]
    fn csp_termination_signal() {
        let pool = solve_csp_pp(&csp_small(), &[1.0 / 3.0, 0.5], 10);
        assert_abs_diff_eq!(pool.best_reduced_cost().unwrap(), 0.0, epsilon = 1e-12);
        // 6 nonzero feasible patterns in total.
        assert_eq!(pool.len(), 6);
    }

    #[test]
    fn csp_zero_duals() {
        let pool = solve_csp_pp(&csp_small(), &[0.0, 0.0], 2);
        assert_eq!(pool.best_reduced_cost(), Some(1.0));
        assert!(pool.columns().iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn gcp_path_and_triangle() {
        let path = GcpInstance::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let pool = solve_gcp_pp(&path, &[0.5, 0.6, 0.7], 10);
        assert_eq!(pool.column(0), &Column::from_support([0, 2]));
        assert_abs_diff_eq!(pool.reduced_costs()[0], -0.2, epsilon = 1e-12);
        // maximal independent sets of the path: {0,2} and {1}
        assert_eq!(pool.len(), 2);

        let tri = GcpInstance::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let pool = solve_gcp_pp(&tri, &[0.5, 0.6, 0.7], 10);
        assert_eq!(pool.column(0), &Column::from_support([2]));
        assert_abs_diff_eq!(pool.reduced_costs()[0], 0.3, epsilon = 1e-12);
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn gcp_edgeless() {
        let g = GcpInstance::new(3, vec![]).unwrap();
        let pool = solve_gcp_pp(&g, &[0.2, 0.0, 0.9], 10);
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.column(0), &Column::from_support([0, 1, 2]));
    }

    #[test]
    fn lex_order_is_dense_lex() {
        let a = Column::from_dense(&[0, 2]);
        let b = Column::from_dense(&[3, 0]);
        let c = Column::from_dense(&[1, 1]);
        assert_eq!(lex_cmp(&a, &b), Ordering::Less);
        assert_eq!(lex_cmp(&c, &b), Ordering::Less);
        assert_eq!(lex_cmp(&a, &c), Ordering::Less);
        assert_eq!(lex_cmp(&a, &a), Ordering::Equal);
        assert_eq!(
            lex_cmp(&Column::from_dense(&[1, 0, 0]), &Column::from_dense(&[1, 0, 1])),
            Ordering::Less
        );
    }

    #[test]
    fn extension_in_index_order() {
        let g = Graph::new(&GcpInstance::new(4, vec![(0, 1), (2, 3)]).unwrap()).unwrap();
        assert_eq!(g.extend_to_maximal(&[]), vec![0, 2]);
        assert_eq!(g.extend_to_maximal(&[3]), vec![0, 3]);
        assert!(g.is_maximal_independent(&[1, 3]));
        assert!(!g.is_maximal_independent(&[1]));
    }
}
