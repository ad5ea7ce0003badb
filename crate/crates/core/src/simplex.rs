//! Dense revised primal simplex for the restricted master LP.
//!
//! Problems have the form `min cᵀx` subject to `a_iᵀx ≥ b_i` or `a_iᵀx = b_i`
//! and `x ≥ 0`. `≥` rows get a surplus variable; rows whose slack cannot start
//! basic get an artificial variable and go through a phase-1 solve. The basis
//! inverse is kept explicitly (desk-scale row counts) and refactored every
//! [`REFACTOR_INTERVAL`] pivots.
//!
//! Entering variables follow Dantzig's rule until `5 (m + n)` degenerate
//! pivots have been made in one solve, after which Bland's rule takes over.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Primal/dual feasibility tolerance.
pub const TOL_FEAS: f64 = 1e-9;
const TOL_PIVOT: f64 = 1e-9;
const TOL_RATIO_TIE: f64 = 1e-12;
pub const REFACTOR_INTERVAL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowSense {
    Ge,
    Eq,
}

/// An LP with nonnegative variables, stored column-major.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenseLp {
    costs: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    senses: Vec<RowSense>,
}

impl DenseLp {
    pub fn new(rhs: Vec<f64>, senses: Vec<RowSense>) -> Result<Self> {
        if rhs.len() != senses.len() {
            return Err(Error::InvalidLp(format!(
                "{} right-hand sides for {} rows",
                rhs.len(),
                senses.len()
            )));
        }
        if let Some(i) = rhs.iter().position(|b| !b.is_finite()) {
            return Err(Error::InvalidLp(format!("row {i}: right-hand side is not finite")));
        }
        Ok(DenseLp {
            costs: Vec::new(),
            columns: Vec::new(),
            rhs,
            senses,
        })
    }

    /// All rows `≥`.
    pub fn covering(rhs: Vec<f64>) -> Result<Self> {
        let senses = vec![RowSense::Ge; rhs.len()];
        Self::new(rhs, senses)
    }

    /// Appends a column and returns its index. Entries must reference existing
    /// rows; zero entries are dropped and at least one nonzero must remain.
    pub fn add_column(&mut self, cost: f64, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<usize> {
        let mut col: Vec<(usize, f64)> = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        col.sort_by_key(|&(r, _)| r);
        if col.is_empty() {
            return Err(Error::InvalidLp("column has no nonzero entry".into()));
        }
        if let Some(&(r, _)) = col.iter().find(|&&(r, _)| r >= self.rhs.len()) {
            return Err(Error::InvalidLp(format!("column references row {r} of {}", self.rhs.len())));
        }
        if col.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidLp("column has a repeated row".into()));
        }
        if !cost.is_finite() || col.iter().any(|&(_, v)| !v.is_finite()) {
            return Err(Error::InvalidLp("non-finite coefficient".into()));
        }
        self.costs.push(cost);
        self.columns.push(col);
        Ok(self.columns.len() - 1)
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn cost(&self, j: usize) -> f64 {
        self.costs[j]
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn senses(&self) -> &[RowSense] {
        &self.senses
    }

    /// `c_j - yᵀa_j`.
    pub fn reduced_cost(&self, j: usize, duals: &[f64]) -> f64 {
        self.costs[j] - self.columns[j].iter().map(|&(r, v)| v * duals[r]).sum::<f64>()
    }

    /// Row activities `Ax`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        let mut lhs = vec![0.0; self.num_rows()];
        for (col, &xj) in self.columns.iter().zip(x) {
            if xj != 0.0 {
                for &(r, v) in col {
                    lhs[r] += v * xj;
                }
            }
        }
        lhs
    }
}

/// A basic variable, identified independently of internal numbering so that a
/// basis survives column appends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasicVar {
    Column(usize),
    Surplus(usize),
    Artificial(usize),
}

/// One basic variable per row position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub vars: Vec<BasicVar>,
}

impl Basis {
    pub fn columns(&self) -> BTreeSet<usize> {
        self.vars
            .iter()
            .filter_map(|v| match v {
                BasicVar::Column(j) => Some(*j),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per structural column.
    pub primal: Vec<f64>,
    /// One value per row; nonnegative on `≥` rows at optimality.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub pivots: usize,
}

impl LpSolution {
    pub fn basic_columns(&self) -> BTreeSet<usize> {
        self.basis.columns()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEvents {
    pub entered: BTreeSet<usize>,
    pub left: BTreeSet<usize>,
}

/// Structural columns that entered or left the basis between two solves.
/// Columns absent from `prev` count as nonbasic there.
pub fn basis_events(prev: &LpSolution, cur: &LpSolution) -> BasisEvents {
    let before = prev.basic_columns();
    let after = cur.basic_columns();
    BasisEvents {
        entered: after.difference(&before).copied().collect(),
        left: before.difference(&after).copied().collect(),
    }
}

/// Solves `lp`, warm-starting from `warm` when it is a valid primal-feasible
/// basis of this LP (otherwise the solve starts cold).
pub fn solve(lp: &DenseLp, warm: Option<&Basis>) -> Result<LpSolution> {
    let mut solver = Solver::new(lp);
    let warm_ok = match warm {
        Some(basis) => solver.try_warm_start(basis)?,
        None => false,
    };
    if !warm_ok {
        solver.cold_start()?;
        if solver.has_basic_artificial() {
            match solver.run(Phase::One)? {
                Outcome::Optimal => {}
                Outcome::IterationLimit => return Ok(solver.finish(LpStatus::IterationLimit)),
                Outcome::Unbounded => {
                    return Err(Error::Solver("phase 1 reported unbounded".into()));
                }
            }
            if solver.artificial_infeasibility() > TOL_FEAS * (1.0 + solver.rhs_norm()) {
                return Ok(solver.finish(LpStatus::Infeasible));
            }
            solver.drive_out_artificials()?;
        }
    }
    let status = match solver.run(Phase::Two)? {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    Ok(solver.finish(status))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Internal variable numbering: `0..n` structural, `n..n+m` surplus of row
/// `i`, `n+m..n+2m` artificial of row `i`.
struct Solver<'a> {
    lp: &'a DenseLp,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    art_sign: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
    degenerate: usize,
    bland: bool,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a DenseLp) -> Self {
        let m = lp.num_rows();
        let n = lp.num_cols();
        let art_sign = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        Solver {
            lp,
            m,
            n,
            basis: Vec::with_capacity(m),
            is_basic: vec![false; n + 2 * m],
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            art_sign,
            pivots: 0,
            since_refactor: 0,
            degenerate: 0,
            bland: false,
        }
    }

    fn surplus(&self, i: usize) -> usize {
        self.n + i
    }

    fn artificial(&self, i: usize) -> usize {
        self.n + self.m + i
    }

    fn is_artificial(&self, v: usize) -> bool {
        v >= self.n + self.m
    }

    fn exists(&self, v: usize) -> bool {
        if v < self.n || self.is_artificial(v) {
            true
        } else {
            self.lp.senses[v - self.n] == RowSense::Ge
        }
    }

    fn for_each_entry(&self, v: usize, mut f: impl FnMut(usize, f64)) {
        if v < self.n {
            for &(r, a) in &self.lp.columns[v] {
                f(r, a);
            }
        } else if v < self.n + self.m {
            f(v - self.n, -1.0);
        } else {
            let i = v - self.n - self.m;
            f(i, self.art_sign[i]);
        }
    }

    fn cost(&self, v: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.is_artificial(v) {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if v < self.n {
                    self.lp.costs[v]
                } else {
                    0.0
                }
            }
        }
    }

    fn rhs_norm(&self) -> f64 {
        self.lp.rhs.iter().map(|b| b.abs()).sum()
    }

    fn set_basis(&mut self, basis: Vec<usize>) {
        self.is_basic.iter_mut().for_each(|b| *b = false);
        for &v in &basis {
            self.is_basic[v] = true;
        }
        self.basis = basis;
    }

    fn cold_start(&mut self) -> Result<()> {
        let basis: Vec<usize> = (0..self.m)
            .map(|i| {
                if self.lp.senses[i] == RowSense::Ge && self.lp.rhs[i] <= 0.0 {
                    self.surplus(i)
                } else {
                    self.artificial(i)
                }
            })
            .collect();
        self.set_basis(basis);
        if !self.refactor()? {
            return Err(Error::Solver("slack basis is singular".into()));
        }
        Ok(())
    }

    fn try_warm_start(&mut self, warm: &Basis) -> Result<bool> {
        if warm.vars.len() != self.m {
            return Err(Error::InvalidLp(format!(
                "warm basis has {} entries for {} rows",
                warm.vars.len(),
                self.m
            )));
        }
        let mut basis = Vec::with_capacity(self.m);
        for &bv in &warm.vars {
            let v = match bv {
                BasicVar::Column(j) if j < self.n => j,
                BasicVar::Surplus(i) if i < self.m => self.surplus(i),
                BasicVar::Artificial(i) if i < self.m => self.artificial(i),
                other => {
                    return Err(Error::InvalidLp(format!("warm basis entry {other:?} out of range")))
                }
            };
            if !self.exists(v) {
                return Err(Error::InvalidLp(format!("warm basis entry {bv:?} does not exist")));
            }
            basis.push(v);
        }
        let mut sorted = basis.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLp("warm basis repeats a variable".into()));
        }
        self.set_basis(basis);
        if !self.refactor()? {
            return Ok(false);
        }
        let feasible = self.basis.iter().zip(&self.xb).all(|(&v, &x)| {
            if self.is_artificial(v) {
                x.abs() <= TOL_FEAS
            } else {
                x >= -TOL_FEAS
            }
        });
        Ok(feasible)
    }

    fn has_basic_artificial(&self) -> bool {
        self.basis.iter().any(|&v| self.is_artificial(v))
    }

    fn artificial_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&v, _)| self.is_artificial(v))
            .map(|(_, &x)| x.max(0.0))
            .sum()
    }

    /// Recomputes `B⁻¹` by Gauss-Jordan elimination with partial pivoting and
    /// refreshes `x_B`. Returns `false` if the basis matrix is singular.
    fn refactor(&mut self) -> Result<bool> {
        let m = self.m;
        let mut mat = vec![0.0; m * m];
        for (pos, &v) in self.basis.iter().enumerate() {
            self.for_each_entry(v, |r, a| mat[r * m + pos] = a);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let (piv_row, piv_abs) = (col..m)
                .map(|r| (r, mat[r * m + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs < 1e-11 {
                return Ok(false);
            }
            if piv_row != col {
                for k in 0..m {
                    mat.swap(piv_row * m + k, col * m + k);
                    inv.swap(piv_row * m + k, col * m + k);
                }
            }
            let piv = mat[col * m + col];
            for k in 0..m {
                mat[col * m + k] /= piv;
                inv[col * m + k] /= piv;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = mat[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        mat[r * m + k] -= f * mat[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_xb();
        Ok(true)
    }

    fn recompute_xb(&mut self) {
        let m = self.m;
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.xb[r] = row.iter().zip(&self.lp.rhs).map(|(a, b)| a * b).sum();
        }
    }

    fn duals(&self, phase: Phase) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, &v) in self.basis.iter().enumerate() {
            let c = self.cost(v, phase);
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yk, &bk) in y.iter_mut().zip(row) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    fn ftran(&self, v: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_each_entry(v, |i, a| {
            for (r, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[r * m + i] * a;
            }
        });
        alpha
    }

    fn choose_entering(&self, phase: Phase, y: &[f64]) -> Option<usize> {
        let total = self.n + self.m;
        let mut best: Option<(usize, f64)> = None;
        for v in 0..total {
            if self.is_basic[v] || !self.exists(v) {
                continue;
            }
            let mut d = self.cost(v, phase);
            self.for_each_entry(v, |i, a| d -= y[i] * a);
            if d < -TOL_FEAS {
                if self.bland {
                    return Some(v);
                }
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((v, d));
                }
            }
        }
        best.map(|(v, _)| v)
    }

    /// Ratio test. In phase 2 basic artificials are pinned at zero, so any
    /// nonzero entry in their row blocks with a zero step.
    fn choose_leaving(&self, phase: Phase, alpha: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.m {
            let a = alpha[r];
            let theta = if phase == Phase::Two && self.is_artificial(self.basis[r]) {
                if a.abs() > TOL_PIVOT {
                    0.0
                } else {
                    continue;
                }
            } else if a > TOL_PIVOT {
                self.xb[r].max(0.0) / a
            } else {
                continue;
            };
            best = match best {
                None => Some((r, theta)),
                Some((br, bt)) => {
                    let tie = (theta - bt).abs() <= TOL_RATIO_TIE * bt.max(1.0);
                    if tie {
                        if self.bland && self.basis[r] < self.basis[br] {
                            Some((r, theta))
                        } else {
                            Some((br, bt))
                        }
                    } else if theta < bt {
                        Some((r, theta))
                    } else {
                        Some((br, bt))
                    }
                }
            };
        }
        best
    }

    fn pivot(&mut self, r: usize, v: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        let theta = self.xb[r] / piv;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (prow, after) = rest.split_at_mut(m);
        prow.iter_mut().for_each(|x| *x /= piv);
        for (i, row) in before.chunks_mut(m).chain(after.chunks_mut(m)).enumerate() {
            let a = alpha[if i < r { i } else { i + 1 }];
            if a != 0.0 {
                for (x, &p) in row.iter_mut().zip(prow.iter()) {
                    *x -= a * p;
                }
            }
        }
        let out = self.basis[r];
        self.is_basic[out] = false;
        self.is_basic[v] = true;
        self.basis[r] = v;
        self.pivots += 1;
        self.since_refactor += 1;
    }

    fn pivot_limit(&self) -> usize {
        50 * (self.m + self.n) + 1000
    }

    fn run(&mut self, phase: Phase) -> Result<Outcome> {
        let degenerate_limit = 5 * (self.m + self.n);
        loop {
            if self.pivots >= self.pivot_limit() {
                return Ok(Outcome::IterationLimit);
            }
            let y = self.duals(phase);
            let Some(v) = self.choose_entering(phase, &y) else {
                return Ok(Outcome::Optimal);
            };
            let alpha = self.ftran(v);
            let Some((r, theta)) = self.choose_leaving(phase, &alpha) else {
                return Ok(Outcome::Unbounded);
            };
            if theta <= TOL_FEAS {
                self.degenerate += 1;
                if self.degenerate > degenerate_limit {
                    self.bland = true;
                }
            }
            self.pivot(r, v, &alpha);
            if self.since_refactor >= REFACTOR_INTERVAL && !self.refactor()? {
                return Err(Error::Solver("basis became singular".into()));
            }
        }
    }

    /// Replaces basic artificials (at zero after phase 1) by structural or
    /// surplus variables where a nonzero pivot exists. Rows with none are
    /// redundant and keep their artificial.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for v in 0..(self.n + self.m) {
                if self.is_basic[v] || !self.exists(v) {
                    continue;
                }
                let mut val = 0.0;
                self.for_each_entry(v, |i, a| val += row[i] * a);
                if val.abs() > 1e-7 && best.is_none_or(|(_, b)| val.abs() > b) {
                    best = Some((v, val.abs()));
                }
            }
            if let Some((v, _)) = best {
                let alpha = self.ftran(v);
                self.pivot(r, v, &alpha);
            }
        }
        if !self.refactor()? {
            return Err(Error::Solver("basis became singular".into()));
        }
        Ok(())
    }

    fn finish(mut self, status: LpStatus) -> LpSolution {
        if self.since_refactor > 0 {
            // A singular refactor here leaves the product-form inverse in place.
            let _ = self.refactor();
        }
        let mut primal = vec![0.0; self.n];
        for (&v, &x) in self.basis.iter().zip(&self.xb) {
            if v < self.n {
                primal[v] = if x.abs() <= TOL_FEAS { 0.0 } else { x };
            }
        }
        let duals = self.duals(Phase::Two);
        let objective = primal.iter().zip(&self.lp.costs).map(|(x, c)| x * c).sum();
        let basis = Basis {
            vars: self
                .basis
                .iter()
                .map(|&v| {
                    if v < self.n {
                        BasicVar::Column(v)
                    } else if v < self.n + self.m {
                        BasicVar::Surplus(v - self.n)
                    } else {
                        BasicVar::Artificial(v - self.n - self.m)
                    }
                })
                .collect(),
        };
        LpSolution {
            status,
            primal,
            duals,
            objective,
            basis,
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lp(rows: &[f64], cols: &[&[f64]]) -> DenseLp {
        let mut lp = DenseLp::covering(rows.to_vec()).unwrap();
        for col in cols {
            lp.add_column(1.0, col.iter().copied().enumerate()).unwrap();
        }
        lp
    }

    #[test]
    fn separable_two_row() {
        let lp = lp(&[2.0, 1.0], &[&[3.0, 0.0], &[0.0, 2.0]]);
        let sol = solve(&lp, None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.primal[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, 7.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.duals[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.duals[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn zero_rhs_is_degenerate_zero() {
        let lp = lp(&[0.0], &[&[1.0]]);
        let sol = solve(&lp, None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal, vec![0.0]);
        assert_eq!(sol.objective, 0.0);
        assert_abs_diff_eq!(sol.duals[0], 0.0);
    }

    #[test]
    fn three_column_example() {
        let lp = lp(&[2.0, 1.0], &[&[2.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let sol = solve(&lp, None).unwrap();
        assert_abs_diff_eq!(sol.objective, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.duals[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.duals[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn appended_column_enters_basis() {
        let mut lp = lp(&[2.0, 1.0], &[&[2.0, 0.0], &[0.0, 1.0]]);
        let first = solve(&lp, None).unwrap();
        assert_abs_diff_eq!(first.objective, 2.0, epsilon = 1e-12);
        let j = lp.add_column(1.0, [(0, 1.0), (1, 1.0)]).unwrap();
        let second = solve(&lp, Some(&first.basis)).unwrap();
        assert_abs_diff_eq!(second.objective, 1.5, epsilon = 1e-12);
        let ev = basis_events(&first, &second);
        assert!(ev.entered.contains(&j));
        assert!(ev.left.contains(&1));
        assert!(ev.entered.is_disjoint(&ev.left));
        assert_eq!(basis_events(&second, &second), BasisEvents::default());
    }

    #[test]
    fn equality_rows_and_infeasibility() {
        let mut lp = DenseLp::new(vec![1.0, 1.0], vec![RowSense::Eq, RowSense::Eq]).unwrap();
        lp.add_column(1.0, [(0, 1.0), (1, 1.0)]).unwrap();
        lp.add_column(1.0, [(0, 1.0)]).unwrap();
        let sol = solve(&lp, None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 1.0, epsilon = 1e-12);

        let mut bad = DenseLp::new(vec![1.0, 2.0], vec![RowSense::Eq, RowSense::Eq]).unwrap();
        bad.add_column(1.0, [(0, 1.0), (1, 1.0)]).unwrap();
        assert_eq!(solve(&bad, None).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_equality_row() {
        let mut lp = DenseLp::new(vec![1.0, 1.0], vec![RowSense::Eq, RowSense::Eq]).unwrap();
        lp.add_column(1.0, [(0, 1.0), (1, 1.0)]).unwrap();
        let sol = solve(&lp, None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.primal[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = DenseLp::covering(vec![1.0]).unwrap();
        lp.add_column(-1.0, [(0, 1.0)]).unwrap();
        assert_eq!(solve(&lp, None).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn rejects_bad_input() {
        let mut lp = DenseLp::covering(vec![1.0]).unwrap();
        assert!(lp.add_column(1.0, [(0, 0.0)]).is_err());
        assert!(lp.add_column(1.0, [(3, 1.0)]).is_err());
        assert!(DenseLp::new(vec![1.0], vec![]).is_err());
        lp.add_column(1.0, [(0, 1.0)]).unwrap();
        let warm = Basis {
            vars: vec![BasicVar::Column(7)],
        };
        assert!(solve(&lp, Some(&warm)).is_err());
    }

    #[test]
    fn five_cycle_cover() {
        // Maximal independent sets of C5 covering its nodes.
        let cols: [&[f64]; 5] = [
            &[0.0, 0.0, 1.0, 0.0, 1.0],
            &[0.0, 1.0, 0.0, 0.0, 1.0],
            &[0.0, 1.0, 0.0, 1.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0, 0.0],
            &[1.0, 0.0, 1.0, 0.0, 0.0],
        ];
        let lp = lp(&[1.0; 5], &cols);
        let sol = solve(&lp, None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 2.5, epsilon = 1e-9);
        for act in lp.activities(&sol.primal) {
            assert!(act >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn infeasible_warm_basis_falls_back_to_cold() {
        let lp = lp(&[2.0, 1.0], &[&[3.0, 0.0], &[0.0, 2.0]]);
        let warm = Basis {
            vars: vec![BasicVar::Surplus(0), BasicVar::Surplus(1)],
        };
        let sol = solve(&lp, Some(&warm)).unwrap();
        assert_abs_diff_eq!(sol.objective, 7.0 / 6.0, epsilon = 1e-12);
    }
}
