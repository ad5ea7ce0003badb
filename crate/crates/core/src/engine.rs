//! The column generation loop.
//!
//! Each iteration solves the restricted master (warm-started from the last
//! basis), prices a candidate pool, stops if no candidate has reduced cost
//! below `-rc_tol`, and otherwise asks a selection strategy which candidates
//! to add. [`CgEngine`] exposes the loop one step at a time for the
//! environment bridge; [`cg_solve`] drives it to completion.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::column::Column;
use crate::instances::{Instance, ProblemKind};
use crate::pricing::{CandidatePool, Graph, Pricer};
use crate::selection::{Selection, SelectionContext, Selector, Strategy};
use crate::simplex::{self, basis_events, BasisEvents, DenseLp, LpSolution, LpStatus};
use crate::state::{extract_state, StateSnapshot};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CgConfig {
    /// Candidate pool size `n`.
    pub pool_size: usize,
    /// Columns selected per iteration `k`.
    pub select_count: usize,
    pub rc_tol: f64,
    pub max_iterations: usize,
    /// Always add the pricing optimum (pool index 0).
    pub force_optimum: bool,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            pool_size: 10,
            select_count: 5,
            rc_tol: 1e-6,
            max_iterations: 1000,
            force_optimum: true,
        }
    }
}

impl CgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.select_count == 0 || self.select_count > self.pool_size {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= k <= n, got k={}, n={}",
                self.select_count, self.pool_size
            )));
        }
        if !(self.rc_tol > 0.0) {
            return Err(Error::InvalidConfig("rc_tol must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Master LP with no columns: one `≥` row per order (rhs = demand) or per
/// node (rhs = 1).
pub fn master_lp(inst: &Instance) -> Result<DenseLp> {
    let rhs = match inst {
        Instance::Csp(c) => c.orders.iter().map(|&(_, d)| f64::from(d)).collect(),
        Instance::Gcp(g) => vec![1.0; g.node_count],
    };
    DenseLp::covering(rhs)
}

/// Starting columns: one homogeneous pattern per order, or a greedy cover by
/// maximal independent sets.
pub fn initial_columns(inst: &Instance) -> Result<Vec<Column>> {
    match inst {
        Instance::Csp(c) => Ok(c
            .orders
            .iter()
            .enumerate()
            .map(|(i, &(len, _))| Column::from_entries([(i, c.roll_length / len)]))
            .collect()),
        Instance::Gcp(g) => {
            let graph = Graph::new(g)?;
            let mut covered = vec![false; g.node_count];
            let mut cols = Vec::new();
            while let Some(v) = covered.iter().position(|&c| !c) {
                let set = graph.extend_to_maximal(&[v]);
                for &u in &set {
                    covered[u] = true;
                }
                cols.push(Column::from_support(set));
            }
            Ok(cols)
        }
    }
}

/// Restricted master problem plus per-column basis history.
#[derive(Debug, Clone)]
pub struct RmpModel {
    lp: DenseLp,
    columns: Vec<Column>,
    index: HashMap<Column, usize>,
    solution: Option<LpSolution>,
    events: BasisEvents,
    in_basis: Vec<u32>,
    out_of_basis: Vec<u32>,
    solves: usize,
}

pub fn init_rmp(inst: &Instance) -> Result<RmpModel> {
    let mut rmp = RmpModel {
        lp: master_lp(inst)?,
        columns: Vec::new(),
        index: HashMap::new(),
        solution: None,
        events: BasisEvents::default(),
        in_basis: Vec::new(),
        out_of_basis: Vec::new(),
        solves: 0,
    };
    for col in initial_columns(inst)? {
        rmp.add_column(col)?;
    }
    Ok(rmp)
}

impl RmpModel {
    /// Adds a column unless an identical one is already present. Returns the
    /// new column id.
    pub fn add_column(&mut self, col: Column) -> Result<Option<usize>> {
        if self.index.contains_key(&col) {
            return Ok(None);
        }
        let id = self
            .lp
            .add_column(1.0, col.coeffs().iter().map(|&(r, v)| (r, f64::from(v))))?;
        self.index.insert(col.clone(), id);
        self.columns.push(col);
        self.in_basis.push(0);
        self.out_of_basis.push(0);
        Ok(Some(id))
    }

    pub fn contains(&self, col: &Column) -> bool {
        self.index.contains_key(col)
    }

    /// Solves the current LP warm-started from the previous basis and updates
    /// basis events and in/out-of-basis counters.
    pub fn solve(&mut self) -> Result<&LpSolution> {
        let warm = self.solution.as_ref().map(|s| &s.basis);
        let sol = simplex::solve(&self.lp, warm)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Solver(format!("restricted master ended with {:?}", sol.status)));
        }
        self.events = match &self.solution {
            Some(prev) => basis_events(prev, &sol),
            None => BasisEvents {
                entered: sol.basic_columns(),
                left: Default::default(),
            },
        };
        let basic = sol.basic_columns();
        for j in 0..self.columns.len() {
            if basic.contains(&j) {
                self.in_basis[j] += 1;
            } else {
                self.out_of_basis[j] += 1;
            }
        }
        self.solves += 1;
        self.solution = Some(sol);
        Ok(self.solution.as_ref().expect("just set"))
    }

    /// Objective after tentatively adding `cols` (duplicates skipped), without
    /// touching this model.
    pub fn trial_objective<'c>(&self, cols: impl IntoIterator<Item = &'c Column>) -> Result<f64> {
        let mut lp = self.lp.clone();
        let mut added = 0;
        for col in cols {
            if !self.index.contains_key(col) {
                lp.add_column(1.0, col.coeffs().iter().map(|&(r, v)| (r, f64::from(v))))?;
                added += 1;
            }
        }
        let Some(prev) = &self.solution else {
            return Err(Error::Solver("trial solve before the first master solve".into()));
        };
        if added == 0 {
            return Ok(prev.objective);
        }
        let sol = simplex::solve(&lp, Some(&prev.basis))?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Solver(format!("trial master solve ended with {:?}", sol.status)));
        }
        Ok(sol.objective)
    }

    pub fn lp(&self) -> &DenseLp {
        &self.lp
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn num_rows(&self) -> usize {
        self.lp.num_rows()
    }

    pub fn solution(&self) -> Option<&LpSolution> {
        self.solution.as_ref()
    }

    pub fn events(&self) -> &BasisEvents {
        &self.events
    }

    /// Number of master solves in which column `j` was basic.
    pub fn iterations_in_basis(&self, j: usize) -> u32 {
        self.in_basis[j]
    }

    pub fn iterations_out_of_basis(&self, j: usize) -> u32 {
        self.out_of_basis[j]
    }

    pub fn solves(&self) -> usize {
        self.solves
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub objective: f64,
    pub duals: Vec<f64>,
    pub pool_reduced_costs: Vec<f64>,
    /// Pool indices actually applied (after forcing the optimum).
    pub selected: Vec<usize>,
    /// Master column ids created this iteration.
    pub added_columns: Vec<usize>,
    pub entered: Vec<usize>,
    pub left: Vec<usize>,
    pub rmp_seconds: f64,
    pub pricing_seconds: f64,
    pub selection_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    CapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgRun {
    pub kind: ProblemKind,
    pub instance_seed: u64,
    pub strategy: String,
    pub records: Vec<IterationRecord>,
    pub final_objective: f64,
    pub iterations: usize,
    pub status: Termination,
    /// Best pool reduced cost at the last pricing call.
    pub final_best_reduced_cost: f64,
    pub total_seconds: f64,
}

impl CgRun {
    pub fn phase_seconds(&self) -> (f64, f64, f64) {
        self.records.iter().fold((0.0, 0.0, 0.0), |acc, r| {
            (
                acc.0 + r.rmp_seconds,
                acc.1 + r.pricing_seconds,
                acc.2 + r.selection_seconds,
            )
        })
    }

    /// One JSON object per iteration record.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n").map_err(|e| Error::io("<records>", e))?;
        }
        Ok(())
    }
}

/// Outcome of [`CgEngine::begin_iteration`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationStatus {
    /// A selection is needed to continue.
    Select,
    Converged,
    CapReached,
}

/// Step-wise column generation.
#[derive(Debug)]
pub struct CgEngine {
    instance: Instance,
    config: CgConfig,
    pricer: Pricer,
    rmp: RmpModel,
    pool: CandidatePool,
    iteration: usize,
    obj0: Option<f64>,
    prev_objective: Option<f64>,
    records: Vec<IterationRecord>,
    pending: Option<IterationRecord>,
    status: Option<Termination>,
    started: Instant,
}

impl CgEngine {
    pub fn new(instance: &Instance, config: CgConfig) -> Result<Self> {
        config.validate()?;
        instance.validate()?;
        Ok(CgEngine {
            instance: instance.clone(),
            pricer: Pricer::new(instance)?,
            rmp: init_rmp(instance)?,
            config,
            pool: CandidatePool::default(),
            iteration: 0,
            obj0: None,
            prev_objective: None,
            records: Vec::new(),
            pending: None,
            status: None,
            started: Instant::now(),
        })
    }

    /// Solves the master and prices. Must alternate with
    /// [`CgEngine::apply_selection`] while it returns [`IterationStatus::Select`].
    pub fn begin_iteration(&mut self) -> Result<IterationStatus> {
        if let Some(status) = self.status {
            return Ok(match status {
                Termination::Converged => IterationStatus::Converged,
                Termination::CapReached => IterationStatus::CapReached,
            });
        }
        if self.pending.is_some() {
            return Err(Error::InvalidConfig("previous iteration still awaits a selection".into()));
        }
        self.iteration += 1;

        let t0 = Instant::now();
        let sol = self.rmp.solve()?;
        let objective = sol.objective;
        let duals = sol.duals.clone();
        let rmp_seconds = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        self.pool = self.pricer.price(&duals, self.config.pool_size);
        let pricing_seconds = t1.elapsed().as_secs_f64();

        if self.obj0.is_none() {
            self.obj0 = Some(objective);
        }
        self.prev_objective = Some(objective);
        let events = self.rmp.events().clone();
        let record = IterationRecord {
            iteration: self.iteration,
            objective,
            duals,
            pool_reduced_costs: self.pool.reduced_costs().to_vec(),
            selected: Vec::new(),
            added_columns: Vec::new(),
            entered: events.entered.into_iter().collect(),
            left: events.left.into_iter().collect(),
            rmp_seconds,
            pricing_seconds,
            selection_seconds: 0.0,
        };
        if self.converged() {
            self.records.push(record);
            self.status = Some(Termination::Converged);
            return Ok(IterationStatus::Converged);
        }
        if self.iteration >= self.config.max_iterations {
            self.records.push(record);
            self.status = Some(Termination::CapReached);
            return Ok(IterationStatus::CapReached);
        }
        self.pending = Some(record);
        Ok(IterationStatus::Select)
    }

    fn converged(&self) -> bool {
        self.pool
            .best_reduced_cost()
            .is_none_or(|rc| rc >= -self.config.rc_tol)
    }

    /// Adds the selected pool columns (skipping ones already in the master)
    /// and closes the current iteration. Returns the new column ids.
    pub fn apply_selection(&mut self, selection: &Selection, selection_seconds: f64) -> Result<Vec<usize>> {
        let Some(mut record) = self.pending.take() else {
            return Err(Error::InvalidConfig("no iteration awaits a selection".into()));
        };
        selection.validate(self.pool.len())?;
        let mut added = Vec::new();
        for &i in selection.indices() {
            if let Some(id) = self.rmp.add_column(self.pool.column(i).clone())? {
                added.push(id);
            }
        }
        record.selected = selection.indices().to_vec();
        record.added_columns = added.clone();
        record.selection_seconds = selection_seconds;
        self.records.push(record);
        Ok(added)
    }

    /// Puts pool index 0 into `selection` when forcing is on, replacing the
    /// selected column with the largest reduced cost.
    pub fn enforce_optimum(&self, selection: Selection) -> Selection {
        if self.config.force_optimum {
            selection.with_first_forced()
        } else {
            selection
        }
    }

    /// Runs one full iteration with `selector`; returns the iteration status.
    pub fn step_with(&mut self, selector: &mut dyn Selector, rng: &mut ChaCha8Rng) -> Result<IterationStatus> {
        let status = self.begin_iteration()?;
        if status != IterationStatus::Select {
            return Ok(status);
        }
        let t0 = Instant::now();
        let snapshot = if selector.needs_state() {
            Some(self.snapshot())
        } else {
            None
        };
        let ctx = SelectionContext {
            pool: &self.pool,
            k: self.config.select_count,
            force_first: self.config.force_optimum,
            rmp: &self.rmp,
            state: snapshot.as_ref(),
        };
        let selection = selector.select(&ctx, rng)?;
        let selection = if selector.is_multi() {
            self.enforce_optimum(selection)
        } else {
            selection
        };
        let elapsed = t0.elapsed().as_secs_f64();
        self.apply_selection(&selection, elapsed)?;
        Ok(status)
    }

    pub fn snapshot(&self) -> StateSnapshot {
        extract_state(self)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn config(&self) -> &CgConfig {
        &self.config
    }

    pub fn rmp(&self) -> &RmpModel {
        &self.rmp
    }

    pub fn pool(&self) -> &CandidatePool {
        &self.pool
    }

    /// Current 1-based iteration (number of master solves so far).
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn objective(&self) -> Option<f64> {
        self.prev_objective
    }

    pub fn initial_objective(&self) -> Option<f64> {
        self.obj0
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn status(&self) -> Option<Termination> {
        self.status
    }

    pub fn into_run(self, strategy: &str) -> CgRun {
        let status = self.status.unwrap_or(Termination::CapReached);
        CgRun {
            kind: self.instance.kind(),
            instance_seed: self.instance.seed(),
            strategy: strategy.to_string(),
            final_objective: self.prev_objective.unwrap_or(f64::NAN),
            iterations: self.iteration,
            status,
            final_best_reduced_cost: self.pool.best_reduced_cost().unwrap_or(f64::INFINITY),
            total_seconds: self.started.elapsed().as_secs_f64(),
            records: self.records,
        }
    }
}

/// Runs column generation to convergence (or the iteration cap) with any
/// selector.
pub fn cg_solve_with(
    inst: &Instance,
    selector: &mut dyn Selector,
    config: &CgConfig,
    seed: u64,
) -> Result<CgRun> {
    let mut engine = CgEngine::new(inst, config.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while engine.step_with(selector, &mut rng)? == IterationStatus::Select {}
    Ok(engine.into_run(&selector.name()))
}

/// Runs column generation with a built-in strategy.
pub fn cg_solve(inst: &Instance, strategy: &Strategy, config: &CgConfig, seed: u64) -> Result<CgRun> {
    let mut selector = *strategy;
    cg_solve_with(inst, &mut selector, config, seed)
}
