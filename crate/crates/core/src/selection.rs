//! Column-selection strategies.
//!
//! Every strategy maps a candidate pool (sorted by reduced cost) to a set of
//! pool indices. Multi-column strategies pick `min(k, pool size)` indices;
//! the single-column ones pick one.

use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::column::Column;
use crate::engine::RmpModel;
use crate::pricing::CandidatePool;
use crate::state::StateSnapshot;
use crate::{Error, Result};

/// Objectives closer than this are treated as ties by the lookahead.
const LOOKAHEAD_TIE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    indices: Vec<usize>,
}

impl Selection {
    pub fn new(indices: Vec<usize>) -> Self {
        Selection { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    /// Indices must be distinct and inside the pool.
    pub fn validate(&self, pool_len: usize) -> Result<()> {
        if let Some(&i) = self.indices.iter().find(|&&i| i >= pool_len) {
            return Err(Error::InvalidConfig(format!(
                "selection index {i} outside pool of {pool_len}"
            )));
        }
        if !self.indices.iter().all_unique() {
            return Err(Error::InvalidConfig(format!(
                "selection {:?} repeats an index",
                self.indices
            )));
        }
        Ok(())
    }

    /// Adds index 0 if missing, dropping the largest selected index (the
    /// worst reduced cost, as pools are sorted). Single selections gain index 0
    /// in place of their only element.
    pub fn with_first_forced(mut self) -> Self {
        if self.indices.is_empty() || self.indices.contains(&0) {
            return self;
        }
        let (worst, _) = self
            .indices
            .iter()
            .enumerate()
            .max_by_key(|&(_, &i)| i)
            .expect("nonempty");
        self.indices[worst] = 0;
        self
    }
}

/// Read-only view handed to strategies.
pub struct SelectionContext<'a> {
    pub pool: &'a CandidatePool,
    pub k: usize,
    /// Whether the engine will force index 0 into multi-column selections.
    pub force_first: bool,
    pub rmp: &'a RmpModel,
    /// Present when the selector asked for it via [`Selector::needs_state`].
    pub state: Option<&'a StateSnapshot>,
}

impl SelectionContext<'_> {
    /// Number of columns a multi-column strategy returns.
    pub fn target(&self) -> usize {
        self.k.min(self.pool.len())
    }
}

pub trait Selector {
    fn name(&self) -> String;

    /// Whether the engine should build a [`StateSnapshot`] for this selector.
    fn needs_state(&self) -> bool {
        false
    }

    /// Multi-column selectors get the pricing optimum forced in when the
    /// engine is configured to. Forcing it into a one-column random pick
    /// would turn that into the greedy rule.
    fn is_multi(&self) -> bool {
        true
    }

    fn select(&mut self, ctx: &SelectionContext<'_>, rng: &mut ChaCha8Rng) -> Result<Selection>;
}

pub fn select_greedy_single(_ctx: &SelectionContext<'_>) -> Selection {
    Selection::new(vec![0])
}

pub fn select_random_single(ctx: &SelectionContext<'_>, rng: &mut ChaCha8Rng) -> Selection {
    Selection::new(vec![rng.gen_range(0..ctx.pool.len())])
}

pub fn select_greedy_multi(ctx: &SelectionContext<'_>) -> Selection {
    Selection::new((0..ctx.target()).collect())
}

pub fn select_random_multi(ctx: &SelectionContext<'_>, rng: &mut ChaCha8Rng) -> Selection {
    let mut idx = sample(rng, ctx.pool.len(), ctx.target()).into_vec();
    idx.sort_unstable();
    Selection::new(idx)
}

/// Distributes pool-ordered columns into blocks: each column joins the first
/// block whose members are all disjoint from it, opening a new block if none
/// qualifies. Any column in block `b` therefore meets every earlier block.
pub fn diverse_blocks(columns: &[Column]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, col) in columns.iter().enumerate() {
        match blocks
            .iter_mut()
            .find(|block| block.iter().all(|&j| columns[j].is_disjoint(col)))
        {
            Some(block) => block.push(i),
            None => blocks.push(vec![i]),
        }
    }
    blocks
}

/// Checks the block structure produced by [`diverse_blocks`].
pub fn check_blocks(columns: &[Column], blocks: &[Vec<usize>]) -> std::result::Result<(), String> {
    for (b, block) in blocks.iter().enumerate() {
        for (x, y) in block.iter().tuple_combinations() {
            if !columns[*x].is_disjoint(&columns[*y]) {
                return Err(format!("block {b}: columns {x} and {y} overlap"));
            }
        }
        for &c in block {
            for (e, earlier) in blocks[..b].iter().enumerate() {
                if earlier.iter().all(|&j| columns[j].is_disjoint(&columns[c])) {
                    return Err(format!("column {c} in block {b} is disjoint from block {e}"));
                }
            }
        }
    }
    Ok(())
}

/// Block 1 first, then block 2, ..., truncated to `k` in pool order.
pub fn select_diverse(ctx: &SelectionContext<'_>) -> Selection {
    let blocks = diverse_blocks(ctx.pool.columns());
    Selection::new(blocks.into_iter().flatten().take(ctx.target()).collect())
}

/// Next master objective for every candidate combination, in lexicographic
/// combination order. With `force_first` only combinations containing index
/// 0 are considered.
pub fn lookahead_objectives(ctx: &SelectionContext<'_>) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = ctx.pool.len();
    let target = ctx.target();
    let combos: Vec<Vec<usize>> = (0..n)
        .combinations(target)
        .filter(|c| !ctx.force_first || c.contains(&0))
        .collect();
    combos
        .into_par_iter()
        .map(|combo| {
            let obj = ctx
                .rmp
                .trial_objective(combo.iter().map(|&i| ctx.pool.column(i)))?;
            Ok((combo, obj))
        })
        .collect()
}

/// One-step lookahead: the combination with the smallest next objective;
/// ties go to the lexicographically first combination.
pub fn select_lookahead(ctx: &SelectionContext<'_>) -> Result<Selection> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for (combo, obj) in lookahead_objectives(ctx)? {
        let better = match &best {
            None => true,
            Some((_, b)) => obj < b - LOOKAHEAD_TIE * (1.0 + b.abs()),
        };
        if better {
            best = Some((combo, obj));
        }
    }
    let (combo, _) = best.ok_or_else(|| Error::Solver("lookahead over an empty pool".into()))?;
    Ok(Selection::new(combo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    GreedySingle,
    RandomSingle,
    GreedyMulti,
    RandomMulti,
    DiverseMulti,
    LookaheadMulti,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::GreedySingle,
        Strategy::RandomSingle,
        Strategy::GreedyMulti,
        Strategy::RandomMulti,
        Strategy::DiverseMulti,
        Strategy::LookaheadMulti,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::GreedySingle => "greedy-s",
            Strategy::RandomSingle => "random-s",
            Strategy::GreedyMulti => "greedy-m",
            Strategy::RandomMulti => "random-m",
            Strategy::DiverseMulti => "diverse-m",
            Strategy::LookaheadMulti => "lookahead-m",
        }
    }

    pub fn is_multi(self) -> bool {
        !matches!(self, Strategy::GreedySingle | Strategy::RandomSingle)
    }

    pub fn choose(self, ctx: &SelectionContext<'_>, rng: &mut ChaCha8Rng) -> Result<Selection> {
        Ok(match self {
            Strategy::GreedySingle => select_greedy_single(ctx),
            Strategy::RandomSingle => select_random_single(ctx, rng),
            Strategy::GreedyMulti => select_greedy_multi(ctx),
            Strategy::RandomMulti => select_random_multi(ctx, rng),
            Strategy::DiverseMulti => select_diverse(ctx),
            Strategy::LookaheadMulti => select_lookahead(ctx)?,
        })
    }
}

impl Selector for Strategy {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn is_multi(&self) -> bool {
        Strategy::is_multi(*self)
    }

    fn select(&mut self, ctx: &SelectionContext<'_>, rng: &mut ChaCha8Rng) -> Result<Selection> {
        self.choose(ctx, rng)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy `{s}`")))
    }
}

#[derive(Serialize)]
struct PolicyRequest<'a> {
    cmd: &'static str,
    k: usize,
    force_first: bool,
    state: &'a StateSnapshot,
}

#[derive(Deserialize)]
struct PolicyReply {
    action: Vec<usize>,
}

/// Checks a policy reply: exactly `min(k, pool)` distinct in-range indices,
/// containing 0 when forcing.
pub fn validate_action(action: &[usize], pool_len: usize, k: usize, force_first: bool) -> Result<Selection> {
    let want = k.min(pool_len);
    if action.len() != want {
        return Err(Error::Protocol(format!(
            "action has {} indices, expected {want}",
            action.len()
        )));
    }
    if let Some(&i) = action.iter().find(|&&i| i >= pool_len) {
        return Err(Error::Protocol(format!("action index {i} outside pool of {pool_len}")));
    }
    if !action.iter().all_unique() {
        return Err(Error::Protocol(format!("action {action:?} repeats an index")));
    }
    if force_first && !action.contains(&0) {
        return Err(Error::Protocol("action must contain the forced index 0".into()));
    }
    Ok(Selection::new(action.to_vec()))
}

/// A learned policy reached over newline-delimited JSON: each request is
/// `{"cmd":"select","k":..,"force_first":..,"state":{..}}`, each reply
/// `{"action":[..]}`.
pub struct ExternalPolicy<R, W> {
    reader: R,
    writer: W,
    line: String,
}

impl<R: BufRead, W: Write> ExternalPolicy<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        ExternalPolicy {
            reader,
            writer,
            line: String::new(),
        }
    }

    pub fn request(&mut self, state: &StateSnapshot, k: usize, pool_len: usize, force_first: bool) -> Result<Selection> {
        let req = PolicyRequest {
            cmd: "select",
            k,
            force_first,
            state,
        };
        let io_err = |e: std::io::Error| Error::Protocol(format!("policy pipe: {e}"));
        serde_json::to_writer(&mut self.writer, &req)?;
        self.writer.write_all(b"\n").map_err(io_err)?;
        self.writer.flush().map_err(io_err)?;
        self.line.clear();
        let n = self.reader.read_line(&mut self.line).map_err(io_err)?;
        if n == 0 {
            return Err(Error::Protocol("policy closed the connection".into()));
        }
        let reply: PolicyReply = serde_json::from_str(self.line.trim())
            .map_err(|e| Error::Protocol(format!("malformed policy reply: {e}")))?;
        validate_action(&reply.action, pool_len, k, force_first)
    }
}

impl<R: BufRead, W: Write> Selector for ExternalPolicy<R, W> {
    fn name(&self) -> String {
        "external".into()
    }

    fn needs_state(&self) -> bool {
        true
    }

    fn select(&mut self, ctx: &SelectionContext<'_>, _rng: &mut ChaCha8Rng) -> Result<Selection> {
        let state = ctx
            .state
            .ok_or_else(|| Error::Protocol("external policy needs a state snapshot".into()))?;
        self.request(state, ctx.k, ctx.pool.len(), ctx.force_first)
    }
}

/// Policy talking to a child process over its stdio.
pub type ChildPolicy = ExternalPolicy<BufReader<ChildStdout>, BufWriter<ChildStdin>>;

/// Spawns `command` through the shell and talks to it over its stdio.
pub fn spawn_policy(command: &str) -> Result<(Child, ChildPolicy)> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| Error::Protocol(format!("cannot start policy `{command}`: {e}")))?;
    let stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");
    Ok((child, ExternalPolicy::new(BufReader::new(stdout), BufWriter::new(stdin))))
}
