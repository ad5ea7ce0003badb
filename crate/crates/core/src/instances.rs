//! Cutting stock and graph coloring instances: random generation, validation
//! and the JSON file format.
//!
//! Cutting stock instances are sets of orders `(piece length, demand)` on a
//! roll of fixed length. Graph coloring instances are simple undirected graphs
//! drawn from G(N, p).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspInstance {
    pub roll_length: u32,
    /// `(piece_length, demand)`, sorted by increasing piece length.
    pub orders: Vec<(u32, u32)>,
    #[serde(default)]
    pub seed: u64,
}

impl CspInstance {
    /// Builds an instance from explicit orders. Orders are sorted by length;
    /// equal lengths are rejected (use [`CspInstance::from_pieces`] to merge).
    pub fn new(roll_length: u32, mut orders: Vec<(u32, u32)>) -> Result<Self> {
        orders.sort_unstable();
        let inst = CspInstance {
            roll_length,
            orders,
            seed: 0,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Merges raw piece lengths into orders, summing demands of equal lengths.
    pub fn from_pieces(roll_length: u32, pieces: &[u32]) -> Result<Self> {
        let mut merged: BTreeMap<u32, u32> = BTreeMap::new();
        for &len in pieces {
            *merged.entry(len).or_default() += 1;
        }
        Self::new(roll_length, merged.into_iter().collect())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn num_orders(&self) -> usize {
        self.orders.len()
    }

    pub fn piece_lengths(&self) -> impl Iterator<Item = u32> + '_ {
        self.orders.iter().map(|&(l, _)| l)
    }

    pub fn total_demand(&self) -> u64 {
        self.orders.iter().map(|&(_, d)| u64::from(d)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.roll_length == 0 {
            return Err(Error::InvalidInstance("roll_length must be positive".into()));
        }
        if self.orders.is_empty() {
            return Err(Error::InvalidInstance("at least one order is required".into()));
        }
        let mut seen = BTreeSet::new();
        for (i, &(len, demand)) in self.orders.iter().enumerate() {
            if len == 0 || len > self.roll_length {
                return Err(Error::InvalidInstance(format!(
                    "order {i}: piece length {len} outside (0, {}]",
                    self.roll_length
                )));
            }
            if demand == 0 {
                return Err(Error::InvalidInstance(format!("order {i}: demand must be >= 1")));
            }
            if !seen.insert(len) {
                return Err(Error::InvalidInstance(format!(
                    "order {i}: duplicate piece length {len}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcpInstance {
    #[serde(rename = "nodes")]
    pub node_count: usize,
    /// Edges as `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub seed: u64,
}

impl GcpInstance {
    /// Builds a graph from an edge list. Edge orientation is normalized; self
    /// loops, duplicates and out-of-range endpoints are errors.
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let inst = GcpInstance {
            node_count,
            edges,
            seed: 0,
        };
        inst.validate()?;
        let mut inst = inst;
        inst.normalize();
        Ok(inst)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn normalize(&mut self) {
        for e in &mut self.edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        self.edges.sort_unstable();
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return Err(Error::InvalidInstance("graph must have at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &self.edges {
            if u >= self.node_count || v >= self.node_count {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) has an endpoint outside [0, {})",
                    self.node_count
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop on node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(())
    }

    /// Dense adjacency matrix.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.node_count;
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    pub fn edge_density(&self) -> f64 {
        let n = self.node_count as f64;
        let pairs = n * (n - 1.0) / 2.0;
        if pairs == 0.0 {
            0.0
        } else {
            self.edges.len() as f64 / pairs
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Csp(CspInstance),
    Gcp(GcpInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Csp(_) => ProblemKind::Csp,
            Instance::Gcp(_) => ProblemKind::Gcp,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Instance::Csp(c) => c.seed,
            Instance::Gcp(g) => g.seed,
        }
    }

    /// Number of master constraint rows.
    pub fn num_rows(&self) -> usize {
        match self {
            Instance::Csp(c) => c.num_orders(),
            Instance::Gcp(g) => g.node_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Instance::Csp(c) => c.validate(),
            Instance::Gcp(g) => g.validate(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        if let Instance::Gcp(g) = &mut inst {
            g.normalize();
        }
        Ok(inst)
    }
}

impl From<CspInstance> for Instance {
    fn from(c: CspInstance) -> Self {
        Instance::Csp(c)
    }
}

impl From<GcpInstance> for Instance {
    fn from(g: GcpInstance) -> Self {
        Instance::Gcp(g)
    }
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = inst.to_json()?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads and validates an instance file. Parse errors carry serde's line and
/// column plus the offending field name.
pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut inst: Instance = serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    inst.validate()?;
    if let Instance::Gcp(g) = &mut inst {
        g.normalize();
    }
    Ok(inst)
}

/// `(Σ ℓ_i d_i) / L`, a lower bound on the master LP optimum.
pub fn material_lower_bound(inst: &CspInstance) -> Ratio<u64> {
    let material: u64 = inst
        .orders
        .iter()
        .map(|&(l, d)| u64::from(l) * u64::from(d))
        .sum();
    Ratio::new(material, u64::from(inst.roll_length))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Csp,
    Gcp,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Csp => "csp",
            ProblemKind::Gcp => "gcp",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csp" => Ok(ProblemKind::Csp),
            "gcp" => Ok(ProblemKind::Gcp),
            other => Err(Error::InvalidConfig(format!("unknown problem kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Easy,
    Normal,
    Hard,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Easy, Category::Normal, Category::Hard];

    pub fn csp_roll_length(self) -> u32 {
        match self {
            Category::Easy => 50,
            Category::Normal => 100,
            Category::Hard => 200,
        }
    }

    /// Candidate raw piece counts. The published table lists 575 in the
    /// normal row, read here as 75.
    pub fn csp_piece_counts(self) -> &'static [u32] {
        match self {
            Category::Easy => &[50, 75, 100, 120],
            Category::Normal => &[75, 100, 120, 150],
            Category::Hard => &[125, 150],
        }
    }

    pub fn gcp_node_count(self) -> usize {
        match self {
            Category::Easy => 30,
            Category::Normal => 40,
            Category::Hard => 50,
        }
    }

    /// Default dataset size per category.
    pub fn default_dataset_size(self) -> usize {
        match self {
            Category::Easy => 1000,
            Category::Normal => 200,
            Category::Hard => 100,
        }
    }
}

const CSP_W_MIN: [f64; 2] = [0.1, 0.2];
const CSP_W_MAX: [f64; 2] = [0.7, 0.8];
const GCP_P_RANGE: (f64, f64) = (0.4, 0.6);

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Easy => "easy",
            Category::Normal => "normal",
            Category::Hard => "hard",
        })
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Category::Easy),
            "normal" => Ok(Category::Normal),
            "hard" => Ok(Category::Hard),
            other => Err(Error::InvalidConfig(format!("unknown category `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GenParams {
    Category(Category),
    Csp {
        roll_length: u32,
        pieces: u32,
        w_min: f64,
        w_max: f64,
    },
    Gcp {
        nodes: usize,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub kind: ProblemKind,
    pub params: GenParams,
    pub seed: u64,
}

impl GenConfig {
    pub fn category(kind: ProblemKind, category: Category, seed: u64) -> Self {
        GenConfig {
            kind,
            params: GenParams::Category(category),
            seed,
        }
    }

    pub fn csp(roll_length: u32, pieces: u32, w_min: f64, w_max: f64, seed: u64) -> Self {
        GenConfig {
            kind: ProblemKind::Csp,
            params: GenParams::Csp {
                roll_length,
                pieces,
                w_min,
                w_max,
            },
            seed,
        }
    }

    pub fn gcp(nodes: usize, p: f64, seed: u64) -> Self {
        GenConfig {
            kind: ProblemKind::Gcp,
            params: GenParams::Gcp { nodes, p },
            seed,
        }
    }
}

pub fn generate(config: &GenConfig) -> Result<Instance> {
    match config.kind {
        ProblemKind::Csp => gen_csp(config).map(Instance::Csp),
        ProblemKind::Gcp => gen_gcp(config).map(Instance::Gcp),
    }
}

pub fn gen_csp(config: &GenConfig) -> Result<CspInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (roll_length, pieces, w_min, w_max) = match config.params {
        GenParams::Category(cat) => (
            cat.csp_roll_length(),
            *cat.csp_piece_counts().choose(&mut rng).expect("nonempty"),
            *CSP_W_MIN.choose(&mut rng).expect("nonempty"),
            *CSP_W_MAX.choose(&mut rng).expect("nonempty"),
        ),
        GenParams::Csp {
            roll_length,
            pieces,
            w_min,
            w_max,
        } => (roll_length, pieces, w_min, w_max),
        GenParams::Gcp { .. } => {
            return Err(Error::InvalidConfig("graph parameters given for a CSP config".into()))
        }
    };
    if config.kind != ProblemKind::Csp {
        return Err(Error::InvalidConfig("gen_csp needs a CSP config".into()));
    }
    if roll_length < 1 {
        return Err(Error::InvalidConfig("roll length must be >= 1".into()));
    }
    if !(w_min > 0.0 && w_min < w_max && w_max <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < w_min < w_max <= 1, got w_min={w_min}, w_max={w_max}"
        )));
    }
    if pieces == 0 {
        return Err(Error::InvalidConfig("piece count must be >= 1".into()));
    }
    let lo = ((w_min * f64::from(roll_length)).round() as u32).max(1);
    let hi = ((w_max * f64::from(roll_length)).round() as u32).clamp(lo, roll_length);
    let raw: Vec<u32> = (0..pieces).map(|_| rng.gen_range(lo..=hi)).collect();
    Ok(CspInstance::from_pieces(roll_length, &raw)?.with_seed(config.seed))
}

pub fn gen_gcp(config: &GenConfig) -> Result<GcpInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (nodes, p) = match config.params {
        GenParams::Category(cat) => (
            cat.gcp_node_count(),
            rng.gen_range(GCP_P_RANGE.0..=GCP_P_RANGE.1),
        ),
        GenParams::Gcp { nodes, p } => (nodes, p),
        GenParams::Csp { .. } => {
            return Err(Error::InvalidConfig("CSP parameters given for a GCP config".into()))
        }
    };
    if config.kind != ProblemKind::Gcp {
        return Err(Error::InvalidConfig("gen_gcp needs a GCP config".into()));
    }
    if nodes < 2 {
        return Err(Error::InvalidConfig("graph needs at least 2 nodes".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for u in 0..nodes {
        for v in (u + 1)..nodes {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(GcpInstance::new(nodes, edges)?.with_seed(config.seed))
}
