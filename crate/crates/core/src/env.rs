//! Column generation as an RL environment over newline-delimited JSON.
//!
//! The engine process is the server. Requests carry `"cmd"`:
//!
//! ```text
//! {"cmd":"reset","problem":"csp","category":"easy","seed":7}
//! {"cmd":"reset","instance":{"kind":"csp","roll_length":10,"orders":[[3,2],[5,1]],"seed":0}}
//! {"cmd":"step","action":[0,2,3,5,7]}
//! {"cmd":"close"}
//! ```
//!
//! Replies always carry `"ok"`. Successful resets and steps return
//! `{"ok":true,"state":{..}|null,"reward":r,"done":b,"info":{"obj":..,"iteration":..,"steps":..,"cap":b}}`
//! (`reward` is omitted on reset); failures return `{"ok":false,"error":".."}`
//! and leave the session usable.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::TcpListener;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{CgConfig, CgEngine, IterationStatus};
use crate::instances::{generate, Category, GenConfig, Instance, ProblemKind};
use crate::selection::validate_action;
use crate::state::{compute_reward, RewardParams, StateSnapshot};
use crate::{Error, Result};

/// Server-side defaults, overridable per reset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub problem: ProblemKind,
    pub category: Category,
    pub reward: RewardParams,
    pub cg: CgConfig,
    /// Zero the global feature vector in emitted states.
    pub zero_global: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            problem: ProblemKind::Csp,
            category: Category::Easy,
            reward: RewardParams::default(),
            cg: CgConfig::default(),
            zero_global: false,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "lowercase", deny_unknown_fields)]
pub enum Request {
    Reset(ResetRequest),
    Step { action: Vec<usize> },
    Close,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResetRequest {
    pub problem: Option<ProblemKind>,
    pub category: Option<Category>,
    pub instance: Option<Instance>,
    pub seed: Option<u64>,
    pub reward: Option<RewardParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub obj: f64,
    /// Master solves so far.
    pub iteration: usize,
    /// Transitions taken in this episode.
    pub steps: usize,
    pub cap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reply {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Option<StateSnapshot>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reward: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub done: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info: Option<StepInfo>,
}

impl Reply {
    fn error(msg: impl Into<String>) -> Self {
        Reply {
            ok: false,
            error: Some(msg.into()),
            state: None,
            reward: None,
            done: None,
            info: None,
        }
    }

    fn closed() -> Self {
        Reply {
            ok: true,
            error: None,
            state: None,
            reward: None,
            done: None,
            info: None,
        }
    }
}

/// One episode at a time over a live engine.
pub struct EpisodeSession {
    config: EnvConfig,
    engine: Option<CgEngine>,
    reward: RewardParams,
    steps: usize,
    done: bool,
}

impl EpisodeSession {
    pub fn new(config: EnvConfig) -> Self {
        EpisodeSession {
            reward: config.reward,
            config,
            engine: None,
            steps: 0,
            done: true,
        }
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn engine(&self) -> Option<&CgEngine> {
        self.engine.as_ref()
    }

    fn info(&self, status: IterationStatus) -> StepInfo {
        let engine = self.engine.as_ref().expect("engine present");
        StepInfo {
            obj: engine.objective().unwrap_or(f64::NAN),
            iteration: engine.iteration(),
            steps: self.steps,
            cap: status == IterationStatus::CapReached,
        }
    }

    fn state(&self) -> StateSnapshot {
        let snap = self.engine.as_ref().expect("engine present").snapshot();
        if self.config.zero_global {
            snap.without_global()
        } else {
            snap
        }
    }

    pub fn reset(&mut self, req: ResetRequest) -> Result<Reply> {
        let reward = req.reward.unwrap_or(self.config.reward);
        reward.validate()?;
        let instance = match req.instance {
            Some(inst) => {
                inst.validate()?;
                inst
            }
            None => {
                let kind = req.problem.unwrap_or(self.config.problem);
                let category = req.category.unwrap_or(self.config.category);
                generate(&GenConfig::category(kind, category, req.seed.unwrap_or(0)))?
            }
        };
        let mut engine = CgEngine::new(&instance, self.config.cg.clone())?;
        let status = engine.begin_iteration()?;
        self.engine = Some(engine);
        self.reward = reward;
        self.steps = 0;
        self.done = status != IterationStatus::Select;
        let state = if self.done { None } else { Some(self.state()) };
        Ok(Reply {
            ok: true,
            error: None,
            state: Some(state),
            reward: None,
            done: Some(self.done),
            info: Some(self.info(status)),
        })
    }

    pub fn step(&mut self, action: &[usize]) -> Result<Reply> {
        if self.engine.is_none() {
            return Err(Error::Protocol("step before reset".into()));
        }
        if self.done {
            return Err(Error::Protocol("episode is done; send reset".into()));
        }
        let engine = self.engine.as_mut().expect("checked");
        let cfg = engine.config();
        let selection = validate_action(action, engine.pool().len(), cfg.select_count, cfg.force_optimum)?;
        let selected: Vec<_> = selection
            .indices()
            .iter()
            .map(|&i| engine.pool().column(i).clone())
            .collect();
        let prev_obj = engine.objective().expect("master solved");
        let obj0 = engine.initial_objective().expect("master solved");
        let t0 = Instant::now();
        engine.apply_selection(&selection, t0.elapsed().as_secs_f64())?;
        let status = engine.begin_iteration()?;
        let new_obj = engine.objective().expect("master solved");
        let refs: Vec<_> = selected.iter().collect();
        let reward = compute_reward(prev_obj, new_obj, obj0, &refs, &self.reward)?;
        self.steps += 1;
        self.done = status != IterationStatus::Select;
        let state = if self.done { None } else { Some(self.state()) };
        Ok(Reply {
            ok: true,
            error: None,
            state: Some(state),
            reward: Some(reward),
            done: Some(self.done),
            info: Some(self.info(status)),
        })
    }

    /// Parses and answers one request line. The flag is true when the
    /// session should end.
    pub fn handle_line(&mut self, line: &str) -> (Reply, bool) {
        let req: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return (Reply::error(format!("malformed request: {e}")), false),
        };
        let result = match req {
            Request::Reset(r) => self.reset(r),
            Request::Step { action } => self.step(&action),
            Request::Close => return (Reply::closed(), true),
        };
        match result {
            Ok(reply) => (reply, false),
            Err(e) => (Reply::error(e.to_string()), false),
        }
    }
}

/// Serves one session over a line-oriented stream until `close` or EOF.
pub fn serve<R: BufRead, W: Write>(reader: R, mut writer: W, config: EnvConfig) -> Result<()> {
    let mut session = EpisodeSession::new(config);
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io("<env stream>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (reply, close) = session.handle_line(&line);
        serde_json::to_writer(&mut writer, &reply)?;
        writer
            .write_all(b"\n")
            .and_then(|_| writer.flush())
            .map_err(|e| Error::io("<env stream>", e))?;
        if close {
            break;
        }
    }
    Ok(())
}

/// Accepts connections on `127.0.0.1:port`, one session per connection,
/// served sequentially.
pub fn serve_tcp(port: u16, config: EnvConfig) -> Result<()> {
    let addr = format!("127.0.0.1:{port}");
    let listener = TcpListener::bind(&addr).map_err(|e| Error::io(&addr, e))?;
    for stream in listener.incoming() {
        let stream = stream.map_err(|e| Error::io(&addr, e))?;
        let reader = BufReader::new(stream.try_clone().map_err(|e| Error::io(&addr, e))?);
        serve(reader, BufWriter::new(stream), config.clone())?;
    }
    Ok(())
}
