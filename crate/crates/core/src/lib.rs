//! Column generation laboratory.
//!
//! Solves the LP relaxations of the one-dimensional cutting stock problem and
//! of graph coloring by alternating a restricted master LP with a k-best
//! pricing oracle. The column-selection step between pricing and the master
//! is pluggable: a family of built-in strategies lives in [`selection`], and
//! [`env`] exposes the same step as a reset/step environment for an external
//! learner.
//!
//! The usual entry point is [`engine::cg_solve`]:
//!
//! ```
//! use cg_lab::engine::{cg_solve, CgConfig};
//! use cg_lab::instances::{CspInstance, Instance};
//! use cg_lab::selection::Strategy;
//!
//! let inst = Instance::Csp(CspInstance::new(10, vec![(3, 2), (5, 1)]).unwrap());
//! let run = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0).unwrap();
//! assert!((run.final_objective - 7.0 / 6.0).abs() < 1e-9);
//! assert_eq!(run.iterations, 1);
//! ```

pub mod bench;
pub mod column;
pub mod engine;
pub mod env;
mod error;
pub mod instances;
pub mod oracle;
pub mod pricing;
pub mod selection;
pub mod simplex;
pub mod state;

pub use error::{Error, Result};
