//! Deterministic simulation of the target runtime: block pool, ports,
//! external memory and the cyclic executive.

pub mod config;
mod interp;
pub mod memory;
pub mod pool;

pub use config::{Config, ConfigError};
pub use interp::{render_transcript, Event, Fault, FaultKind, Image, LoadError, RunOutcome, RuntimeError};
