//! Co-simulation engine for chiplet-based systems executing streams of DNN models.
//!
//! The crate couples four simulation layers under one global timeline:
//!
//! * [`workload`] — layer-wise DNN descriptions, workload stream generation,
//!   the model queue with age-aware arbitration, and activation traffic derivation.
//! * [`mapper`] — nearest-neighbor placement of model layers onto chiplets with
//!   layer segmentation and memory occupancy tracking.
//! * [`compute`] — pluggable per-segment compute backends (the analytical
//!   MAC-throughput backend ships by default).
//! * [`network`] — a cycle-level network-on-interposer simulator with wormhole
//!   flits, credit-based backpressure, and round-robin switch allocation.
//! * [`cosim`] — the global manager that interleaves compute completions,
//!   traffic injection, and network advancement, in pipelined or non-pipelined
//!   mode, plus the two decoupled baseline estimators.
//! * [`power`] / [`thermal`] — microsecond-resolution power binning and a
//!   compact RC thermal model (steady-state and backward-Euler transient).
//!
//! See the `examples/` directory for one runnable example per capability, and
//! the `chiplet-cosim` binary for the batch front end.

pub mod cli;
pub mod compute;
pub mod config;
pub mod cosim;
pub mod error;
pub mod mapper;
pub mod models;
pub mod network;
pub mod power;
pub mod report;
pub mod routing;
pub mod thermal;
pub mod workload;

/// Chiplet identifiers are dense: a valid system uses ids `0..n`.
pub type ChipletId = u32;

/// Global simulation time in integer nanoseconds.
pub type Nanos = u64;

/// Network time in cycles of `cycle_period` nanoseconds.
pub type Cycle = u64;

pub use config::{ChipletSpec, LinkSpec, SystemConfig, TopologyKind};
pub use cosim::{run, Mode, RunOptions, SimulationOutput};
pub use error::{ConfigError, SimError};
pub use report::SimulationReport;
pub use workload::{DnnModel, LayerDescriptor, LayerStats};
