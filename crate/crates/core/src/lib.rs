//! Monte-Carlo simulator of beam-based NR-U/WiGig coexistence in the
//! unlicensed 60 GHz band.
//!
//! The simulator drops random indoor deployments of NR-U (gNB-UE) and WiGig
//! (AP-STA) pairs, runs a snapshot channel-access contention under a
//! configurable listen-before-talk procedure, and reports spectrum-reuse and
//! rate statistics across many drops.
//!
//! Modules:
//! - [`scenario`]: random deployment generation,
//! - [`radio`]: directional antenna gains and the 60 GHz link budget,
//! - [`access`]: carrier-sense procedures (omni/dir/pair/switch LBT and
//!   receiver-assisted LBR) and snapshot admission,
//! - [`metrics`]: per-drop SINR/rate metrics and cross-drop aggregates,
//! - [`regulatory`]: ETSI band constants, LBT categories, handshake overheads,
//! - [`config`] and [`experiment`]: sweep configuration, deterministic
//!   parallel execution, and result-file emission.

pub mod access;
pub mod config;
pub mod experiment;
pub mod metrics;
pub mod radio;
pub mod regulatory;
pub mod scenario;

pub use access::{
    AccessOutcome, PairDecision, ReceptionMode, SensingConfig, SensingStrategy, TxSensing,
};
pub use config::ExperimentConfig;
pub use metrics::{AggregateMetrics, DropMetrics};
pub use radio::{AntennaPattern, ChannelParams, Radiator};
pub use regulatory::{Band, BandRules, LbtCategory};
pub use scenario::{Deployment, LinkPair, Point2D, Rat, ScenarioParams};
