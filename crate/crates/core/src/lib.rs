//! Models and simulators for row-swap based Row Hammer defenses.
//!
//! The crate covers three layers:
//!
//! - [`analytic`]: closed-form attack-time models for the Juggernaut attack
//!   against Randomized Row-Swap (RRS) and Secure Row-Swap (SRS), the Poisson
//!   outlier model behind Scalable-and-Secure Row-Swap (Scale-SRS), and the
//!   per-bank storage calculator.
//! - [`indirection`], [`tracker`], [`engine`]: an activation-exact model of a
//!   single DRAM bank. The [`ledger::ActivationLedger`] counts every activation
//!   each physical row receives and is the ground truth for whether an attack
//!   succeeded.
//! - [`montecarlo`]: sampling-based estimates of attack time used to
//!   cross-check the closed form.
//!
//! [`params`] holds the configuration shared by all of them and [`report`]
//! renders CSV tables and SVG charts.

pub mod analytic;
pub mod engine;
pub mod indirection;
pub mod ledger;
pub mod montecarlo;
pub mod params;
pub mod report;
pub mod rng;
pub mod tracker;

/// Index of a DRAM row within one bank.
pub type RowId = u32;

pub use analytic::{AttackAnalysis, OutlierAnalysis};
pub use engine::EpochReport;
pub use ledger::ActivationLedger;
pub use params::{AttackPlan, Config, DefenseConfig, DefenseKind, DramGeometry, Strategy, TimingParams};
