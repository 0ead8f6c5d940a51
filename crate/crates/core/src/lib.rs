//! Rate and energy-consumption simulator for photonic quantum-network
//! protocols.
//!
//! The library models a protocol as a set of catalogued hardware components
//! (sources, state manipulation, detection, classical electronics) plus a
//! key-rate formula. From those it derives the steady power draw, the
//! startup energy, the time to reach a target number of secret bits and
//! the total energy, for bipartite QKD links (discrete- and
//! continuous-variable) and multipartite conference-key and entanglement
//! distribution schemes.
//!
//! Entry points:
//! - [`catalog::Catalog`] — the component registry (builtin or from TOML);
//! - [`protocols::ProtocolSpec`] / [`protocols::build`] — concrete setups;
//! - [`energy::energy_for_target`] — the energy report for one setup;
//! - [`scenario`] — file-driven parameter sweeps (CSV/JSON/SVG output);
//! - [`reproduce`] — regeneration of the reference tables and figures.

// validation guards use the negated form `!(x >= 0.0)` so that NaN fails;
// test constants keep the full digit strings printed by the reference tool
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod catalog;
pub mod channel;
pub mod cv;
pub mod dv;
pub mod energy;
pub mod error;
pub mod protocols;
pub mod reproduce;
pub mod scenario;
pub mod svg;

pub use error::{Error, Result};
