//! Seedable simulator of link-recommendation feedback loops on bi-populated
//! directed networks.
//!
//! A DPAH generator ([`dpah`]) builds scale-free networks with tunable
//! homophily and minority size, five topology-only recommenders
//! ([`recommenders`]) propose one new followee per node and step, and the
//! loop in [`simulation`] applies those links while removing one out-link per
//! addition. [`metrics`] tracks clustering, in-degree inequality, minority
//! visibility and in-group link ratios; [`harness`] runs parameter sweeps.

pub mod dpah;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod pagerank;
pub mod recommenders;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, Group, NodeId, Snapshot};

/// Version of the tidy-record schema written by the harness and CLI.
pub const SCHEMA_VERSION: u32 = 1;
