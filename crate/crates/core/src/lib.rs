//! Ant Colony System for the team orienteering problem with time windows.
//!
//! Solutions are giant tours over an expanded graph with one depot copy per
//! reachable customer, scored hierarchically, and improved by a CROSS-exchange
//! local search.

pub mod acs;
pub mod bench;
pub mod instance;
pub mod local_search;
pub mod model;
pub mod oracle;

pub use acs::{solve, AcsError, AcsParams, BestRecord};
pub use instance::{Instance, InstanceFormat, Node, ParseError};
pub use model::{ExpandedGraph, GiantTour, HierarchicScore, RouteSet};
