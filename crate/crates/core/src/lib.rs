//! Quantum query-complexity workbench.
//!
//! Simulated quantum search primitives with exact query accounting, the
//! small-error search constructions and their error/query trade-off,
//! zero-error certificate-finding evaluation of AND-OR trees, graph
//! properties, a two-party certificate protocol, polynomial-method bound
//! evaluation and brute-force complexity measures of small Boolean functions.

pub mod amplitude;
pub mod andor;
pub mod boolfn;
pub mod cli;
pub mod comm;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod poly;
pub mod search;
pub mod statevector;

pub use error::{Error, Result};
pub use oracle::{BitOracle, Harness, QueryStats, RngSeed};
