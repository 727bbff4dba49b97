//! Exact-arithmetic analysis of multiterminal secret-key-agreement
//! scenarios: secrecy capacity, minimum communication for omniscience,
//! multivariate mutual information and the fundamental partition, bounds on
//! the discussion rate needed to achieve capacity, and a verdict on whether
//! attaining omniscience is discussion-rate optimal.

pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod report;
pub mod ground;
pub mod lp;
pub mod capacity;
pub mod court;
pub mod dpi;
pub mod partition;
pub mod scenario;
pub mod value;
