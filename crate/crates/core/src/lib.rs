//! Multicut and small-diameter decomposition on graphs of bounded treewidth.

pub mod decomposition;
pub mod fractional;
pub mod graph;
pub mod region;
pub mod pipeline;
pub mod oracle;
