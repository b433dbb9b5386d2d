//! File formats, instance generation, reporting and the `mcut` command line.

pub mod bench;
pub mod cli;
pub mod format;
pub mod generator;
pub mod report;
