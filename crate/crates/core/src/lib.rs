//! Multi-terminal binary decision diagrams over configurable-precision
//! complex leaves, with delta-merging, quantum circuit simulation and
//! numerical error analysis.

pub mod analysis;
pub mod mtbdd;
pub mod numerics;
pub mod quantum;
