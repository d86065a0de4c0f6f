//! Library side of the `curio` command: everything the binary does is
//! callable directly, which is how the test suite drives it.

pub mod art;
pub mod config;
pub mod plots;
pub mod report;
pub mod runner;
