//! Command-line front end, file formats and parallel search for the
//! shifted Fermat sequence.

pub mod app;
pub mod cache;
pub mod config;
pub mod parallel;
pub mod suites;
pub mod wire;
