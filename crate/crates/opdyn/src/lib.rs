//! File formats, operator specs, reports and the command-line driver for
//! `opdyn-core`.
//!
//! Everything that touches the filesystem lives here; the numerical work is
//! delegated to the core crate.

pub mod cli;
pub mod manifest;
pub mod output;
pub mod report;
pub mod spec;
pub mod vecfile;
