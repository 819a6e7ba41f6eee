//! Spec files, sampling, reports and command drivers for the `finsler` binary.

pub mod args;
pub mod commands;
pub mod report;
pub mod sampling;
pub mod specfile;
