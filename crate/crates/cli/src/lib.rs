//! Library side of the command-line front end: configuration parsing, output
//! emission, and the command implementations.

pub mod commands;
pub mod config;
pub mod emit;
