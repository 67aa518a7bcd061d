//! Library side of the `gausscap` binary: argument types, settings
//! resolution, emitters, commands and the acceptance runner.

pub mod acceptance;
pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
