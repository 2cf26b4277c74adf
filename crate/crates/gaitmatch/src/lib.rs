//! File formats, benchmark harness and command-line front end for
//! [`gaitmatch_core`].

pub mod bench;
pub mod cli;
pub mod config;
pub mod io;

pub use gaitmatch_core as core;
