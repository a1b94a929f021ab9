//! Library half of the `noisedisc` command: file format, configuration and
//! the command implementations. `main.rs` only parses arguments.

mod commands;
pub mod config;
pub mod sysfile;

pub use commands::{
    bench_config, cmd_bench, cmd_check, cmd_discretize, cmd_gen, exit, BenchOverrides, CliError, GenSource,
};
