//! File formats, subcommands and the teach loop behind the `robolex` binary.

pub mod commands;
pub mod config;
pub mod corpus_io;
pub mod grammar_io;
pub mod manifest;
pub mod model_io;
pub mod teach;

pub use commands::CliError;
pub use config::RunConfig;
