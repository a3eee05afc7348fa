//! Command-line front end for `fibermeasure`: the model file format and the
//! subcommands behind the `fibermeasure` binary.

pub mod commands;
pub mod format;
