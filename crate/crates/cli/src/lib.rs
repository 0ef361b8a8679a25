//! Library surface of the `cse` command-line tool: file formats, legacy
//! import, reports and command dispatch.

pub mod commands;
pub mod formats;
pub mod nfg;
pub mod report;

pub use commands::{run, run_command};
