//! Library side of the `ddrank` command-line tool: manifests, report
//! rendering and subcommand bodies.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod render;

pub use error::CliError;
pub use manifest::{Overrides, RunManifest};
pub use render::{render_leaderboard, BoardRow, Format};
