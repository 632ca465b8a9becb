//! Command-line frontend and UCI adapters for the dualmind engines.

pub mod client;
pub mod commands;
pub mod server;

pub use client::UciClient;
pub use commands::{main_with, run, Cli, Cmd};
pub use server::{info_lines, parse_go, parse_position, SessionState, UciSession};
