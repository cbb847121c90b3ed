//! JSON front end for braidseed: word-spec parsing, command dispatch and the HTTP API.
//!
//! Vertex indices, positions and letters are 1-based in every payload.

pub mod commands;
pub mod error;
pub mod server;
pub mod spec;

pub use commands::{run, run_json, Config, Envelope, Payload, COMMANDS};
pub use error::ApiError;
pub use spec::{parse_word_spec, WordSpec};
