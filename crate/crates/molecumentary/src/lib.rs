//! Documents, remote descriptions and the command line around
//! [`molecumentary_core`].
//!
//! - [`model_doc`]: the JSON structural model.
//! - [`graph_doc`]: the JSON story graph written by `forage`.
//! - [`remote`]: encyclopedia extracts over HTTP with an on-disk cache.
//! - [`timeline_doc`] and [`narration`]: what `synthesize` and `narrate` emit.
//! - [`cli`]: argument parsing and the four subcommands.

pub mod cli;
pub mod graph_doc;
pub mod model_doc;
pub mod narration;
pub mod remote;
pub mod timeline_doc;

pub use molecumentary_core as core;

/// Problems reading a JSON document.
#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        }
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(at) => message[..at].to_string(),
        None => message.to_string(),
    }
}
