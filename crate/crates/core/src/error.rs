//! Crate-wide error types.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),

    #[error("graph is not connected: vertex `{0}` unreachable from `{1}`")]
    Disconnected(String, String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("word is not reduced at position {0}")]
    NonReducedWord(usize),

    #[error("invalid letter `{0}`")]
    InvalidLetter(char),

    #[error("prefix `{0}` is longer than the model depth {1}")]
    PrefixTooDeep(String, usize),

    #[error("buffer depth {buffer} too small: need at least {needed} (depth {depth} plus word length {word_len})")]
    BufferTooSmall {
        buffer: usize,
        needed: usize,
        depth: usize,
        word_len: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error in {file} line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("element acts trivially at the visible depth; increase depth or buffer")]
    TriviallyActing,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
