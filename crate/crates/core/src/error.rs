use std::fmt;

/// Errors produced by parsing, construction, queries and (de)serialization.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input contains a byte in the reserved range 0x00..=0x02 and no
    /// remapping was requested.
    #[error("reserved byte 0x{byte:02x} at input position {pos} (use remap to shift the alphabet)")]
    ReservedByte { byte: u8, pos: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} out of range (valid range 0..{len})")]
    OutOfRange { index: usize, len: usize },

    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("input of length {len} exceeds limit {limit}")]
    TooLarge { len: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn corrupt(msg: impl fmt::Display) -> Self {
        Error::Corrupt(msg.to_string())
    }

    pub(crate) fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
