//! Prefix-free parsing as a queryable compressed text index.
//!
//! The text is parsed into a dictionary of overlapping phrases and a parse
//! (the sequence of phrase ranks); from those two objects alone the library
//! builds a set of succinct components that answer random access, longest
//! common extensions, suffix-array/ISA/LCP lookups and BWT access without
//! ever materializing the suffix array of the text.

pub mod builder;
pub mod error;
pub mod format;
pub mod oracle;
pub mod parser;
pub mod queries;
pub mod succinct;

pub use builder::{build_index, BoundaryLcpSupport, MRow, PfpIndex};
pub use error::{Error, Result};
pub use format::{
    deserialize, export_dict, export_parse, import_dict_and_parse, serialize,
    serialize_with_sections,
};
pub use oracle::{oracle_build, oracle_lce, OracleIndex};
pub use parser::{
    expand, parse_text, prepare_text, Dictionary, Parse, Text, TriggerConfig, TriggerMode,
    DEFAULT_P, DEFAULT_W, SENTINEL,
};
pub use queries::PhraseLocation;
