//! File formats, rendering and the command line around `flowtopo-core`.

pub mod cli;
pub mod fieldfile;
pub mod format;
pub mod render;

pub use fieldfile::{parse_field_file, parse_field_str, FieldFile, ParseError};
