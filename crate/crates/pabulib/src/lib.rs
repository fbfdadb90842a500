//! Pabulib `.pb` ingestion and the JSON/CSV artifacts written by `pbcg`.

pub mod convert;
pub mod export;
pub mod json;
pub mod pb;

pub use convert::{apply_policy, to_game, to_instance, ConvertError, DeliveryPolicy};
pub use pb::{from_instance, parse_pabulib, write_pabulib, PabulibFile, ParseError, ParseErrorKind, Section, Table};
