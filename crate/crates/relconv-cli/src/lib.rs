//! Library half of the `relconv` executable: the definition-file schema
//! and the command implementations. Kept as a library so integration
//! tests can exercise parsing and canonical serialization directly.

pub mod commands;
pub mod schema;
