//! Ingestion of the official CWE weakness catalogue.
//!
//! Parses the catalogue XML export into weakness entries and imports them
//! into a design model as mechanism vulnerabilities, with the catalogue's
//! `ChildOf` hierarchy (scoped to one view) becoming the abstraction
//! edges. This module does no network I/O; the export file is supplied by
//! the caller.

mod import;
mod parse;

pub use import::{import_cwe, CweImport, CweImportError};
pub use parse::{parse_cwe_catalog, CatalogError, CweEntry, ParseOptions, DEFAULT_VIEW};
