//! Versioned, diff-friendly persistence for design models.
//!
//! Models are stored as canonical JSON documents (`.posture.json`): sorted
//! keys, sorted id arrays, fixed indentation, trailing newline. Loading
//! parses, migrates older schema versions, and validates; saving writes
//! canonically and atomically, so the serialised posture can live in
//! version control next to the design it describes.

mod document;
mod io;

pub use document::ModelDocument;
pub use io::{
    canonical_json_bytes, load_model, load_model_lenient, save_model, PersistError,
    MODEL_EXTENSION,
};
