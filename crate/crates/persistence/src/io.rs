//! Canonical serialisation and atomic file I/O.
//!
//! Canonical form: JSON with alphabetically sorted object keys, two-space
//! indentation, sorted id arrays (sets serialise sorted) and a trailing
//! newline. Equal models produce byte-identical files, so model documents
//! diff cleanly under version control.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use posture_model::{validate_model, DesignModel, ValidationReport, SCHEMA_VERSION};
use serde::Serialize;

use crate::document::ModelDocument;

/// Conventional extension for model documents.
pub const MODEL_EXTENSION: &str = "posture.json";

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("io failure on `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse failure in `{path}` at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("`{path}` has schema version {found}, newer than the supported {supported}")]
    SchemaTooNew {
        path: PathBuf,
        found: u32,
        supported: u32,
    },
    #[error("`{path}` fails validation with {} error(s)", report.errors().count())]
    InvalidModel {
        path: PathBuf,
        report: ValidationReport,
    },
    #[error("encoding failure: {0}")]
    Encode(#[from] serde_json::Error),
}

impl PersistError {
    pub fn code(&self) -> &'static str {
        match self {
            PersistError::Io { .. } => "io-failure",
            PersistError::Parse { .. } => "parse-failure",
            PersistError::SchemaTooNew { .. } => "schema-too-new",
            PersistError::InvalidModel { .. } => "invalid-model",
            PersistError::Encode(_) => "io-failure",
        }
    }
}

/// Serialises any value to canonical JSON bytes. Routing through
/// `serde_json::Value` sorts object keys (its map is ordered by key).
pub fn canonical_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    let value = serde_json::to_value(value)?;
    let mut bytes = serde_json::to_vec_pretty(&value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Loads, migrates and validates a model document; fails on validation
/// errors. Use [`load_model_lenient`] to inspect a failing model.
pub fn load_model(path: impl AsRef<Path>) -> Result<DesignModel, PersistError> {
    let path = path.as_ref();
    let (model, report) = load_model_lenient(path)?;
    if report.is_clean() {
        Ok(model)
    } else {
        Err(PersistError::InvalidModel {
            path: path.to_path_buf(),
            report,
        })
    }
}

/// Loads a model document and returns it together with its validation
/// report (including `duplicate-id` findings for repeated document
/// entries), leaving the caller to decide whether errors are acceptable.
pub fn load_model_lenient(
    path: impl AsRef<Path>,
) -> Result<(DesignModel, ValidationReport), PersistError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| PersistError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc = parse_document(path, &text)?;
    let (model, duplicate_findings) = doc.into_model();
    let mut findings = validate_model(&model).findings;
    findings.extend(duplicate_findings);
    Ok((model, ValidationReport::from_findings(findings)))
}

fn parse_document(path: &Path, text: &str) -> Result<ModelDocument, PersistError> {
    let parse_err = |e: &serde_json::Error| PersistError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err(&e))?;
    let version = raw
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| PersistError::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: "document has no integer `schema_version`".to_string(),
        })?;
    if version > u64::from(SCHEMA_VERSION) {
        return Err(PersistError::SchemaTooNew {
            path: path.to_path_buf(),
            found: version as u32,
            supported: SCHEMA_VERSION,
        });
    }
    // Migration dispatch: older published versions get transformed into the
    // current shape here. Version 1 is the first published schema.
    match version as u32 {
        SCHEMA_VERSION => serde_json::from_str(text).map_err(|e| parse_err(&e)),
        older => Err(PersistError::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: format!("unknown schema_version {older}; no migration available"),
        }),
    }
}

/// Writes the model in canonical form, atomically (temp file plus rename in
/// the destination directory).
pub fn save_model(model: &DesignModel, path: impl AsRef<Path>) -> Result<(), PersistError> {
    let path = path.as_ref();
    let doc = ModelDocument::from_model(model);
    let bytes = canonical_json_bytes(&doc)?;
    write_atomic(path, &bytes)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PersistError> {
    let io_err = |source: std::io::Error| PersistError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
