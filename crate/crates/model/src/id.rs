//! Entity identifiers and their canonical forms.
//!
//! Ids are case-sensitive strings, unique within an entity kind. Three id
//! schemes carry a canonical form that is enforced wherever an id is created
//! through [`EntityId::new`]:
//!
//! - `CWE-<digits>` for weakness ids,
//! - `CVE-<4 digits>-<4+ digits>` for disclosed-vulnerability ids,
//! - CPE 2.3 formatted strings for platform-derived type ids.
//!
//! Anything else is a free-form id. Deserialisation does not validate (a
//! document with malformed ids must still be loadable so validation can
//! report on it); [`EntityId::check`] re-runs the scheme check.

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cpe::{Cpe, CpeError};

/// Identifier of a model entity.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct EntityId(String);

/// The id scheme an identifier falls under, detected by prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdScheme {
    Cwe,
    Cve,
    Cpe,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdError {
    #[error("id must be a non-empty string")]
    Empty,
    #[error("`{0}` is not a canonical CWE id (expected CWE-<digits>)")]
    BadCwe(String),
    #[error("`{0}` is not a canonical CVE id (expected CVE-<4 digits>-<4+ digits>)")]
    BadCve(String),
    #[error("`{id}` is not a CPE 2.3 formatted string: {source}")]
    BadCpe {
        id: String,
        #[source]
        source: CpeError,
    },
}

impl EntityId {
    /// Creates an id, enforcing the canonical form of its scheme.
    pub fn new(value: impl Into<String>) -> Result<Self, IdError> {
        let id = EntityId(value.into());
        id.check()?;
        Ok(id)
    }

    /// Creates an id without scheme validation. Used by deserialisation and
    /// by tests that need malformed ids; `validate_model` reports on them.
    pub fn unchecked(value: impl Into<String>) -> Self {
        EntityId(value.into())
    }

    /// The scheme this id claims by prefix (case-insensitive detection).
    pub fn scheme(&self) -> IdScheme {
        let lower_prefix = |p: &str| {
            self.0.len() >= p.len() && self.0[..p.len()].eq_ignore_ascii_case(p)
        };
        if lower_prefix("CWE-") {
            IdScheme::Cwe
        } else if lower_prefix("CVE-") {
            IdScheme::Cve
        } else if lower_prefix("cpe:") {
            IdScheme::Cpe
        } else {
            IdScheme::Free
        }
    }

    /// Re-checks the canonical form. Total: every id falls under exactly one
    /// scheme and the check is deterministic.
    pub fn check(&self) -> Result<(), IdError> {
        if self.0.is_empty() {
            return Err(IdError::Empty);
        }
        match self.scheme() {
            IdScheme::Cwe => {
                let digits = self.0.strip_prefix("CWE-").unwrap_or("");
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(IdError::BadCwe(self.0.clone()));
                }
            }
            IdScheme::Cve => {
                if !is_canonical_cve(&self.0) {
                    return Err(IdError::BadCve(self.0.clone()));
                }
            }
            IdScheme::Cpe => {
                Cpe::parse(&self.0).map_err(|source| IdError::BadCpe {
                    id: self.0.clone(),
                    source,
                })?;
            }
            IdScheme::Free => {}
        }
        Ok(())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn is_canonical_cve(id: &str) -> bool {
    let Some(rest) = id.strip_prefix("CVE-") else {
        return false;
    };
    let Some((year, number)) = rest.split_once('-') else {
        return false;
    };
    year.len() == 4
        && year.bytes().all(|b| b.is_ascii_digit())
        && number.len() >= 4
        && number.bytes().all(|b| b.is_ascii_digit())
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for EntityId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}
