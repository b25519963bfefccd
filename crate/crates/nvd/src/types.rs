//! Query specification and record types for the CVE API.

use std::collections::BTreeSet;

use posture_model::{Cpe, EntityId, IdScheme};
use serde::{Deserialize, Serialize};

/// Default page size requested from the API.
pub const DEFAULT_RESULTS_PER_PAGE: u32 = 2000;

/// One CVE as retrieved from the vulnerability database.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CveRecord {
    pub id: EntityId,
    pub description: String,
    /// Canonical CWE ids from the record's weakness enumeration; values
    /// like `NVD-CWE-noinfo` are normalised away.
    pub cwe_ids: BTreeSet<EntityId>,
    /// The CPE the query asked about.
    pub matched_cpe: String,
    /// Pass-through severity label, when the record carries metrics.
    pub severity: Option<String>,
    pub source_url: String,
}

/// A CPE-scoped query, optionally narrowed to one weakness, with paging
/// window parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    pub cpe: String,
    pub cwe_filter: Option<EntityId>,
    pub start_index: u32,
    pub results_per_page: u32,
}

impl QuerySpec {
    /// Validates the CPE (must be a CPE 2.3 formatted string) and the
    /// optional CWE filter (must be canonical).
    pub fn new(cpe: &str, cwe_filter: Option<&str>) -> Result<Self, NvdError> {
        Cpe::parse(cpe).map_err(|e| NvdError::InvalidQuery(format!("cpe `{cpe}`: {e}")))?;
        let cwe_filter = cwe_filter
            .map(|c| {
                let id = EntityId::new(c)
                    .map_err(|e| NvdError::InvalidQuery(format!("cwe filter: {e}")))?;
                if id.scheme() != IdScheme::Cwe {
                    return Err(NvdError::InvalidQuery(format!(
                        "cwe filter `{c}` is not a CWE id"
                    )));
                }
                Ok(id)
            })
            .transpose()?;
        Ok(QuerySpec {
            cpe: cpe.to_string(),
            cwe_filter,
            start_index: 0,
            results_per_page: DEFAULT_RESULTS_PER_PAGE,
        })
    }

    pub fn with_page(mut self, start_index: u32, results_per_page: u32) -> Self {
        self.start_index = start_index;
        self.results_per_page = results_per_page;
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NvdError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("rate limited by the API; retry after {retry_after_secs}s")]
    RateLimited { retry_after_secs: u64 },
    #[error("transport failure: {0}")]
    TransportFailure(String),
    /// The response body is preserved for diagnosis.
    #[error("malformed response: {message}")]
    MalformedResponse { message: String, body: String },
    #[error("no fixture recorded for query `{query}` (fingerprint {fingerprint})")]
    FixtureMissing { fingerprint: String, query: String },
    #[error("no component type with id `{0}`")]
    UnknownComponentType(EntityId),
    #[error("import would create an abstraction cycle: {0}")]
    ImportCycle(String),
}

impl NvdError {
    pub fn code(&self) -> &'static str {
        match self {
            NvdError::InvalidQuery(_) => "invalid-query",
            NvdError::RateLimited { .. } => "rate-limited",
            NvdError::TransportFailure(_) => "transport-failure",
            NvdError::MalformedResponse { .. } => "malformed-response",
            NvdError::FixtureMissing { .. } => "fixture-missing",
            NvdError::UnknownComponentType(_) => "unknown-component-type",
            NvdError::ImportCycle(_) => "would-create-cycle",
        }
    }
}
