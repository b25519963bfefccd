//! Client for the NVD CVE API 2.0 and import of its records into a design
//! model.
//!
//! Retrieval is CPE-scoped (optionally narrowed to one CWE), paginated via
//! `startIndex`/`resultsPerPage`, rate limited to the public or keyed
//! budget, cached by query fingerprint, and replayable offline from
//! recorded fixtures (verbatim response bodies plus a manifest keyed by
//! the same fingerprints the live client computes).

mod cache;
mod client;
mod fingerprint;
mod import;
mod rate;
mod response;
mod types;

pub use cache::{CacheEntry, ResponseCache, DEFAULT_TTL};
pub use client::{
    FixtureEntry, FixtureManifest, NvdClient, Transport, API_KEY_ENV, DEFAULT_BASE_URL,
};
pub use fingerprint::{fingerprint, normalized_query};
pub use import::{import_cves, CveImport};
pub use rate::{RateLimiter, KEYED_BUDGET, PUBLIC_BUDGET, WINDOW};
pub use types::{CveRecord, NvdError, QuerySpec, DEFAULT_RESULTS_PER_PAGE};
