//! Content addressing for queries.
//!
//! A page request is identified by the SHA-256 of its normalised query
//! string: the API parameters in alphabetical order, unencoded. The same
//! fingerprint keys the response cache and the fixture manifest, so a
//! recorded fixture replays exactly the requests the live client would
//! make.

use sha2::{Digest, Sha256};

use crate::types::QuerySpec;

/// The normalised query string for one page of a query.
pub fn normalized_query(spec: &QuerySpec, start_index: u32) -> String {
    let mut query = format!("cpeName={}", spec.cpe);
    if let Some(cwe) = &spec.cwe_filter {
        query.push_str(&format!("&cweId={cwe}"));
    }
    query.push_str(&format!(
        "&resultsPerPage={}&startIndex={start_index}",
        spec.results_per_page
    ));
    query
}

/// Hex SHA-256 of the normalised query string.
pub fn fingerprint(spec: &QuerySpec, start_index: u32) -> String {
    let digest = Sha256::digest(normalized_query(spec, start_index).as_bytes());
    hex_encode(&digest)
}

fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
