//! The CVE API client: live HTTP with rate limiting, caching and optional
//! fixture recording, or offline replay of recorded fixtures.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime};

use serde::{Deserialize, Serialize};

use crate::cache::{ResponseCache, DEFAULT_TTL};
use crate::fingerprint::{fingerprint, normalized_query};
use crate::rate::RateLimiter;
use crate::response::{parse_page, to_record};
use crate::types::{CveRecord, NvdError, QuerySpec};

pub const DEFAULT_BASE_URL: &str = "https://services.nvd.nist.gov/rest/json/cves/2.0";

/// Environment variable carrying the API key. Without it the client uses
/// the stricter anonymous rate budget.
pub const API_KEY_ENV: &str = "NVD_API_KEY";

const FIXTURE_MANIFEST: &str = "manifest.json";

/// Where responses come from.
#[derive(Debug, Clone)]
pub enum Transport {
    /// HTTPS against the API.
    Live,
    /// Replay of recorded response bodies from a fixture directory.
    Fixture(PathBuf),
}

/// Maps query fingerprints to recorded response files.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub version: u32,
    pub entries: Vec<FixtureEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub fingerprint: String,
    pub file: String,
    /// The normalised query, kept so fixtures are self-describing.
    pub query: String,
}

pub struct NvdClient {
    transport: Transport,
    base_url: String,
    api_key: Option<String>,
    limiter: RateLimiter,
    cache: Option<ResponseCache>,
    record_dir: Option<PathBuf>,
}

impl NvdClient {
    /// Live client; picks up the API key (and the matching rate budget)
    /// from the environment.
    pub fn live() -> Self {
        let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        let limiter = if api_key.is_some() {
            RateLimiter::keyed_default()
        } else {
            RateLimiter::public_default()
        };
        NvdClient {
            transport: Transport::Live,
            base_url: DEFAULT_BASE_URL.to_string(),
            api_key,
            limiter,
            cache: None,
            record_dir: None,
        }
    }

    /// Offline client replaying recorded fixtures.
    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        NvdClient {
            transport: Transport::Fixture(dir.into()),
            base_url: DEFAULT_BASE_URL.to_string(),
            api_key: None,
            limiter: RateLimiter::public_default(),
            cache: None,
            record_dir: None,
        }
    }

    pub fn with_base_url(mut self, base_url: impl Into<String>) -> Self {
        self.base_url = base_url.into();
        self
    }

    pub fn with_cache(mut self, dir: impl Into<PathBuf>, ttl: Option<Duration>) -> Self {
        self.cache = Some(ResponseCache::new(dir, ttl.unwrap_or(DEFAULT_TTL)));
        self
    }

    pub fn with_rate_budget(mut self, budget: usize, window: Duration) -> Self {
        self.limiter = RateLimiter::new(budget, window);
        self
    }

    /// In live mode, write every page body (and a manifest entry) under
    /// `dir`, producing a replayable fixture.
    pub fn with_record_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.record_dir = Some(dir.into());
        self
    }

    /// Fetches the complete paginated result set for the query, applying
    /// the CWE filter client-side as well (recorded fixtures replay
    /// whatever traffic they captured). Results keep server order.
    pub fn fetch_cves(&mut self, spec: &QuerySpec) -> Result<Vec<CveRecord>, NvdError> {
        let mut records = Vec::new();
        let mut start_index = spec.start_index;
        loop {
            let body = self.fetch_page_body(spec, start_index)?;
            let page = parse_page(&body)?;
            for item in &page.vulnerabilities {
                records.push(to_record(item, &spec.cpe)?);
            }
            let advanced = page.results_per_page.max(page.vulnerabilities.len() as u32);
            let next = page.start_index.saturating_add(advanced);
            if next >= page.total_results {
                break;
            }
            if advanced == 0 {
                return Err(NvdError::MalformedResponse {
                    message: format!(
                        "server reports {} total results but returned an empty page at index {}",
                        page.total_results, page.start_index
                    ),
                    body,
                });
            }
            start_index = next;
        }
        if let Some(filter) = &spec.cwe_filter {
            records.retain(|r| r.cwe_ids.contains(filter));
        }
        Ok(records)
    }

    fn fetch_page_body(&mut self, spec: &QuerySpec, start_index: u32) -> Result<String, NvdError> {
        let fp = fingerprint(spec, start_index);
        match &self.transport {
            Transport::Fixture(dir) => {
                let dir = dir.clone();
                self.read_fixture(&dir, &fp, spec, start_index)
            }
            Transport::Live => {
                if let Some(cache) = &self.cache {
                    if let Some(hit) = cache.get(&fp, SystemTime::now()) {
                        return Ok(hit);
                    }
                }
                let body = self.request_live(spec, start_index)?;
                if let Some(cache) = &self.cache {
                    // Cache failures must not fail the fetch.
                    let _ = cache.put(&fp, &body, SystemTime::now());
                }
                if let Some(dir) = self.record_dir.clone() {
                    self.record_fixture(&dir, &fp, spec, start_index, &body)?;
                }
                Ok(body)
            }
        }
    }

    fn request_live(&mut self, spec: &QuerySpec, start_index: u32) -> Result<String, NvdError> {
        if let Some(delay) = self.limiter.required_delay(Instant::now()) {
            std::thread::sleep(delay);
        }
        self.limiter.record(Instant::now());

        let mut request = ureq::get(&self.base_url)
            .query("cpeName", &spec.cpe)
            .query("resultsPerPage", &spec.results_per_page.to_string())
            .query("startIndex", &start_index.to_string());
        if let Some(cwe) = &spec.cwe_filter {
            request = request.query("cweId", cwe.as_str());
        }
        if let Some(key) = &self.api_key {
            request = request.set("apiKey", key);
        }

        match request.call() {
            Ok(response) => response
                .into_string()
                .map_err(|e| NvdError::TransportFailure(e.to_string())),
            Err(ureq::Error::Status(status, response)) if status == 429 || status == 403 => {
                let retry_after_secs = response
                    .header("Retry-After")
                    .and_then(|v| v.parse().ok())
                    .unwrap_or(30);
                Err(NvdError::RateLimited { retry_after_secs })
            }
            Err(ureq::Error::Status(status, _)) => {
                Err(NvdError::TransportFailure(format!("HTTP status {status}")))
            }
            Err(e) => Err(NvdError::TransportFailure(e.to_string())),
        }
    }

    fn read_fixture(
        &self,
        dir: &Path,
        fp: &str,
        spec: &QuerySpec,
        start_index: u32,
    ) -> Result<String, NvdError> {
        let missing = || NvdError::FixtureMissing {
            fingerprint: fp.to_string(),
            query: normalized_query(spec, start_index),
        };
        let manifest = load_manifest(dir).map_err(|_| missing())?;
        let entry = manifest
            .entries
            .iter()
            .find(|e| e.fingerprint == fp)
            .ok_or_else(missing)?;
        std::fs::read_to_string(dir.join(&entry.file)).map_err(|_| missing())
    }

    fn record_fixture(
        &self,
        dir: &Path,
        fp: &str,
        spec: &QuerySpec,
        start_index: u32,
        body: &str,
    ) -> Result<(), NvdError> {
        let io_err = |e: std::io::Error| NvdError::TransportFailure(format!("record: {e}"));
        std::fs::create_dir_all(dir).map_err(io_err)?;
        let file = format!("{}.json", &fp[..16.min(fp.len())]);
        std::fs::write(dir.join(&file), body).map_err(io_err)?;

        let mut manifest = load_manifest(dir).unwrap_or_default();
        manifest.version = 1;
        manifest.entries.retain(|e| e.fingerprint != fp);
        manifest.entries.push(FixtureEntry {
            fingerprint: fp.to_string(),
            file,
            query: normalized_query(spec, start_index),
        });
        manifest.entries.sort_by(|a, b| a.query.cmp(&b.query));
        let bytes =
            serde_json::to_vec_pretty(&manifest).map_err(|e| NvdError::TransportFailure(e.to_string()))?;
        std::fs::write(dir.join(FIXTURE_MANIFEST), bytes).map_err(io_err)?;
        Ok(())
    }
}

fn load_manifest(dir: &Path) -> std::io::Result<FixtureManifest> {
    let text = std::fs::read_to_string(dir.join(FIXTURE_MANIFEST))?;
    serde_json::from_str(&text).map_err(std::io::Error::other)
}
