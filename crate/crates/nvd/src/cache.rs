//! Content-addressed response cache with a time-to-live.
//!
//! One file per query fingerprint, holding the retrieval time and the raw
//! response payload. Writes go through a temp file and rename, so
//! concurrent readers never see a torn entry.

use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub const DEFAULT_TTL: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub fingerprint: String,
    /// Seconds since the Unix epoch at retrieval time.
    pub retrieved_at: u64,
    /// Verbatim response body.
    pub payload: String,
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
    ttl: Duration,
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>, ttl: Duration) -> Self {
        ResponseCache {
            dir: dir.into(),
            ttl,
        }
    }

    fn entry_path(&self, fingerprint: &str) -> PathBuf {
        self.dir.join(format!("{fingerprint}.json"))
    }

    /// Returns the cached payload when present and fresh. Unreadable or
    /// stale entries are treated as misses.
    pub fn get(&self, fingerprint: &str, now: SystemTime) -> Option<String> {
        let text = std::fs::read_to_string(self.entry_path(fingerprint)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        let age = now
            .duration_since(UNIX_EPOCH + Duration::from_secs(entry.retrieved_at))
            .ok()?;
        (age <= self.ttl).then_some(entry.payload)
    }

    pub fn put(&self, fingerprint: &str, payload: &str, now: SystemTime) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let entry = CacheEntry {
            fingerprint: fingerprint.to_string(),
            retrieved_at: now
                .duration_since(UNIX_EPOCH)
                .unwrap_or(Duration::ZERO)
                .as_secs(),
            payload: payload.to_string(),
        };
        let bytes = serde_json::to_vec(&entry)?;
        write_atomic(&self.entry_path(fingerprint), &bytes)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
