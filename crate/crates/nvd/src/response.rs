//! Decoding of CVE API 2.0 response bodies into [`CveRecord`]s.

use std::collections::BTreeSet;

use posture_model::{EntityId, IdScheme};
use serde::Deserialize;

use crate::types::{CveRecord, NvdError};

#[derive(Debug, Deserialize)]
pub(crate) struct ApiResponse {
    #[serde(rename = "resultsPerPage")]
    pub results_per_page: u32,
    #[serde(rename = "startIndex")]
    pub start_index: u32,
    #[serde(rename = "totalResults")]
    pub total_results: u32,
    #[serde(default)]
    pub vulnerabilities: Vec<VulnerabilityItem>,
}

#[derive(Debug, Deserialize)]
pub(crate) struct VulnerabilityItem {
    pub cve: CveJson,
}

#[derive(Debug, Deserialize)]
pub(crate) struct CveJson {
    pub id: String,
    #[serde(default)]
    pub descriptions: Vec<LangString>,
    #[serde(default)]
    pub weaknesses: Vec<WeaknessJson>,
    #[serde(default)]
    pub metrics: Option<MetricsJson>,
}

#[derive(Debug, Deserialize)]
pub(crate) struct LangString {
    #[serde(default)]
    pub lang: String,
    pub value: String,
}

#[derive(Debug, Deserialize)]
pub(crate) struct WeaknessJson {
    #[serde(default)]
    pub description: Vec<LangString>,
}

#[derive(Debug, Default, Deserialize)]
pub(crate) struct MetricsJson {
    #[serde(rename = "cvssMetricV31", default)]
    pub v31: Vec<MetricV3>,
    #[serde(rename = "cvssMetricV30", default)]
    pub v30: Vec<MetricV3>,
    #[serde(rename = "cvssMetricV2", default)]
    pub v2: Vec<MetricV2>,
}

#[derive(Debug, Deserialize)]
pub(crate) struct MetricV3 {
    #[serde(rename = "cvssData")]
    pub cvss_data: CvssData,
}

#[derive(Debug, Deserialize)]
pub(crate) struct CvssData {
    #[serde(rename = "baseSeverity")]
    pub base_severity: String,
}

#[derive(Debug, Deserialize)]
pub(crate) struct MetricV2 {
    #[serde(rename = "baseSeverity", default)]
    pub base_severity: Option<String>,
}

pub(crate) fn parse_page(body: &str) -> Result<ApiResponse, NvdError> {
    serde_json::from_str(body).map_err(|e| NvdError::MalformedResponse {
        message: e.to_string(),
        body: body.to_string(),
    })
}

pub(crate) fn to_record(item: &VulnerabilityItem, matched_cpe: &str) -> Result<CveRecord, NvdError> {
    let cve = &item.cve;
    let id = EntityId::new(&cve.id).map_err(|e| NvdError::MalformedResponse {
        message: format!("record id: {e}"),
        body: cve.id.clone(),
    })?;
    if id.scheme() != IdScheme::Cve {
        return Err(NvdError::MalformedResponse {
            message: format!("record id `{id}` is not a CVE id"),
            body: cve.id.clone(),
        });
    }

    let description = cve
        .descriptions
        .iter()
        .find(|d| d.lang == "en")
        .or_else(|| cve.descriptions.first())
        .map(|d| d.value.clone())
        .unwrap_or_default();

    // Union over every weakness source; non-CWE markers (NVD-CWE-noinfo,
    // NVD-CWE-Other) normalise to nothing.
    let cwe_ids: BTreeSet<EntityId> = cve
        .weaknesses
        .iter()
        .flat_map(|w| w.description.iter())
        .filter_map(|d| EntityId::new(&d.value).ok())
        .filter(|candidate| candidate.scheme() == IdScheme::Cwe)
        .collect();

    let severity = cve.metrics.as_ref().and_then(|m| {
        m.v31
            .first()
            .or_else(|| m.v30.first())
            .map(|v3| v3.cvss_data.base_severity.clone())
            .or_else(|| m.v2.first().and_then(|v2| v2.base_severity.clone()))
    });

    let source_url = format!("https://nvd.nist.gov/vuln/detail/{id}");
    Ok(CveRecord {
        id,
        description,
        cwe_ids,
        matched_cpe: matched_cpe.to_string(),
        severity,
        source_url,
    })
}
