//! Import of parsed catalogue entries into a design model.

use std::collections::BTreeSet;

use posture_model::{
    validate_model, DesignModel, EntityId, FindingCode, VulnKind, VulnMetadata, Vulnerability,
};

use crate::parse::CweEntry;

/// Result of a catalogue import: the updated model plus summary counts.
#[derive(Debug, Clone)]
pub struct CweImport {
    pub model: DesignModel,
    /// Entries that did not exist in the model before.
    pub added: usize,
    /// Entries that replaced an existing vulnerability (including
    /// placeholders created by earlier imports).
    pub updated: usize,
    /// Abstraction edges materialised from in-view `ChildOf` relations.
    pub edges: usize,
    /// Parent ids that resolve neither within the ingested set nor within
    /// the existing model; their edges are dropped.
    pub dangling_parents: BTreeSet<EntityId>,
}

#[derive(Debug, thiserror::Error)]
pub enum CweImportError {
    #[error("catalogue import would create an abstraction cycle among: {0}")]
    WouldCreateCycle(String),
}

impl CweImportError {
    pub fn code(&self) -> &'static str {
        match self {
            CweImportError::WouldCreateCycle(_) => "would-create-cycle",
        }
    }
}

/// Upserts every entry as a mechanism vulnerability, wiring `ChildOf`
/// relations as abstraction edges (child towards the higher abstraction).
/// Re-importing the same entries is a fixed point. If catalogue edges plus
/// existing model edges would form a cycle, the import is aborted and the
/// input model is left untouched.
pub fn import_cwe(model: &DesignModel, entries: &[CweEntry]) -> Result<CweImport, CweImportError> {
    let incoming: BTreeSet<&EntityId> = entries.iter().map(|e| &e.id).collect();
    let mut next = model.clone();
    let mut added = 0;
    let mut updated = 0;
    let mut edges = 0;
    let mut dangling_parents = BTreeSet::new();

    for entry in entries {
        let mut parents = BTreeSet::new();
        for parent in &entry.parents {
            if incoming.contains(parent) || model.vulnerabilities.contains_key(parent) {
                parents.insert(parent.clone());
            } else {
                dangling_parents.insert(parent.clone());
            }
        }
        edges += parents.len();

        let metadata = VulnMetadata {
            description: (!entry.description.is_empty()).then(|| entry.description.clone()),
            abstraction: (!entry.abstraction.is_empty()).then(|| entry.abstraction.clone()),
            ..VulnMetadata::default()
        };
        let vuln = Vulnerability {
            id: entry.id.clone(),
            kind: VulnKind::Mechanism,
            title: entry.name.clone(),
            avulns: parents,
            metadata: (!metadata.is_empty()).then_some(metadata),
        };
        if next.vulnerabilities.insert(entry.id.clone(), vuln).is_some() {
            updated += 1;
        } else {
            added += 1;
        }
    }

    let report = validate_model(&next);
    if let Some(cycle) = report
        .findings
        .iter()
        .find(|f| f.code == FindingCode::AbstractionCycle)
    {
        return Err(CweImportError::WouldCreateCycle(cycle.message.clone()));
    }

    Ok(CweImport {
        model: next,
        added,
        updated,
        edges,
        dangling_parents,
    })
}
