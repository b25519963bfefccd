//! Import of fetched CVE records into a design model.

use posture_model::{
    validate_model, DesignModel, EntityId, FindingCode, VulnKind, VulnMetadata, Vulnerability,
};

use crate::types::{CveRecord, NvdError};

/// Result of importing records onto a component type.
#[derive(Debug, Clone)]
pub struct CveImport {
    pub model: DesignModel,
    /// Records that created a new vulnerability.
    pub added: usize,
    /// Records that replaced an existing vulnerability of the same id.
    pub updated: usize,
    /// Mechanism placeholders created for CWE ids the model did not hold
    /// yet; a later catalogue import fills them in.
    pub placeholders: usize,
    /// New VULNS links onto the component type.
    pub linked: usize,
}

/// Each record becomes an implementation vulnerability whose abstraction
/// edges point at its associated CWEs, and the queried component type gains
/// the record in its vulnerability set. Importing the same records again is
/// a fixed point.
pub fn import_cves(
    model: &DesignModel,
    records: &[CveRecord],
    component_type: &EntityId,
) -> Result<CveImport, NvdError> {
    if !model.component_types.contains_key(component_type) {
        return Err(NvdError::UnknownComponentType(component_type.clone()));
    }

    let mut next = model.clone();
    let mut added = 0;
    let mut updated = 0;
    let mut placeholders = 0;

    for record in records {
        for cwe in &record.cwe_ids {
            if !next.vulnerabilities.contains_key(cwe) {
                next.vulnerabilities.insert(
                    cwe.clone(),
                    Vulnerability {
                        id: cwe.clone(),
                        kind: VulnKind::Mechanism,
                        title: cwe.to_string(),
                        avulns: Default::default(),
                        metadata: Some(VulnMetadata {
                            placeholder: true,
                            ..VulnMetadata::default()
                        }),
                    },
                );
                placeholders += 1;
            }
        }

        let metadata = VulnMetadata {
            description: (!record.description.is_empty()).then(|| record.description.clone()),
            severity: record.severity.clone(),
            source_url: Some(record.source_url.clone()),
            ..VulnMetadata::default()
        };
        let vuln = Vulnerability {
            id: record.id.clone(),
            kind: VulnKind::Implementation,
            title: record.id.to_string(),
            avulns: record.cwe_ids.clone(),
            metadata: (!metadata.is_empty()).then_some(metadata),
        };
        if next.vulnerabilities.insert(record.id.clone(), vuln).is_some() {
            updated += 1;
        } else {
            added += 1;
        }
    }

    let target = next
        .component_types
        .get_mut(component_type)
        .expect("checked above");
    let mut linked = 0;
    for record in records {
        if target.vulns.insert(record.id.clone()) {
            linked += 1;
        }
    }

    // CVE records have no incoming abstraction edges, so cycles cannot
    // arise from well-formed imports; guard anyway rather than hand the
    // reasoner a cyclic graph.
    if let Some(cycle) = validate_model(&next)
        .findings
        .iter()
        .find(|f| f.code == FindingCode::AbstractionCycle)
    {
        return Err(NvdError::ImportCycle(cycle.message.clone()));
    }

    Ok(CveImport {
        model: next,
        added,
        updated,
        placeholders,
        linked,
    })
}
