//! Independent naive evaluator: a direct transcription of the recursive
//! mitigation definitions, with no memoisation and no shared code with the
//! implementation under test.

use std::collections::BTreeSet;

use posture_model::{DesignModel, EntityId};

pub fn mitigated_v(model: &DesignModel, vuln: &EntityId, component: &EntityId) -> bool {
    let Some(c) = model.components.get(component) else {
        return false;
    };
    model.rules.values().any(|r| {
        r.rtypes.iter().any(|t| c.types.contains(t))
            && r.rvulns.contains(vuln)
            && r.rcontrols.iter().all(|s| c.controls.contains(s))
    })
}

pub fn mitigated(model: &DesignModel, vuln: &EntityId, component: &EntityId) -> bool {
    if mitigated_v(model, vuln, component) {
        return true;
    }
    let Some(v) = model.vulnerabilities.get(vuln) else {
        return false;
    };
    !v.avulns.is_empty() && v.avulns.iter().all(|p| mitigated(model, p, component))
}

pub fn unmitigated_set(model: &DesignModel, component: &EntityId) -> BTreeSet<EntityId> {
    let Some(c) = model.components.get(component) else {
        return BTreeSet::new();
    };
    c.types
        .iter()
        .filter_map(|t| model.component_types.get(t))
        .flat_map(|t| t.vulns.iter())
        .filter(|v| !mitigated(model, v, component))
        .cloned()
        .collect()
}

pub fn property_holds(model: &DesignModel) -> bool {
    model
        .components
        .keys()
        .all(|c| unmitigated_set(model, c).is_empty())
}
