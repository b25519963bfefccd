//! The on-disk document shape: five entity sections, each a list of records
//! sorted by id, with mappings inlined as id-reference arrays.

use posture_model::{
    Component, ComponentType, Control, DesignModel, EntityKind, Finding, FindingCode, Rule,
    Vulnerability, SCHEMA_VERSION,
};
use serde::{Deserialize, Serialize};

/// A design model as persisted. Converting a model to a document and back
/// is lossless; converting a document to a model drops nothing but folds
/// duplicate ids (last record wins) and reports them as findings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema_version: u32,
    #[serde(default)]
    pub components: Vec<Component>,
    #[serde(default)]
    pub component_types: Vec<ComponentType>,
    #[serde(default)]
    pub vulnerabilities: Vec<Vulnerability>,
    #[serde(default)]
    pub controls: Vec<Control>,
    #[serde(default)]
    pub rules: Vec<Rule>,
}

impl ModelDocument {
    pub fn empty() -> Self {
        ModelDocument {
            schema_version: SCHEMA_VERSION,
            components: Vec::new(),
            component_types: Vec::new(),
            vulnerabilities: Vec::new(),
            controls: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn from_model(model: &DesignModel) -> Self {
        ModelDocument {
            schema_version: model.schema_version,
            components: model.components.values().cloned().collect(),
            component_types: model.component_types.values().cloned().collect(),
            vulnerabilities: model.vulnerabilities.values().cloned().collect(),
            controls: model.controls.values().cloned().collect(),
            rules: model.rules.values().cloned().collect(),
        }
    }

    /// Builds the keyed model. Ids duplicated within a section come back as
    /// `duplicate-id` findings so a loader can surface them.
    pub fn into_model(self) -> (DesignModel, Vec<Finding>) {
        let mut model = DesignModel {
            schema_version: self.schema_version,
            ..DesignModel::new()
        };
        let mut findings = Vec::new();
        let mut dup = |kind: EntityKind, id: &posture_model::EntityId| {
            findings.push(Finding::error(
                FindingCode::DuplicateId,
                id.as_str(),
                format!("document declares {kind} `{id}` more than once"),
            ));
        };
        for e in self.components {
            if model.components.insert(e.id.clone(), e.clone()).is_some() {
                dup(EntityKind::Component, &e.id);
            }
        }
        for e in self.component_types {
            if model.component_types.insert(e.id.clone(), e.clone()).is_some() {
                dup(EntityKind::ComponentType, &e.id);
            }
        }
        for e in self.vulnerabilities {
            if model.vulnerabilities.insert(e.id.clone(), e.clone()).is_some() {
                dup(EntityKind::Vulnerability, &e.id);
            }
        }
        for e in self.controls {
            if model.controls.insert(e.id.clone(), e.clone()).is_some() {
                dup(EntityKind::Control, &e.id);
            }
        }
        for e in self.rules {
            if model.rules.insert(e.id.clone(), e.clone()).is_some() {
                dup(EntityKind::Rule, &e.id);
            }
        }
        (model, findings)
    }
}
