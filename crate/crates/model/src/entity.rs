//! The design-model entities and their mappings.
//!
//! A [`DesignModel`] is an immutable value: mutation goes through
//! [`crate::mutate`] and returns a new model, so any number of readers can
//! share a snapshot. All collections are keyed/ordered by id, which fixes a
//! lexicographic iteration order for every report derived from a model.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::id::EntityId;

/// Current version of the model schema, stored in every model and document.
pub const SCHEMA_VERSION: u32 = 1;

/// A design constituent. Its `types` decide which vulnerabilities apply to
/// it; its `controls` are the safeguards the design assigns to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: EntityId,
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub types: BTreeSet<EntityId>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub controls: BTreeSet<EntityId>,
}

/// How a component type entered the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeOrigin {
    #[default]
    Manual,
    NvdImport,
    CweImport,
}

/// A classification of components, optionally identified by a CPE 2.3
/// string. `vulns` maps the type to the vulnerabilities affecting it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentType {
    pub id: EntityId,
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub vulns: BTreeSet<EntityId>,
    #[serde(default)]
    pub origin: TypeOrigin,
}

/// Whether a vulnerability is a conceptual weakness class or a concrete
/// disclosed flaw. Reasoning never branches on this; it exists for
/// reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VulnKind {
    Mechanism,
    Implementation,
}

/// Pass-through descriptive data carried by a vulnerability. Never consulted
/// by reasoning.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VulnMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub severity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    /// Catalogue abstraction-level label (Pillar/Class/Base/Variant).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstraction: Option<String>,
    /// Set on mechanism entries created as targets of abstraction edges
    /// before the catalogue itself was imported.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub placeholder: bool,
}

impl VulnMetadata {
    pub fn is_empty(&self) -> bool {
        *self == VulnMetadata::default()
    }
}

/// A vulnerability at any level of abstraction. `avulns` holds the ids of
/// the vulnerabilities of higher abstraction that this one manifests; over
/// the whole model those edges must form a DAG (validated, never assumed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vulnerability {
    pub id: EntityId,
    pub kind: VulnKind,
    pub title: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub avulns: BTreeSet<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<VulnMetadata>,
}

impl Vulnerability {
    /// The vulnerability's kind as inferred from its id scheme: CVE ids are
    /// implementation vulnerabilities, everything else defaults to
    /// mechanism. Callers may override the inference.
    pub fn kind_from_id(id: &EntityId) -> VulnKind {
        match id.scheme() {
            crate::id::IdScheme::Cve => VulnKind::Implementation,
            _ => VulnKind::Mechanism,
        }
    }
}

/// A security control: a safeguard that rules can require.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub id: EntityId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// Codified mitigation knowledge: for components manifesting one of
/// `rtypes`, the presence of every control in `rcontrols` mitigates each
/// vulnerability in `rvulns`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: EntityId,
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub rvulns: BTreeSet<EntityId>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub rtypes: BTreeSet<EntityId>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub rcontrols: BTreeSet<EntityId>,
}

/// Root container for a design model: all entities plus the mappings
/// between them, closed-world (every referenced id must resolve inside the
/// model for the model to validate).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignModel {
    pub schema_version: u32,
    pub components: BTreeMap<EntityId, Component>,
    pub component_types: BTreeMap<EntityId, ComponentType>,
    pub vulnerabilities: BTreeMap<EntityId, Vulnerability>,
    pub controls: BTreeMap<EntityId, Control>,
    pub rules: BTreeMap<EntityId, Rule>,
}

impl Default for DesignModel {
    fn default() -> Self {
        DesignModel {
            schema_version: SCHEMA_VERSION,
            components: BTreeMap::new(),
            component_types: BTreeMap::new(),
            vulnerabilities: BTreeMap::new(),
            controls: BTreeMap::new(),
            rules: BTreeMap::new(),
        }
    }
}

impl DesignModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
            && self.component_types.is_empty()
            && self.vulnerabilities.is_empty()
            && self.controls.is_empty()
            && self.rules.is_empty()
    }
}

/// One of the five entity kinds, used to address entities generically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntityKind {
    Component,
    ComponentType,
    Vulnerability,
    Control,
    Rule,
}

impl std::fmt::Display for EntityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EntityKind::Component => "component",
            EntityKind::ComponentType => "component-type",
            EntityKind::Vulnerability => "vulnerability",
            EntityKind::Control => "control",
            EntityKind::Rule => "rule",
        };
        f.write_str(s)
    }
}

/// An entity of any kind, for generic insert/upsert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entity {
    Component(Component),
    ComponentType(ComponentType),
    Vulnerability(Vulnerability),
    Control(Control),
    Rule(Rule),
}

impl Entity {
    pub fn kind(&self) -> EntityKind {
        match self {
            Entity::Component(_) => EntityKind::Component,
            Entity::ComponentType(_) => EntityKind::ComponentType,
            Entity::Vulnerability(_) => EntityKind::Vulnerability,
            Entity::Control(_) => EntityKind::Control,
            Entity::Rule(_) => EntityKind::Rule,
        }
    }

    pub fn id(&self) -> &EntityId {
        match self {
            Entity::Component(e) => &e.id,
            Entity::ComponentType(e) => &e.id,
            Entity::Vulnerability(e) => &e.id,
            Entity::Control(e) => &e.id,
            Entity::Rule(e) => &e.id,
        }
    }
}
