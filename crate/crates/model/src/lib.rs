//! Core data model for design-time vulnerability posture.
//!
//! A design model holds components, component types, vulnerabilities,
//! security controls and mitigation rules, together with the mappings
//! between them: which types a component manifests, which vulnerabilities
//! affect a type, which higher abstractions a vulnerability manifests, and
//! which controls a rule demands for which vulnerability/type combinations.
//!
//! This crate owns the entities, the identifier discipline (canonical
//! CWE/CVE/CPE forms), model validation and model mutation. Reasoning over
//! a model lives in `posture-reasoner`; (de)serialisation in
//! `posture-persistence`.

pub mod cpe;
mod dag;
pub mod entity;
pub mod id;
pub mod mutate;
pub mod validate;

pub use cpe::{Cpe, CpeAttribute, CpeError};
pub use entity::{
    Component, ComponentType, Control, DesignModel, Entity, EntityKind, Rule, TypeOrigin,
    VulnKind, VulnMetadata, Vulnerability, SCHEMA_VERSION,
};
pub use id::{EntityId, IdError, IdScheme};
pub use mutate::{mutate, Change, LinkChange, MutateError};
pub use validate::{validate_model, Finding, FindingCode, FindingSeverity, ValidationReport};
