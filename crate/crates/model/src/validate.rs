//! Model validation.
//!
//! Validation never fails: findings are data. A model with an empty error
//! list admits reasoning; warnings flag deliberate-but-unusual authoring
//! (rules that can never apply, rules demanding no controls).

use std::collections::BTreeSet;
use std::fmt;

use crate::dag;
use crate::entity::{DesignModel, EntityKind};
use crate::id::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FindingSeverity {
    Error,
    Warning,
}

impl fmt::Display for FindingSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FindingSeverity::Error => f.write_str("error"),
            FindingSeverity::Warning => f.write_str("warning"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FindingCode {
    AbstractionCycle,
    DanglingReference,
    DuplicateId,
    IdMismatch,
    MalformedId,
    InertRule,
    RuleNoControls,
}

impl FindingCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FindingCode::AbstractionCycle => "abstraction-cycle",
            FindingCode::DanglingReference => "dangling-reference",
            FindingCode::DuplicateId => "duplicate-id",
            FindingCode::IdMismatch => "id-mismatch",
            FindingCode::MalformedId => "malformed-id",
            FindingCode::InertRule => "inert-rule",
            FindingCode::RuleNoControls => "rule-no-controls",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single validation finding about one subject entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: FindingSeverity,
    pub code: FindingCode,
    pub subject: String,
    pub message: String,
}

impl Finding {
    pub fn error(code: FindingCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: FindingSeverity::Error,
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }

    pub fn warning(
        code: FindingCode,
        subject: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Finding {
            severity: FindingSeverity::Warning,
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {}",
            self.severity, self.code, self.subject, self.message
        )
    }
}

/// The outcome of validating a model, sorted deterministically (errors
/// first, then by code, subject and message).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn from_findings(mut findings: Vec<Finding>) -> Self {
        findings.sort_by(|a, b| {
            (a.severity, a.code, &a.subject, &a.message).cmp(&(
                b.severity,
                b.code,
                &b.subject,
                &b.message,
            ))
        });
        ValidationReport { findings }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == FindingSeverity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == FindingSeverity::Warning)
    }

    /// True when the model admits reasoning: no error findings. Warnings do
    /// not block.
    pub fn is_clean(&self) -> bool {
        self.errors().next().is_none()
    }
}

/// Checks referential integrity, id discipline, abstraction acyclicity and
/// rule applicability over a whole model.
pub fn validate_model(model: &DesignModel) -> ValidationReport {
    let mut findings = Vec::new();

    check_ids(model, &mut findings);
    check_references(model, &mut findings);

    for group in dag::cycle_groups(model) {
        let members: Vec<&str> = group.iter().map(EntityId::as_str).collect();
        let subject = members.first().copied().unwrap_or_default();
        findings.push(Finding::error(
            FindingCode::AbstractionCycle,
            subject,
            format!("abstraction cycle among: {}", members.join(", ")),
        ));
    }

    for (id, rule) in &model.rules {
        if rule.rvulns.is_empty() || rule.rtypes.is_empty() {
            let mut empty = Vec::new();
            if rule.rvulns.is_empty() {
                empty.push("rvulns");
            }
            if rule.rtypes.is_empty() {
                empty.push("rtypes");
            }
            findings.push(Finding::warning(
                FindingCode::InertRule,
                id.as_str(),
                format!("rule `{id}` can never apply: empty {}", empty.join(" and ")),
            ));
        }
        if rule.rcontrols.is_empty() {
            findings.push(Finding::warning(
                FindingCode::RuleNoControls,
                id.as_str(),
                format!("rule `{id}` requires no controls; any type match counts as mitigation"),
            ));
        }
    }

    ValidationReport::from_findings(findings)
}

fn check_ids(model: &DesignModel, findings: &mut Vec<Finding>) {
    let mut check = |kind: EntityKind, key: &EntityId, id: &EntityId| {
        if key != id {
            findings.push(Finding::error(
                FindingCode::IdMismatch,
                key.as_str(),
                format!("{kind} stored under key `{key}` declares id `{id}`"),
            ));
        }
        if let Err(err) = id.check() {
            findings.push(Finding::error(
                FindingCode::MalformedId,
                id.as_str(),
                err.to_string(),
            ));
        }
    };
    for (key, e) in &model.components {
        check(EntityKind::Component, key, &e.id);
    }
    for (key, e) in &model.component_types {
        check(EntityKind::ComponentType, key, &e.id);
    }
    for (key, e) in &model.vulnerabilities {
        check(EntityKind::Vulnerability, key, &e.id);
    }
    for (key, e) in &model.controls {
        check(EntityKind::Control, key, &e.id);
    }
    for (key, e) in &model.rules {
        check(EntityKind::Rule, key, &e.id);
    }
}

fn check_references(model: &DesignModel, findings: &mut Vec<Finding>) {
    let mut dangling = |subject: &EntityId, refs: &BTreeSet<EntityId>, kind: EntityKind, what: &str| {
        let resolves = |id: &EntityId| match kind {
            EntityKind::Component => model.components.contains_key(id),
            EntityKind::ComponentType => model.component_types.contains_key(id),
            EntityKind::Vulnerability => model.vulnerabilities.contains_key(id),
            EntityKind::Control => model.controls.contains_key(id),
            EntityKind::Rule => model.rules.contains_key(id),
        };
        for id in refs {
            if !resolves(id) {
                findings.push(Finding::error(
                    FindingCode::DanglingReference,
                    subject.as_str(),
                    format!("`{subject}` references unknown {kind} `{id}` in {what}"),
                ));
            }
        }
    };

    for (id, c) in &model.components {
        dangling(id, &c.types, EntityKind::ComponentType, "types");
        dangling(id, &c.controls, EntityKind::Control, "controls");
    }
    for (id, t) in &model.component_types {
        dangling(id, &t.vulns, EntityKind::Vulnerability, "vulns");
    }
    for (id, v) in &model.vulnerabilities {
        dangling(id, &v.avulns, EntityKind::Vulnerability, "avulns");
    }
    for (id, r) in &model.rules {
        dangling(id, &r.rvulns, EntityKind::Vulnerability, "rvulns");
        dangling(id, &r.rtypes, EntityKind::ComponentType, "rtypes");
        dangling(id, &r.rcontrols, EntityKind::Control, "rcontrols");
    }
}
