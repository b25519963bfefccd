//! Model mutation.
//!
//! [`mutate`] takes a model snapshot and a [`Change`], and returns a new
//! model with the change applied, or an error if applying it would break
//! validity. An error-free model stays error-free under every accepted
//! mutation; cycle checks run incrementally at the point of edge insertion.

use std::collections::BTreeSet;

use crate::dag;
use crate::entity::{DesignModel, Entity, EntityKind};
use crate::id::{EntityId, IdError};

/// A single mutation of the design model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Change {
    /// Add a new entity; rejected when the id is already taken in its kind.
    Insert(Entity),
    /// Add or replace an entity wholesale.
    Upsert(Entity),
    /// Remove an entity. Without `cascade`, removal is rejected while other
    /// entities still reference it; with `cascade`, those references are
    /// scrubbed.
    Delete {
        kind: EntityKind,
        id: EntityId,
        cascade: bool,
    },
    /// Add one membership edge to a mapping.
    Link(LinkChange),
    /// Remove one membership edge; removing an absent edge is a no-op.
    Unlink(LinkChange),
}

/// One edge in one of the model's mappings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkChange {
    /// TYPES: component `component` manifests type `type_id`.
    TypeToComponent {
        type_id: EntityId,
        component: EntityId,
    },
    /// CONTROLS: control `control` is assigned to `component`.
    ControlToComponent {
        control: EntityId,
        component: EntityId,
    },
    /// VULNS: vulnerability `vuln` affects type `type_id`.
    VulnToType { vuln: EntityId, type_id: EntityId },
    /// AVULNS: `parent` is a higher abstraction manifested by `vuln`.
    ParentToVuln { parent: EntityId, vuln: EntityId },
    /// RVULNS: rule `rule` applies to vulnerability `vuln`.
    VulnToRule { vuln: EntityId, rule: EntityId },
    /// RTYPES: rule `rule` applies to component type `type_id`.
    TypeToRule { type_id: EntityId, rule: EntityId },
    /// RCONTROLS: rule `rule` requires control `control`.
    ControlToRule { control: EntityId, rule: EntityId },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutateError {
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("would create cycle: {0}")]
    WouldCreateCycle(String),
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("malformed id: {0}")]
    MalformedId(#[from] IdError),
}

impl MutateError {
    pub fn code(&self) -> &'static str {
        match self {
            MutateError::DanglingReference(_) => "dangling-reference",
            MutateError::WouldCreateCycle(_) => "would-create-cycle",
            MutateError::DuplicateId(_) => "duplicate-id",
            MutateError::MalformedId(_) => "malformed-id",
        }
    }
}

/// Applies one change to a snapshot, returning the updated model.
pub fn mutate(model: &DesignModel, change: Change) -> Result<DesignModel, MutateError> {
    let mut next = model.clone();
    match change {
        Change::Insert(entity) => {
            if contains(&next, entity.kind(), entity.id()) {
                return Err(MutateError::DuplicateId(format!(
                    "{} `{}` already exists",
                    entity.kind(),
                    entity.id()
                )));
            }
            apply_upsert(&mut next, entity)?;
        }
        Change::Upsert(entity) => apply_upsert(&mut next, entity)?,
        Change::Delete { kind, id, cascade } => apply_delete(&mut next, kind, &id, cascade)?,
        Change::Link(link) => apply_link(&mut next, link)?,
        Change::Unlink(link) => apply_unlink(&mut next, link)?,
    }
    Ok(next)
}

fn contains(model: &DesignModel, kind: EntityKind, id: &EntityId) -> bool {
    match kind {
        EntityKind::Component => model.components.contains_key(id),
        EntityKind::ComponentType => model.component_types.contains_key(id),
        EntityKind::Vulnerability => model.vulnerabilities.contains_key(id),
        EntityKind::Control => model.controls.contains_key(id),
        EntityKind::Rule => model.rules.contains_key(id),
    }
}

fn require(model: &DesignModel, kind: EntityKind, id: &EntityId) -> Result<(), MutateError> {
    if contains(model, kind, id) {
        Ok(())
    } else {
        Err(MutateError::DanglingReference(format!(
            "no {kind} with id `{id}`"
        )))
    }
}

fn require_all(
    model: &DesignModel,
    kind: EntityKind,
    ids: &BTreeSet<EntityId>,
) -> Result<(), MutateError> {
    for id in ids {
        require(model, kind, id)?;
    }
    Ok(())
}

fn apply_upsert(model: &mut DesignModel, entity: Entity) -> Result<(), MutateError> {
    entity.id().check()?;
    match entity {
        Entity::Component(c) => {
            require_all(model, EntityKind::ComponentType, &c.types)?;
            require_all(model, EntityKind::Control, &c.controls)?;
            model.components.insert(c.id.clone(), c);
        }
        Entity::ComponentType(t) => {
            require_all(model, EntityKind::Vulnerability, &t.vulns)?;
            model.component_types.insert(t.id.clone(), t);
        }
        Entity::Vulnerability(v) => {
            for parent in &v.avulns {
                if parent == &v.id {
                    return Err(MutateError::WouldCreateCycle(format!(
                        "vulnerability `{}` cannot be its own abstraction",
                        v.id
                    )));
                }
                require(model, EntityKind::Vulnerability, parent)?;
            }
            // New edges may close a cycle only through the upserted node, so
            // checking reachability back to it from each parent suffices.
            let mut staged = model.clone();
            staged.vulnerabilities.insert(v.id.clone(), v.clone());
            for parent in &v.avulns {
                if dag::reaches(&staged, parent, &v.id) {
                    return Err(MutateError::WouldCreateCycle(format!(
                        "edge `{}` -> `{parent}` closes an abstraction cycle",
                        v.id
                    )));
                }
            }
            *model = staged;
        }
        Entity::Control(c) => {
            model.controls.insert(c.id.clone(), c);
        }
        Entity::Rule(r) => {
            require_all(model, EntityKind::Vulnerability, &r.rvulns)?;
            require_all(model, EntityKind::ComponentType, &r.rtypes)?;
            require_all(model, EntityKind::Control, &r.rcontrols)?;
            model.rules.insert(r.id.clone(), r);
        }
    }
    Ok(())
}

fn apply_delete(
    model: &mut DesignModel,
    kind: EntityKind,
    id: &EntityId,
    cascade: bool,
) -> Result<(), MutateError> {
    require(model, kind, id)?;

    let mut referrers: Vec<String> = Vec::new();
    match kind {
        EntityKind::Component | EntityKind::Rule => {}
        EntityKind::ComponentType => {
            referrers.extend(
                model
                    .components
                    .values()
                    .filter(|c| c.types.contains(id))
                    .map(|c| format!("component `{}`", c.id)),
            );
            referrers.extend(
                model
                    .rules
                    .values()
                    .filter(|r| r.rtypes.contains(id))
                    .map(|r| format!("rule `{}`", r.id)),
            );
        }
        EntityKind::Vulnerability => {
            referrers.extend(
                model
                    .component_types
                    .values()
                    .filter(|t| t.vulns.contains(id))
                    .map(|t| format!("component type `{}`", t.id)),
            );
            referrers.extend(
                model
                    .vulnerabilities
                    .values()
                    .filter(|v| &v.id != id && v.avulns.contains(id))
                    .map(|v| format!("vulnerability `{}`", v.id)),
            );
            referrers.extend(
                model
                    .rules
                    .values()
                    .filter(|r| r.rvulns.contains(id))
                    .map(|r| format!("rule `{}`", r.id)),
            );
        }
        EntityKind::Control => {
            referrers.extend(
                model
                    .components
                    .values()
                    .filter(|c| c.controls.contains(id))
                    .map(|c| format!("component `{}`", c.id)),
            );
            referrers.extend(
                model
                    .rules
                    .values()
                    .filter(|r| r.rcontrols.contains(id))
                    .map(|r| format!("rule `{}`", r.id)),
            );
        }
    }

    if !referrers.is_empty() && !cascade {
        return Err(MutateError::DanglingReference(format!(
            "{kind} `{id}` is still referenced by {}; delete with cascade to remove the references",
            referrers.join(", ")
        )));
    }

    match kind {
        EntityKind::Component => {
            model.components.remove(id);
        }
        EntityKind::ComponentType => {
            for c in model.components.values_mut() {
                c.types.remove(id);
            }
            for r in model.rules.values_mut() {
                r.rtypes.remove(id);
            }
            model.component_types.remove(id);
        }
        EntityKind::Vulnerability => {
            for t in model.component_types.values_mut() {
                t.vulns.remove(id);
            }
            for v in model.vulnerabilities.values_mut() {
                v.avulns.remove(id);
            }
            for r in model.rules.values_mut() {
                r.rvulns.remove(id);
            }
            model.vulnerabilities.remove(id);
        }
        EntityKind::Control => {
            for c in model.components.values_mut() {
                c.controls.remove(id);
            }
            for r in model.rules.values_mut() {
                r.rcontrols.remove(id);
            }
            model.controls.remove(id);
        }
        EntityKind::Rule => {
            model.rules.remove(id);
        }
    }
    Ok(())
}

fn endpoints(link: &LinkChange) -> [(EntityKind, &EntityId); 2] {
    match link {
        LinkChange::TypeToComponent { type_id, component } => [
            (EntityKind::ComponentType, type_id),
            (EntityKind::Component, component),
        ],
        LinkChange::ControlToComponent { control, component } => [
            (EntityKind::Control, control),
            (EntityKind::Component, component),
        ],
        LinkChange::VulnToType { vuln, type_id } => [
            (EntityKind::Vulnerability, vuln),
            (EntityKind::ComponentType, type_id),
        ],
        LinkChange::ParentToVuln { parent, vuln } => [
            (EntityKind::Vulnerability, parent),
            (EntityKind::Vulnerability, vuln),
        ],
        LinkChange::VulnToRule { vuln, rule } => {
            [(EntityKind::Vulnerability, vuln), (EntityKind::Rule, rule)]
        }
        LinkChange::TypeToRule { type_id, rule } => {
            [(EntityKind::ComponentType, type_id), (EntityKind::Rule, rule)]
        }
        LinkChange::ControlToRule { control, rule } => {
            [(EntityKind::Control, control), (EntityKind::Rule, rule)]
        }
    }
}

fn apply_link(model: &mut DesignModel, link: LinkChange) -> Result<(), MutateError> {
    for (kind, id) in endpoints(&link) {
        require(model, kind, id)?;
    }
    if let LinkChange::ParentToVuln { parent, vuln } = &link {
        // The new edge runs vuln -> parent; a path back from the parent to
        // the vulnerability (or a self-edge) would close a cycle.
        if dag::reaches(model, parent, vuln) {
            return Err(MutateError::WouldCreateCycle(format!(
                "edge `{vuln}` -> `{parent}` closes an abstraction cycle"
            )));
        }
    }
    match link {
        LinkChange::TypeToComponent { type_id, component } => {
            insert_into(model.components.get_mut(&component), |c| &mut c.types, type_id);
        }
        LinkChange::ControlToComponent { control, component } => {
            insert_into(model.components.get_mut(&component), |c| &mut c.controls, control);
        }
        LinkChange::VulnToType { vuln, type_id } => {
            insert_into(model.component_types.get_mut(&type_id), |t| &mut t.vulns, vuln);
        }
        LinkChange::ParentToVuln { parent, vuln } => {
            insert_into(model.vulnerabilities.get_mut(&vuln), |v| &mut v.avulns, parent);
        }
        LinkChange::VulnToRule { vuln, rule } => {
            insert_into(model.rules.get_mut(&rule), |r| &mut r.rvulns, vuln);
        }
        LinkChange::TypeToRule { type_id, rule } => {
            insert_into(model.rules.get_mut(&rule), |r| &mut r.rtypes, type_id);
        }
        LinkChange::ControlToRule { control, rule } => {
            insert_into(model.rules.get_mut(&rule), |r| &mut r.rcontrols, control);
        }
    }
    Ok(())
}

fn apply_unlink(model: &mut DesignModel, link: LinkChange) -> Result<(), MutateError> {
    for (kind, id) in endpoints(&link) {
        require(model, kind, id)?;
    }
    match link {
        LinkChange::TypeToComponent { type_id, component } => {
            remove_from(model.components.get_mut(&component), |c| &mut c.types, &type_id);
        }
        LinkChange::ControlToComponent { control, component } => {
            remove_from(model.components.get_mut(&component), |c| &mut c.controls, &control);
        }
        LinkChange::VulnToType { vuln, type_id } => {
            remove_from(model.component_types.get_mut(&type_id), |t| &mut t.vulns, &vuln);
        }
        LinkChange::ParentToVuln { parent, vuln } => {
            remove_from(model.vulnerabilities.get_mut(&vuln), |v| &mut v.avulns, &parent);
        }
        LinkChange::VulnToRule { vuln, rule } => {
            remove_from(model.rules.get_mut(&rule), |r| &mut r.rvulns, &vuln);
        }
        LinkChange::TypeToRule { type_id, rule } => {
            remove_from(model.rules.get_mut(&rule), |r| &mut r.rtypes, &type_id);
        }
        LinkChange::ControlToRule { control, rule } => {
            remove_from(model.rules.get_mut(&rule), |r| &mut r.rcontrols, &control);
        }
    }
    Ok(())
}

fn insert_into<T>(
    owner: Option<&mut T>,
    set: impl FnOnce(&mut T) -> &mut BTreeSet<EntityId>,
    id: EntityId,
) {
    // Endpoint existence was checked above.
    if let Some(owner) = owner {
        set(owner).insert(id);
    }
}

fn remove_from<T>(
    owner: Option<&mut T>,
    set: impl FnOnce(&mut T) -> &mut BTreeSet<EntityId>,
    id: &EntityId,
) {
    if let Some(owner) = owner {
        set(owner).remove(id);
    }
}
