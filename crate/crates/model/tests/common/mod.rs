//! Shared builders and independent oracles for model tests.

use std::collections::BTreeSet;

use posture_model::{
    mutate, Change, Component, ComponentType, Control, DesignModel, Entity, EntityId, Rule,
    TypeOrigin, VulnKind, Vulnerability,
};

pub fn id(s: &str) -> EntityId {
    EntityId::new(s).unwrap()
}

pub fn ids(ss: &[&str]) -> BTreeSet<EntityId> {
    ss.iter().map(|s| id(s)).collect()
}

pub fn component(cid: &str, types: &[&str], controls: &[&str]) -> Component {
    Component {
        id: id(cid),
        name: cid.to_string(),
        types: ids(types),
        controls: ids(controls),
    }
}

pub fn component_type(tid: &str, vulns: &[&str]) -> ComponentType {
    ComponentType {
        id: id(tid),
        name: tid.to_string(),
        vulns: ids(vulns),
        origin: TypeOrigin::Manual,
    }
}

pub fn mechanism(vid: &str, parents: &[&str]) -> Vulnerability {
    Vulnerability {
        id: id(vid),
        kind: VulnKind::Mechanism,
        title: vid.to_string(),
        avulns: ids(parents),
        metadata: None,
    }
}

pub fn control(sid: &str) -> Control {
    Control {
        id: id(sid),
        name: sid.to_string(),
        description: None,
    }
}

pub fn rule(rid: &str, vulns: &[&str], types: &[&str], controls: &[&str]) -> Rule {
    Rule {
        id: id(rid),
        name: rid.to_string(),
        rvulns: ids(vulns),
        rtypes: ids(types),
        rcontrols: ids(controls),
    }
}

pub fn insert(model: &DesignModel, entity: Entity) -> DesignModel {
    mutate(model, Change::Insert(entity)).expect("insert should be accepted")
}

/// The two-component design situation with one weakness, one rule and one
/// control, before any control is assigned to a component.
pub fn scenario_a() -> DesignModel {
    let mut model = DesignModel::new();
    model = insert(
        &model,
        Entity::Vulnerability(Vulnerability {
            title: "Improper Restriction of Operations within the Bounds of a Memory Buffer"
                .to_string(),
            ..mechanism("CWE-119", &[])
        }),
    );
    model = insert(
        &model,
        Entity::ComponentType(component_type("UNIX_like_operating_system", &[])),
    );
    model = insert(
        &model,
        Entity::ComponentType(component_type(
            "internally_developed_application",
            &["CWE-119"],
        )),
    );
    model = insert(&model, Entity::Control(control("use_memory_safe_languages")));
    model = insert(
        &model,
        Entity::Rule(rule(
            "rule1",
            &["CWE-119"],
            &["internally_developed_application"],
            &["use_memory_safe_languages"],
        )),
    );
    model = insert(
        &model,
        Entity::Component(component(
            "OperatingSystem",
            &["UNIX_like_operating_system"],
            &[],
        )),
    );
    model = insert(
        &model,
        Entity::Component(component(
            "Application",
            &["internally_developed_application"],
            &[],
        )),
    );
    model
}

/// Independent cycle oracle: Kahn-style peeling over the abstraction graph.
/// The graph is cyclic exactly when peeling cannot consume every node.
pub fn has_abstraction_cycle(model: &DesignModel) -> bool {
    let mut out_degree: std::collections::BTreeMap<&EntityId, usize> = model
        .vulnerabilities
        .iter()
        .map(|(vid, v)| {
            let deg = v
                .avulns
                .iter()
                .filter(|p| model.vulnerabilities.contains_key(*p))
                .count();
            (vid, deg)
        })
        .collect();
    let mut queue: Vec<&EntityId> = out_degree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(v, _)| *v)
        .collect();
    let mut consumed = 0usize;
    while let Some(done) = queue.pop() {
        consumed += 1;
        for (vid, v) in &model.vulnerabilities {
            if v.avulns.contains(done) {
                let deg = out_degree.get_mut(vid).unwrap();
                *deg -= 1;
                if *deg == 0 {
                    queue.push(vid);
                }
            }
        }
    }
    consumed != model.vulnerabilities.len()
}
