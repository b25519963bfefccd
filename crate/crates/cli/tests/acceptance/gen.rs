//! Seeded random model generation for the acceptance property suites.
//!
//! Sizes: up to 8 components, 12 vulnerabilities (abstraction DAG depth at
//! most 4), 6 rules, 6 controls. Levels bound the DAG depth: abstraction
//! edges only run from a higher-level vulnerability to a lower-level one.

use std::collections::BTreeSet;

use posture_model::{
    Component, ComponentType, Control, DesignModel, EntityId, Rule, TypeOrigin, VulnKind,
    Vulnerability,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn id(s: impl AsRef<str>) -> EntityId {
    EntityId::new(s.as_ref()).unwrap()
}

pub fn random_model(rng: &mut ChaCha8Rng) -> DesignModel {
    let nv = rng.gen_range(1..=12);
    let nt = rng.gen_range(1..=5);
    let ns = rng.gen_range(0..=6);
    let nc = rng.gen_range(1..=8);
    let nr = rng.gen_range(0..=6);

    let mut model = DesignModel::new();
    let levels: Vec<u8> = (0..nv).map(|_| rng.gen_range(0..4)).collect();
    for v in 0..nv {
        let avulns: BTreeSet<EntityId> = (0..nv)
            .filter(|&p| p != v && levels[p] < levels[v] && rng.gen_bool(0.3))
            .map(|p| id(format!("v{p:02}")))
            .collect();
        let vid = id(format!("v{v:02}"));
        model.vulnerabilities.insert(
            vid.clone(),
            Vulnerability {
                id: vid,
                kind: VulnKind::Mechanism,
                title: format!("vulnerability {v}"),
                avulns,
                metadata: None,
            },
        );
    }
    for t in 0..nt {
        let vulns = (0..nv)
            .filter(|_| rng.gen_bool(0.4))
            .map(|v| id(format!("v{v:02}")))
            .collect();
        let tid = id(format!("t{t}"));
        model.component_types.insert(
            tid.clone(),
            ComponentType {
                id: tid,
                name: format!("type {t}"),
                vulns,
                origin: TypeOrigin::Manual,
            },
        );
    }
    for s in 0..ns {
        let sid = id(format!("s{s}"));
        model.controls.insert(
            sid.clone(),
            Control {
                id: sid,
                name: format!("control {s}"),
                description: None,
            },
        );
    }
    for c in 0..nc {
        let types = (0..nt)
            .filter(|_| rng.gen_bool(0.5))
            .map(|t| id(format!("t{t}")))
            .collect();
        let controls = (0..ns)
            .filter(|_| rng.gen_bool(0.4))
            .map(|s| id(format!("s{s}")))
            .collect();
        let cid = id(format!("c{c}"));
        model.components.insert(
            cid.clone(),
            Component {
                id: cid,
                name: format!("component {c}"),
                types,
                controls,
            },
        );
    }
    for r in 0..nr {
        let rvulns = (0..nv)
            .filter(|_| rng.gen_bool(0.4))
            .map(|v| id(format!("v{v:02}")))
            .collect();
        let rtypes = (0..nt)
            .filter(|_| rng.gen_bool(0.5))
            .map(|t| id(format!("t{t}")))
            .collect();
        let rcontrols = (0..ns)
            .filter(|_| rng.gen_bool(0.35))
            .map(|s| id(format!("s{s}")))
            .collect();
        let rid = id(format!("r{r}"));
        model.rules.insert(
            rid.clone(),
            Rule {
                id: rid,
                name: format!("rule {r}"),
                rvulns,
                rtypes,
                rcontrols,
            },
        );
    }
    model
}
