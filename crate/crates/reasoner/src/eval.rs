//! The mitigation calculus.
//!
//! For a component `c` with types `TYPES(c)` and controls `CONTROLS(c)`:
//!
//! - `cvulns(c)` is the union of `VULNS(t)` over `t ∈ TYPES(c)`;
//! - a vulnerability `v` is directly mitigated on `c` when some rule `r`
//!   covers `v`, shares a type with `c`, and has all of its required
//!   controls assigned to `c`;
//! - `v` is mitigated when it is directly mitigated, or when it has higher
//!   abstractions and every one of them is mitigated on `c`;
//! - `c` is vulnerable when some applicable vulnerability is unmitigated;
//! - the design-wide property holds when no component is vulnerable.
//!
//! Evaluation memoises per (component, vulnerability) within one pass:
//! shared ancestors in a realistic catalogue make the naive recursion
//! exponential. The memo belongs to the pass, never shared across calls,
//! so concurrent evaluations of different snapshots stay independent.

use std::collections::{BTreeMap, BTreeSet};

use posture_model::{validate_model, Component, DesignModel, EntityId};

use crate::error::ReasonError;
use crate::explain::build_explanation;
use crate::report::{ComponentPosture, PostureReport, RuleWitness};

/// Memoised evaluation state for one component within one pass.
pub(crate) struct ComponentEval<'m> {
    pub(crate) model: &'m DesignModel,
    pub(crate) component: &'m Component,
    memo: BTreeMap<EntityId, Option<bool>>,
}

impl<'m> ComponentEval<'m> {
    pub(crate) fn new(
        model: &'m DesignModel,
        component: &EntityId,
    ) -> Result<Self, ReasonError> {
        let component = model
            .components
            .get(component)
            .ok_or_else(|| ReasonError::UnknownComponent(component.clone()))?;
        Ok(ComponentEval {
            model,
            component,
            memo: BTreeMap::new(),
        })
    }

    /// Union of the vulnerabilities affecting the component's types.
    pub(crate) fn cvulns(&self) -> BTreeSet<EntityId> {
        self.component
            .types
            .iter()
            .filter_map(|t| self.model.component_types.get(t))
            .flat_map(|t| t.vulns.iter().cloned())
            .collect()
    }

    /// First qualifying rule in lexicographic rule-id order, with the
    /// lexicographically first matched type as witness.
    pub(crate) fn direct_witness(&self, vuln: &EntityId) -> Option<RuleWitness> {
        self.model.rules.iter().find_map(|(rid, rule)| {
            if !rule.rvulns.contains(vuln) {
                return None;
            }
            let matched = rule.rtypes.intersection(&self.component.types).next()?;
            rule.rcontrols
                .iter()
                .all(|s| self.component.controls.contains(s))
                .then(|| RuleWitness {
                    rule: rid.clone(),
                    matched_type: matched.clone(),
                })
        })
    }

    /// Direct mitigation, or indirect mitigation through the vulnerability's
    /// complete set of higher abstractions.
    pub(crate) fn mitigated(&mut self, vuln: &EntityId) -> Result<bool, ReasonError> {
        if let Some(state) = self.memo.get(vuln) {
            return match state {
                Some(verdict) => Ok(*verdict),
                // Re-entry means an abstraction cycle: the model was not
                // validated. Refuse instead of looping.
                None => Err(ReasonError::InvalidModel(validate_model(self.model))),
            };
        }
        let entry = self
            .model
            .vulnerabilities
            .get(vuln)
            .ok_or_else(|| ReasonError::UnknownVulnerability(vuln.clone()))?;
        self.memo.insert(vuln.clone(), None);

        let verdict = if self.direct_witness(vuln).is_some() {
            true
        } else if entry.avulns.is_empty() {
            false
        } else {
            let mut all = true;
            for parent in &entry.avulns {
                if !self.mitigated(parent)? {
                    all = false;
                    break;
                }
            }
            all
        };
        self.memo.insert(vuln.clone(), Some(verdict));
        Ok(verdict)
    }

    pub(crate) fn posture(&mut self) -> Result<ComponentPosture, ReasonError> {
        let cvulns = self.cvulns();
        let mut unmitigated = BTreeSet::new();
        for vuln in &cvulns {
            if !self.mitigated(vuln)? {
                unmitigated.insert(vuln.clone());
            }
        }
        Ok(ComponentPosture {
            component: self.component.id.clone(),
            vulnerable: !unmitigated.is_empty(),
            cvulns,
            unmitigated,
        })
    }
}

/// The ordered set of vulnerabilities that apply to `component` through its
/// types. Requires a validated model.
pub fn cvulns(
    model: &DesignModel,
    component: &EntityId,
) -> Result<BTreeSet<EntityId>, ReasonError> {
    Ok(ComponentEval::new(model, component)?.cvulns())
}

/// Direct mitigation: `Some(witness)` when a rule covering the
/// vulnerability matches one of the component's types and all of the rule's
/// controls are assigned. Requires a validated model.
pub fn mitigated_v(
    model: &DesignModel,
    vuln: &EntityId,
    component: &EntityId,
) -> Result<Option<RuleWitness>, ReasonError> {
    let eval = ComponentEval::new(model, component)?;
    if !model.vulnerabilities.contains_key(vuln) {
        return Err(ReasonError::UnknownVulnerability(vuln.clone()));
    }
    Ok(eval.direct_witness(vuln))
}

/// Full mitigation: direct, or indirect via all higher abstractions.
/// Requires a validated model.
pub fn mitigated(
    model: &DesignModel,
    vuln: &EntityId,
    component: &EntityId,
) -> Result<bool, ReasonError> {
    ComponentEval::new(model, component)?.mitigated(vuln)
}

/// Whether the component has any applicable, unmitigated vulnerability,
/// along with exactly that subset. Requires a validated model.
pub fn vulnerable(
    model: &DesignModel,
    component: &EntityId,
) -> Result<ComponentPosture, ReasonError> {
    ComponentEval::new(model, component)?.posture()
}

/// Evaluates the whole design. Validates first and refuses on errors;
/// enumerates every component and explains every applicable
/// (component, vulnerability) pair.
pub fn check_design(model: &DesignModel) -> Result<PostureReport, ReasonError> {
    let validation = validate_model(model);
    if !validation.is_clean() {
        return Err(ReasonError::InvalidModel(validation));
    }

    let mut components = Vec::new();
    let mut explanations = BTreeMap::new();
    for cid in model.components.keys() {
        let mut eval = ComponentEval::new(model, cid)?;
        let posture = eval.posture()?;
        let mut per_vuln = BTreeMap::new();
        for vuln in &posture.cvulns {
            per_vuln.insert(vuln.clone(), build_explanation(&mut eval, vuln)?);
        }
        if !per_vuln.is_empty() {
            explanations.insert(cid.clone(), per_vuln);
        }
        components.push(posture);
    }

    Ok(PostureReport {
        property_holds: components.iter().all(|c| !c.vulnerable),
        components,
        explanations,
    })
}
