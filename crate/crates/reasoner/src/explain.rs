//! Explanation trees: a materialised trace of the mitigation recursion for
//! one (component, vulnerability) pair.
//!
//! Shared abstraction subtrees are expanded fully (the result is a tree,
//! not a DAG); expansion stops at a fixed depth with an explicit truncated
//! marker. Catalogue hierarchies sit far below the cap, so truncation only
//! shows up on degenerate inputs.

use posture_model::{DesignModel, EntityId};

use crate::error::ReasonError;
use crate::eval::ComponentEval;
use crate::report::{Basis, ExplanationNode, GapReason, RuleGap, Verdict};

/// Children are expanded while the node depth is below this; the node at
/// the cap keeps its exact verdict but no children.
pub const EXPLANATION_DEPTH_CAP: usize = 32;

/// Explains the verdict for `vuln` on `component`. The vulnerability must
/// apply to the component (be in its `cvulns`); requires a validated model.
pub fn explain(
    model: &DesignModel,
    component: &EntityId,
    vuln: &EntityId,
) -> Result<ExplanationNode, ReasonError> {
    let mut eval = ComponentEval::new(model, component)?;
    if !model.vulnerabilities.contains_key(vuln) {
        return Err(ReasonError::UnknownVulnerability(vuln.clone()));
    }
    if !eval.cvulns().contains(vuln) {
        return Err(ReasonError::NotApplicable {
            component: component.clone(),
            vulnerability: vuln.clone(),
        });
    }
    build_explanation(&mut eval, vuln)
}

pub(crate) fn build_explanation(
    eval: &mut ComponentEval<'_>,
    vuln: &EntityId,
) -> Result<ExplanationNode, ReasonError> {
    build_node(eval, vuln, 0)
}

fn build_node(
    eval: &mut ComponentEval<'_>,
    vuln: &EntityId,
    depth: usize,
) -> Result<ExplanationNode, ReasonError> {
    if let Some(witness) = eval.direct_witness(vuln) {
        return Ok(ExplanationNode {
            vulnerability: vuln.clone(),
            verdict: Verdict::Mitigated,
            truncated: false,
            basis: Basis::DirectRule {
                rule: witness.rule,
                matched_type: witness.matched_type,
            },
        });
    }

    let parents: Vec<EntityId> = eval
        .model
        .vulnerabilities
        .get(vuln)
        .ok_or_else(|| ReasonError::UnknownVulnerability(vuln.clone()))?
        .avulns
        .iter()
        .cloned()
        .collect();
    let mitigated = eval.mitigated(vuln)?;

    let truncated = !parents.is_empty() && depth >= EXPLANATION_DEPTH_CAP;
    let children = if truncated {
        Vec::new()
    } else {
        parents
            .iter()
            .map(|p| build_node(eval, p, depth + 1))
            .collect::<Result<Vec<_>, _>>()?
    };

    let node = if mitigated {
        // No direct witness, so the verdict came through the abstractions.
        ExplanationNode {
            vulnerability: vuln.clone(),
            verdict: Verdict::Mitigated,
            truncated,
            basis: Basis::Abstraction { children },
        }
    } else {
        ExplanationNode {
            vulnerability: vuln.clone(),
            verdict: Verdict::Unmitigated,
            truncated,
            basis: Basis::None {
                missing: rule_gaps(eval, vuln),
                children,
            },
        }
    };
    Ok(node)
}

/// For every candidate rule (a rule whose vulnerability set covers `vuln`),
/// states whether it failed on the type match or which controls are absent.
fn rule_gaps(eval: &ComponentEval<'_>, vuln: &EntityId) -> Vec<RuleGap> {
    let component = eval.component;
    eval.model
        .rules
        .iter()
        .filter(|(_, rule)| rule.rvulns.contains(vuln))
        .filter_map(|(rid, rule)| {
            if rule.rtypes.intersection(&component.types).next().is_none() {
                return Some(RuleGap {
                    rule: rid.clone(),
                    failure: GapReason::NoTypeMatch,
                });
            }
            let controls: Vec<EntityId> = rule
                .rcontrols
                .difference(&component.controls)
                .cloned()
                .collect();
            // A candidate with a type match and no missing controls would
            // have been a direct witness.
            (!controls.is_empty()).then(|| RuleGap {
                rule: rid.clone(),
                failure: GapReason::MissingControls { controls },
            })
        })
        .collect()
}
