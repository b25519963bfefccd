//! Evaluation results: posture reports and explanation trees.

use std::collections::{BTreeMap, BTreeSet};

use posture_model::EntityId;
use serde::{Deserialize, Serialize};

/// The design-wide evaluation result. `property_holds` is the conjunction
/// of `!vulnerable` over every component; per-component entries are ordered
/// by component id; explanations carry one tree per applicable
/// (component, vulnerability) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostureReport {
    pub property_holds: bool,
    pub components: Vec<ComponentPosture>,
    pub explanations: BTreeMap<EntityId, BTreeMap<EntityId, ExplanationNode>>,
}

/// One component's verdict: the vulnerabilities that apply to it through
/// its types, and the subset that no rule-or-abstraction route mitigates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentPosture {
    pub component: EntityId,
    pub vulnerable: bool,
    pub cvulns: BTreeSet<EntityId>,
    pub unmitigated: BTreeSet<EntityId>,
}

/// The rule and matched type that directly mitigate a vulnerability on a
/// component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleWitness {
    pub rule: EntityId,
    pub matched_type: EntityId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Mitigated,
    Unmitigated,
}

/// One node of an explanation tree, mirroring the mitigation recursion for
/// a fixed component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationNode {
    pub vulnerability: EntityId,
    pub verdict: Verdict,
    /// Set when the depth cap stopped expansion; the verdict is still exact.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
    pub basis: Basis,
}

/// Why the verdict holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Basis {
    /// A rule matched one of the component's types and all of its required
    /// controls are assigned.
    DirectRule {
        rule: EntityId,
        matched_type: EntityId,
    },
    /// Every higher abstraction the vulnerability manifests is mitigated;
    /// one child per entry in its abstraction set.
    Abstraction { children: Vec<ExplanationNode> },
    /// No mitigation route: `missing` lists, per candidate rule, why it
    /// does not apply; `children` shows the (failed) abstraction route when
    /// the vulnerability has parents.
    None {
        missing: Vec<RuleGap>,
        children: Vec<ExplanationNode>,
    },
}

/// Why one candidate rule (a rule covering the vulnerability) fails to
/// mitigate it on this component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleGap {
    pub rule: EntityId,
    pub failure: GapReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GapReason {
    /// None of the rule's types is manifested by the component.
    NoTypeMatch,
    /// The type matches but these required controls are not assigned.
    MissingControls { controls: Vec<EntityId> },
}
