//! Automated reasoning about the vulnerability posture of a design model.
//!
//! Given a validated [`posture_model::DesignModel`], this crate computes
//! which vulnerabilities apply to each component, whether each one is
//! mitigated directly by a rule or indirectly through its higher
//! abstractions, per-component vulnerable verdicts, and the design-wide
//! property that no component has an unmitigated vulnerability — with
//! explanation trees as witnesses and counterexamples.
//!
//! All entry points are pure functions over an immutable model snapshot;
//! per-component evaluations are independent.

mod error;
mod eval;
mod explain;
mod report;

pub use error::ReasonError;
pub use eval::{check_design, cvulns, mitigated, mitigated_v, vulnerable};
pub use explain::{explain, EXPLANATION_DEPTH_CAP};
pub use report::{
    Basis, ComponentPosture, ExplanationNode, GapReason, PostureReport, RuleGap, RuleWitness,
    Verdict,
};
