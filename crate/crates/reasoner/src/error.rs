use posture_model::{EntityId, ValidationReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReasonError {
    #[error("unknown component `{0}`")]
    UnknownComponent(EntityId),
    #[error("unknown vulnerability `{0}`")]
    UnknownVulnerability(EntityId),
    /// The model fails validation; reasoning refuses rather than degrades.
    /// Also raised if evaluation re-enters a vulnerability, which can only
    /// happen on a model that was never validated.
    #[error("model has {} validation error(s); refusing to reason over it", .0.errors().count())]
    InvalidModel(ValidationReport),
    #[error("vulnerability `{vulnerability}` does not apply to component `{component}`")]
    NotApplicable {
        component: EntityId,
        vulnerability: EntityId,
    },
}

impl ReasonError {
    pub fn code(&self) -> &'static str {
        match self {
            ReasonError::UnknownComponent(_) => "unknown-component",
            ReasonError::UnknownVulnerability(_) => "unknown-vulnerability",
            ReasonError::InvalidModel(_) => "invalid-model",
            ReasonError::NotApplicable { .. } => "not-applicable",
        }
    }
}
