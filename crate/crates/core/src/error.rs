use crate::colimit::GluingReport;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("hom endpoints do not match: target of first is not source of second")]
    EndpointMismatch,

    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),

    #[error("subgraphs have different ambient graphs")]
    AmbientMismatch,

    #[error("gluing condition violated: {0}")]
    GluingViolation(GluingReport),

    #[error("match is not a homomorphism from the rule's left side")]
    BadMatch,

    #[error("rule interface is not discrete: {0}")]
    NonDiscreteInterface(String),

    #[error("square boundary mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("size bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("malformed document: {0}")]
    Malformed(String),
}
