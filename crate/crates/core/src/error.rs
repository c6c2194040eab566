use thiserror::Error;

use crate::automata::{EventId, StateId};

/// Errors raised by generator construction and the synthesis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("event {0} is declared controllable in one generator and uncontrollable in another")]
    ConflictingControllability(EventId),

    #[error("state {state} already has a transition on event {event}")]
    Nondeterministic { state: StateId, event: EventId },

    #[error("state {state} is out of range for a generator with {count} states")]
    StateOutOfRange { state: StateId, count: usize },

    #[error("event {0} is not in the alphabet")]
    UnknownEvent(EventId),

    #[error("self-loop on event {event} collides with transition {state} -> {target}")]
    SelfloopCollision {
        state: StateId,
        event: EventId,
        target: StateId,
    },

    #[error(
        "supervisor transition ({sup_state}, {event}) has no counterpart at plant state {plant_state}"
    )]
    ContainmentViolation {
        sup_state: StateId,
        plant_state: StateId,
        event: EventId,
    },

    #[error("specification event {0} is not in the plant alphabet")]
    AlphabetMismatch(EventId),

    #[error("partition induces a nondeterministic generator at cell {cell} on event {event}")]
    NondeterministicInduction { cell: usize, event: EventId },

    #[error("agent configuration: {0}")]
    AgentConfig(String),

    #[error("enumeration budget of {budget} strings exceeded")]
    BudgetExceeded { budget: usize },

    #[error("internal consistency check failed: {0}")]
    Construction(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
