//! Supervisory control of discrete-event systems: monolithic synthesis,
//! supervisor reduction, and supervisor localization with event reduction.

pub mod automata;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod localization;
pub mod oracle;
pub mod reduction;
pub mod synthesis;

pub use automata::{Alphabet, EventId, Generator, StateId, StringTrace};
pub use error::{Error, Result};
