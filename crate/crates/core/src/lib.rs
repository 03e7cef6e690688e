//! Concurrent Kleene algebra with hypotheses.
//!
//! Series-parallel pomsets and their languages, pomset contexts, closure of
//! finite languages under hypotheses, and a decision procedure for
//! concurrent Kleene algebra with observations (CKAO).

pub mod ckao;
pub mod closure;
pub mod context;
pub mod decide;
pub mod dot;
pub mod error;
pub mod oracle;
pub mod pomset;
pub mod poset;
pub mod sample;
pub mod subsume;
pub mod term;

pub use error::{Error, Result};
pub use pomset::{Label, PomsetLanguage, SpPomset};
