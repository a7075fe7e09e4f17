//! Next-step hint engine for a Kotlin-like teaching language.
//!
//! The pipeline plans subgoals with an LLM, asks for a modified program,
//! narrows the proposed edit to a single structural step with static
//! analysis, and finally derives a short textual hint.

pub mod diff;
pub mod eval;
pub mod gateway;
pub mod hint;
pub mod model;
pub mod pipeline;
pub mod prompt;
pub mod taskpack;
pub mod syntax;
pub mod text;
