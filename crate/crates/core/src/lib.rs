//! Cognitive BASIC: a numbered-line reasoning language whose programs
//! operate on a five-field cognitive memory.

pub mod bench;
pub mod cli;
pub mod cogops;
pub mod interpreter;
pub mod lang;
pub mod llm;
pub mod memory;
