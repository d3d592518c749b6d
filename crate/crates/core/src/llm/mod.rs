//! Model-backed execution: an OpenAI-compatible chat client, a provider that
//! issues one completion per builtin, whole-program execution inside the
//! model, and a conformance checker for the traces models write.

mod client;
mod conformance;
mod in_model;
mod per_op;

pub use client::{
    llm_call, parse_completion, request_body, ChatBackend, ChatMessage, EndpointConfig, HttpChatClient, LlmError, Role,
    ENV_KEY, ENV_MODEL, ENV_URL,
};
pub use conformance::{check_conformance, check_model_trace, Violation, ViolationKind};
pub use in_model::{
    parse_model_trace, run_in_model, user_prompt, InModelError, InterpreterFile, ModelTrace, BUILTIN_INTERPRETER_FILE,
};
pub use per_op::{parse_bullets, parse_pair_lines, LlmProvider};

/// Default number of concurrent requests during a benchmark.
pub const DEFAULT_IN_FLIGHT: usize = 4;
