//! Run the conflict resolution program with a chat model behind each
//! builtin. Uses the endpoint from COGBASIC_LLM_URL / COGBASIC_LLM_MODEL
//! (and COGBASIC_LLM_KEY) when set; otherwise a canned offline model
//! stands in so the example always runs.
//!
//!     COGBASIC_LLM_URL=http://localhost:11434/v1 COGBASIC_LLM_MODEL=mistral:7b \
//!         cargo run --example llm_provider

use cogbasic::interpreter::{render_trace, run, Limits};
use cogbasic::lang::{parse_program, CONFLICT_RESOLUTION_PROGRAM};
use cogbasic::llm::{ChatBackend, ChatMessage, EndpointConfig, HttpChatClient, LlmError, LlmProvider};

/// Answers the four operation prompts for the sky scenario.
struct Canned;

impl ChatBackend for Canned {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let prompt = &messages.last().expect("non-empty conversation").content;
        let reply = if prompt.starts_with("Extract the declarative") {
            "- The sky is clear.\n- The sky is not clear."
        } else if prompt.starts_with("Extract the procedural") {
            "- Check the forecast before leaving."
        } else if prompt.starts_with("Identify contradictions") {
            "- The sky is clear. || The sky is not clear."
        } else {
            "- The sky may or may not be clear; sources are uncertain."
        };
        Ok(reply.to_string())
    }

    fn label(&self) -> String {
        "canned".into()
    }
}

fn main() {
    let scenario = "The sky is clear. The sky is not clear. Check the forecast before leaving.";
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).expect("shipped program parses");
    let result = match EndpointConfig::resolve(None, None, None) {
        Ok(config) => {
            println!("using {} at {}", config.model, config.base_url);
            let ops = LlmProvider::new(HttpChatClient::new(config).expect("valid config"));
            run(&program, scenario, &ops, Limits::default())
        }
        Err(e) => {
            println!("{e}; using the canned offline model\n");
            run(&program, scenario, &LlmProvider::new(Canned), Limits::default())
        }
    };
    print!("{}", render_trace(&result));
}
