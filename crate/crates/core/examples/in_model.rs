//! Let a model execute the whole program from the interpreter file, then
//! parse its trace and check it for conformance. Uses COGBASIC_LLM_URL /
//! COGBASIC_LLM_MODEL when set; otherwise an offline stand-in replies with
//! the deterministic interpreter's own trace.
//!
//!     cargo run --example in_model

use cogbasic::cogops::RuleProvider;
use cogbasic::interpreter::{render_trace, run, Limits};
use cogbasic::lang::{parse_program, Program, CONFLICT_RESOLUTION_PROGRAM};
use cogbasic::llm::{
    check_model_trace, run_in_model, ChatBackend, ChatMessage, EndpointConfig, HttpChatClient, InterpreterFile,
    LlmError,
};

/// Replies with a faithful trace, wrapped in the chatter models tend to add.
struct Replay {
    program: Program,
    scenario: String,
}

impl ChatBackend for Replay {
    fn complete(&self, _: &[ChatMessage]) -> Result<String, LlmError> {
        let result = run(&self.program, &self.scenario, &RuleProvider::new(), Limits::default());
        Ok(format!("Here is the execution trace.\n\n{}\nDone.", render_trace(&result)))
    }

    fn label(&self) -> String {
        "replay".into()
    }
}

fn main() {
    let scenario = "The shop opens at 9am. The shop opens at 10am.";
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).expect("shipped program parses");
    let backend: Box<dyn ChatBackend> = match EndpointConfig::resolve(None, None, None) {
        Ok(config) => Box::new(HttpChatClient::new(config).expect("valid config")),
        Err(e) => {
            println!("{e}; using an offline replay\n");
            Box::new(Replay { program: program.clone(), scenario: scenario.into() })
        }
    };
    match run_in_model(backend.as_ref(), &InterpreterFile::builtin(), &program, scenario) {
        Ok(trace) => {
            let lines: Vec<String> = trace.entries.iter().map(|e| e.line.to_string()).collect();
            println!("model executed lines: {}", lines.join(" "));
            println!("final resolution: {:?}", trace.final_memory.resolution);
            let violations = check_model_trace(&program, &trace);
            println!("{} violation(s)", violations.len());
            for v in violations {
                println!("  {v}");
            }
        }
        Err(e) => println!("model run failed: {e}"),
    }
}
