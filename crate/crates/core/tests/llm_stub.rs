//! The chat client, the per-builtin provider and the in-model runner,
//! exercised against a loopback HTTP stub.

mod common;

use std::net::TcpListener;
use std::time::Duration;

use cogbasic::cogops::{CognitiveOps, ProviderError};
use cogbasic::interpreter::{run, Limits, NextLine};
use cogbasic::lang::{parse_program, CONFLICT_RESOLUTION_PROGRAM};
use cogbasic::llm::{
    check_model_trace, llm_call, run_in_model, ChatBackend, EndpointConfig, HttpChatClient, InModelError,
    InterpreterFile, LlmError, LlmProvider,
};
use cogbasic::memory::render_final_memory;
use common::{completion, StubServer};

const CONFLICT_FIXTURE: &str = include_str!("fixtures/model_trace_conflict.md");
const EMPTY_FIXTURE: &str = include_str!("fixtures/model_trace_empty.md");
const TRUNCATED_FIXTURE: &str = include_str!("fixtures/model_trace_truncated.md");

fn config(url: &str) -> EndpointConfig {
    let mut c = EndpointConfig::new(url, "stub-model");
    c.backoff_base = Duration::from_millis(5);
    c.timeout = Duration::from_secs(5);
    c
}

fn provider(stub: &StubServer) -> LlmProvider<HttpChatClient> {
    LlmProvider::new(HttpChatClient::new(config(&stub.url)).unwrap())
}

fn backend_error(e: ProviderError) -> LlmError {
    match e {
        ProviderError::Backend(b) => *b.downcast::<LlmError>().expect("an LLM error"),
        other => panic!("unexpected provider error {other}"),
    }
}

#[test]
fn llm_call_returns_the_completion_text() {
    let stub = StubServer::completions(&["hello there"]);
    assert_eq!(llm_call(&config(&stub.url), "sys", "hi").unwrap(), "hello there");
    let reqs = stub.captured();
    assert_eq!(reqs.len(), 1);
    assert_eq!(reqs[0].method, "POST");
    assert_eq!(reqs[0].path, "/v1/chat/completions");
    assert!(reqs[0].header("authorization").is_none());
}

#[test]
fn request_body_has_exactly_model_messages_temperature() {
    let stub = StubServer::completions(&["ok"]);
    let mut c = config(&stub.url);
    c.api_key = Some("sk-test".into());
    llm_call(&c, "system text", "user text").unwrap();
    let req = &stub.captured()[0];
    assert_eq!(req.header("authorization"), Some("Bearer sk-test"));
    assert!(req.header("content-type").unwrap().starts_with("application/json"));
    let body = req.json();
    let mut keys: Vec<&String> = body.as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["messages", "model", "temperature"]);
    assert_eq!(body["model"], "stub-model");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(
        body["messages"],
        serde_json::json!([{"role": "system", "content": "system text"}, {"role": "user", "content": "user text"}])
    );
}

#[test]
fn unreachable_endpoint_fails_after_all_retries() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let c = config(&format!("http://127.0.0.1:{port}/v1"));
    match llm_call(&c, "s", "u") {
        Err(LlmError::Transport { attempts, .. }) => assert_eq!(attempts, c.max_retries + 1),
        other => panic!("expected a transport error, got {other:?}"),
    }
}

#[test]
fn server_errors_are_retried() {
    let stub = StubServer::start(vec![(503, "busy".into()), (500, "oops".into()), (200, completion("third time"))]);
    assert_eq!(llm_call(&config(&stub.url), "s", "u").unwrap(), "third time");
    assert_eq!(stub.captured().len(), 3);
}

#[test]
fn server_errors_exhaust_retries() {
    let stub = StubServer::start(vec![(502, "bad gateway".into())]);
    match llm_call(&config(&stub.url), "s", "u") {
        Err(LlmError::Api { status: 502, attempts: 3, .. }) => {}
        other => panic!("expected HTTP 502 after 3 attempts, got {other:?}"),
    }
    assert_eq!(stub.captured().len(), 3);
}

#[test]
fn client_errors_fail_immediately() {
    let stub = StubServer::start(vec![(401, r#"{"error":"bad key"}"#.into()), (200, completion("never"))]);
    match llm_call(&config(&stub.url), "s", "u") {
        Err(LlmError::Api { status: 401, attempts: 1, body }) => assert!(body.contains("bad key")),
        other => panic!("expected HTTP 401, got {other:?}"),
    }
    assert_eq!(stub.captured().len(), 1);
}

#[test]
fn payload_without_choices_is_a_response_error() {
    let stub = StubServer::start(vec![(200, r#"{"object":"error"}"#.into())]);
    assert!(matches!(llm_call(&config(&stub.url), "s", "u"), Err(LlmError::Response { .. })));
}

#[test]
fn per_op_extraction_and_detection() {
    let stub = StubServer::completions(&[
        "- The sky is clear.\n- The sky is not clear.",
        "```\n- Check the forecast.\n```",
        "- The sky is clear. || The sky is not clear.",
        "NONE",
    ]);
    let p = provider(&stub);
    let text = "The sky is clear. The sky is not clear. Check the forecast.";
    assert_eq!(p.extract_declarative(text).unwrap(), ["The sky is clear.", "The sky is not clear."]);
    assert_eq!(p.extract_procedural(text).unwrap(), ["Check the forecast."]);
    let facts = vec!["The sky is clear.".to_string(), "The sky is not clear.".to_string()];
    let pairs = p.detect_conflicts(&facts).unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!((pairs[0].a(), pairs[0].b()), ("The sky is clear.", "The sky is not clear."));
    assert!(p.detect_conflicts(&facts).unwrap().is_empty());

    let prompts: Vec<String> =
        stub.captured().iter().map(|r| r.json()["messages"][1]["content"].as_str().unwrap().to_string()).collect();
    assert!(prompts[0].starts_with("Extract the declarative"));
    assert!(prompts[1].starts_with("Extract the procedural"));
    assert!(prompts[2].starts_with("Identify contradictions"));
    assert!(prompts[2].contains("- The sky is not clear.\n"));
}

#[test]
fn trivial_inputs_skip_the_model() {
    let stub = StubServer::completions(&["unused"]);
    let p = provider(&stub);
    assert!(p.extract_declarative("  ").unwrap().is_empty());
    assert!(p.extract_procedural("").unwrap().is_empty());
    assert!(p.detect_conflicts(&["only one".to_string()]).unwrap().is_empty());
    assert!(matches!(p.resolve_conflicts(&[]), Err(ProviderError::EmptyInput)));
    assert!(stub.captured().is_empty());
}

#[test]
fn malformed_reply_gets_one_reformat_request() {
    let stub = StubServer::completions(&["Sure! Here are the facts: the sky is clear.", "- The sky is clear."]);
    assert_eq!(provider(&stub).extract_declarative("The sky is clear.").unwrap(), ["The sky is clear."]);
    let reqs = stub.captured();
    assert_eq!(reqs.len(), 2);
    let retry = reqs[1].json();
    let msgs = retry["messages"].as_array().unwrap();
    assert_eq!(msgs.len(), 4);
    assert_eq!(msgs[2]["role"], "assistant");
    assert!(msgs[3]["content"].as_str().unwrap().contains("did not follow the required format"));
}

#[test]
fn persistently_malformed_reply_is_an_output_format_error() {
    let stub = StubServer::completions(&["I think the sky is clear.", "Still prose."]);
    let err = backend_error(provider(&stub).extract_declarative("The sky is clear.").unwrap_err());
    match err {
        LlmError::OutputFormat { operation, raw, .. } => {
            assert_eq!(operation, "EXTRACT_DECLARATIVE");
            assert_eq!(raw, "Still prose.");
        }
        other => panic!("expected an output format error, got {other:?}"),
    }
    assert_eq!(stub.captured().len(), 2);
}

#[test]
fn resolution_needs_one_line_per_pair() {
    let stub = StubServer::completions(&["- merged one\n- merged two", "- merged one"]);
    let p = provider(&stub);
    let pairs = vec![cogbasic::memory::ConflictPair::parse("a || b").unwrap()];
    let r = p.resolve_conflicts(&pairs).unwrap();
    assert_eq!(r.summary, "merged one");
    assert_eq!(r.reconciled[0].1, "merged one");
    assert_eq!(stub.captured().len(), 2);
}

#[test]
fn whole_program_over_the_per_op_provider() {
    let stub = StubServer::completions(&[
        "- The shop opens at 9am.\n- The shop opens at 10am.",
        "- The shop opens at 9am. || The shop opens at 10am.",
        "- The shop opens at 9am or 10am; the exact time is uncertain.",
    ]);
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).unwrap();
    let result = run(&program, "The shop opens at 9am. The shop opens at 10am.", &provider(&stub), Limits::default());
    assert!(result.outcome.is_completed(), "{}", result.outcome.label());
    let lines: Vec<u32> = result.trace.iter().map(|e| e.line).collect();
    assert_eq!(lines, [10, 20, 30, 40, 50, 60, 70, 90, 100]);
    assert!(result.final_memory.conflicts.is_empty());
    assert_eq!(result.final_memory.declarative, ["The shop opens at 9am or 10am; the exact time is uncertain."]);
    assert_eq!(stub.captured().len(), 3);
}

#[test]
fn in_model_run_parses_the_reply() {
    let stub = StubServer::completions(&[CONFLICT_FIXTURE]);
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).unwrap();
    let client = HttpChatClient::new(config(&stub.url)).unwrap();
    let scenario = "The shop opens at 9am. The shop opens at 10am.";
    let trace = run_in_model(&client, &InterpreterFile::builtin(), &program, scenario).unwrap();

    assert_eq!(trace.entries.len(), 9);
    assert_eq!(trace.entries[6].next, NextLine::Line(90));
    assert_eq!(trace.entries[8].next, NextLine::End);
    assert_eq!(trace.entries[2].instruction, "facts = EXTRACT_DECLARATIVE(working)");
    assert!(trace.warnings.is_empty(), "{:?}", trace.warnings);
    assert!(check_model_trace(&program, &trace).is_empty());

    let block = &CONFLICT_FIXTURE[CONFLICT_FIXTURE.find("FINAL MEMORY").unwrap()..];
    assert_eq!(render_final_memory(&trace.final_memory), block);

    let req = stub.captured()[0].json();
    assert_eq!(req["messages"][0]["content"], InterpreterFile::builtin().text());
    let user = req["messages"][1]["content"].as_str().unwrap();
    assert!(user.contains("70 IF CONFLICTS_COUNT() > 0 THEN 90"));
    assert!(user.contains(scenario));
}

#[test]
fn in_model_run_with_no_entries() {
    let stub = StubServer::completions(&[EMPTY_FIXTURE]);
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).unwrap();
    let client = HttpChatClient::new(config(&stub.url)).unwrap();
    let trace = run_in_model(&client, &InterpreterFile::builtin(), &program, "").unwrap();
    assert!(trace.entries.is_empty());
    assert!(trace.final_memory.declarative.is_empty());
    let codes: Vec<char> = check_model_trace(&program, &trace).iter().map(|v| v.kind.code()).collect();
    assert_eq!(codes, ['f']);
}

#[test]
fn in_model_reply_without_final_memory_is_an_error() {
    let stub = StubServer::completions(&[TRUNCATED_FIXTURE]);
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).unwrap();
    let client = HttpChatClient::new(config(&stub.url)).unwrap();
    let err = run_in_model(&client, &InterpreterFile::builtin(), &program, "x").unwrap_err();
    assert!(matches!(err, InModelError::Parse { .. }));
    assert_eq!(err.raw(), Some(TRUNCATED_FIXTURE));
}

#[test]
fn backend_label_is_the_model_name() {
    let client = HttpChatClient::new(config("http://127.0.0.1:9/v1")).unwrap();
    assert_eq!(client.label(), "stub-model");
}
