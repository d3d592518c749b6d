//! Shared test support: program and scenario generators, invariant checks,
//! the annotated fact pool used as a detection oracle, and a loopback HTTP
//! stub for the chat endpoint.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use cogbasic::interpreter::{NextLine, RunResult};
use cogbasic::lang::{Builtin, CompareOp, Comparison, Expression, ListField, Program, Statement};
use cogbasic::memory::{ConflictCategory, MemoryState};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

// ---------------------------------------------------------------- generators

const VARS: [&str; 5] = ["facts", "rules", "pairs", "n", "msg"];

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(&VARS[..]).prop_map(str::to_string)
}

fn readable_var() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => var(),
        1 => prop::sample::select(&["working", "declarative", "procedural", "conflicts", "resolution"][..])
            .prop_map(str::to_string),
    ]
}

fn string_literal() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 .,!?\"\\\\]{0,16}"
}

fn builtin_call() -> impl Strategy<Value = Expression> {
    let text_arg = prop_oneof![
        3 => Just(Expression::Variable("working".into())),
        1 => string_literal().prop_map(Expression::Str),
        1 => var().prop_map(Expression::Variable),
    ];
    prop_oneof![
        Just(Expression::call(Builtin::Input)),
        text_arg.clone().prop_map(|a| Expression::Call(Builtin::ExtractDeclarative, vec![a])),
        text_arg.prop_map(|a| Expression::Call(Builtin::ExtractProcedural, vec![a])),
        Just(Expression::call(Builtin::DetectConflicts)),
        Just(Expression::call(Builtin::ConflictsCount)),
        Just(Expression::call(Builtin::ResolveConflicts)),
    ]
}

fn expression() -> impl Strategy<Value = Expression> {
    prop_oneof![
        3 => builtin_call(),
        2 => readable_var().prop_map(Expression::Variable),
        1 => (0u64..1000).prop_map(Expression::Integer),
        1 => string_literal().prop_map(Expression::Str),
    ]
}

fn pure_expression() -> impl Strategy<Value = Expression> {
    expression().prop_filter("PRINT and IF operands cannot resolve", |e| !e.mutates())
}

fn int_operand() -> impl Strategy<Value = Expression> {
    prop_oneof![
        3 => Just(Expression::call(Builtin::ConflictsCount)),
        2 => (0u64..4).prop_map(Expression::Integer),
        1 => Just(Expression::Variable("n".into())),
    ]
}

fn statement(lines: Vec<u32>) -> impl Strategy<Value = Statement> {
    let target = prop_oneof![
        6 => prop::sample::select(lines),
        1 => 1u32..200,
    ];
    prop_oneof![
        1 => "[A-Za-z0-9 ,.]{0,20}".prop_map(|t| Statement::Rem(t.trim().to_string())),
        5 => (prop_oneof![4 => var(), 1 => Just("working".to_string()), 1 => Just("resolution".to_string())],
              expression(), any::<bool>())
            .prop_map(|(target, value, with_let)| Statement::Assign { target, value, with_let }),
        3 => (prop::sample::select(&ListField::ALL[..]), readable_var())
            .prop_map(|(field, source)| Statement::Add { field, source }),
        1 => pure_expression().prop_map(Statement::Print),
        2 => (int_operand(), prop::sample::select(&CompareOp::ALL[..]), int_operand(), target.clone())
            .prop_map(|(lhs, op, rhs, target)| Statement::If { condition: Comparison { lhs, op, rhs }, target }),
        1 => target.prop_map(Statement::Goto),
        2 => prop::sample::select(&[Builtin::DetectConflicts, Builtin::ConflictsCount, Builtin::ResolveConflicts][..])
            .prop_map(Statement::Call),
        2 => Just(Statement::End),
    ]
}

/// Programs of 1 to `max_lines` statements over the whole command set.
/// Line numbers are distinct; jump targets are usually existing lines.
pub fn program(max_lines: usize) -> impl Strategy<Value = Program> {
    prop::collection::btree_set(1u32..400, 1..=max_lines).prop_flat_map(|set: BTreeSet<u32>| {
        let lines: Vec<u32> = set.into_iter().map(|n| n * 10).collect();
        let stmts = prop::collection::vec(statement(lines.clone()), lines.len());
        (Just(lines), stmts).prop_map(|(lines, stmts)| lines.into_iter().zip(stmts).collect::<Program>())
    })
}

/// Sentences mixing facts (some contradictory) and instructions.
pub const SCENARIO_SENTENCES: [&str; 14] = [
    "The sky is clear.",
    "The sky is not clear.",
    "The shop opens at 9am.",
    "The shop opens at 10am.",
    "The alarm always rings.",
    "The alarm sometimes rings.",
    "The car is red.",
    "The car is blue.",
    "Cats purr.",
    "Lock the door at night.",
    "Then check the oven.",
    "You must wear a helmet.",
    "The bridge is 40 meters long.",
    "The river floods in spring.",
];

pub fn scenario() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(&SCENARIO_SENTENCES[..]), 0..6).prop_map(|s| s.join(" "))
}

/// A runner with a fixed seed, so every run draws the same cases.
pub fn deterministic_runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

// ---------------------------------------------------------------- invariants

/// Control moved as the executed statement dictates. Returns a description
/// of the first inconsistency.
pub fn check_successors(program: &Program, result: &RunResult) -> Result<(), String> {
    if let (Some(first), Some(start)) = (result.trace.first(), program.first_line()) {
        if first.line != start {
            return Err(format!("started at {} instead of {start}", first.line));
        }
    }
    for (i, e) in result.trace.iter().enumerate() {
        let stmt = program.get(e.line).ok_or_else(|| format!("executed unknown line {}", e.line))?;
        let natural = program.successor(e.line).map_or(NextLine::End, NextLine::Line);
        let allowed: Vec<NextLine> = match stmt {
            Statement::End => vec![NextLine::End],
            Statement::Goto(t) => vec![NextLine::Line(*t)],
            Statement::If { target, .. } => vec![NextLine::Line(*target), natural],
            _ => vec![natural],
        };
        if !allowed.contains(&e.next) {
            return Err(format!("line {}: next {} not in {allowed:?}", e.line, e.next));
        }
        if let Some(f) = result.trace.get(i + 1) {
            if e.next != NextLine::Line(f.line) {
                return Err(format!("line {} claims next {} but {} ran", e.line, e.next, f.line));
            }
        }
    }
    Ok(())
}

fn list(m: &MemoryState, f: ListField) -> Vec<String> {
    match f {
        ListField::Declarative => m.declarative.clone(),
        ListField::Procedural => m.procedural.clone(),
        ListField::Conflicts => m.conflicts.iter().map(ToString::to_string).collect(),
    }
}

/// Outside resolution steps every list only grows at its end.
pub fn check_monotonic(program: &Program, result: &RunResult) -> Result<(), String> {
    let empty = MemoryState::new();
    let mut prev = &empty;
    for e in &result.trace {
        let stmt = program.get(e.line).expect("line exists");
        if !stmt.is_resolve() {
            for f in ListField::ALL {
                let (before, after) = (list(prev, f), list(&e.memory, f));
                if after.len() < before.len() || after[..before.len()] != before[..] {
                    return Err(format!("line {}: {f} changed from {before:?} to {after:?}", e.line));
                }
            }
        }
        prev = &e.memory;
    }
    Ok(())
}

// ---------------------------------------------------------------- oracle pool

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Q {
    Plain,
    Always,
    Never,
    Qualified,
}

/// A sentence with hand-written annotations: subject, polarity (true =
/// affirmative), quantifier and value slot.
pub struct Annotated {
    pub text: &'static str,
    pub subject: &'static str,
    pub positive: bool,
    pub quantifier: Q,
    pub value: Option<&'static str>,
}

const fn fact(
    text: &'static str,
    subject: &'static str,
    positive: bool,
    quantifier: Q,
    value: Option<&'static str>,
) -> Annotated {
    Annotated { text, subject, positive, quantifier, value }
}

pub const POOL: [Annotated; 20] = [
    fact("The sky is clear.", "sky", true, Q::Plain, None),
    fact("The sky is not clear.", "sky", false, Q::Plain, None),
    fact("The sky is always clear.", "sky", true, Q::Always, None),
    fact("The sky is sometimes clear.", "sky", true, Q::Qualified, None),
    fact("The sky is never clear.", "sky", false, Q::Never, None),
    fact("The shop opens at 9am.", "shop", true, Q::Plain, Some("9h")),
    fact("The shop opens at 10am.", "shop", true, Q::Plain, Some("10h")),
    fact("The shop opens at 9.", "shop", true, Q::Plain, Some("9h")),
    fact("The shop never opens at 9am.", "shop", false, Q::Never, Some("9h")),
    fact("The car is red.", "car", true, Q::Plain, Some("red")),
    fact("The car is blue.", "car", true, Q::Plain, Some("blue")),
    fact("The car is not red.", "car", false, Q::Plain, Some("red")),
    fact("The alarm always rings.", "alarm", true, Q::Always, None),
    fact("The alarm usually rings.", "alarm", true, Q::Qualified, None),
    fact("The alarm never rings.", "alarm", false, Q::Never, None),
    fact("The alarm rings.", "alarm", true, Q::Plain, None),
    fact("The river floods in spring.", "river", true, Q::Plain, None),
    fact("Cats purr.", "cats", true, Q::Plain, None),
    fact("The meeting starts at 14:00.", "meeting", true, Q::Plain, Some("14h")),
    fact("The meeting starts at 2pm.", "meeting", true, Q::Plain, Some("14h")),
];

/// Brute-force verdict for two annotated facts, from the written rules.
pub fn oracle_pair(x: &Annotated, y: &Annotated) -> Option<ConflictCategory> {
    if x.subject != y.subject {
        return None;
    }
    let absolute = |q: Q| matches!(q, Q::Always | Q::Never);
    let clash = |p: Q, q: Q| absolute(p) && (q == Q::Qualified || (absolute(q) && p != q));
    if clash(x.quantifier, y.quantifier) || clash(y.quantifier, x.quantifier) {
        Some(ConflictCategory::AbsoluteQualified)
    } else if x.positive != y.positive && x.value == y.value {
        Some(ConflictCategory::Negation)
    } else if x.positive == y.positive && x.value.is_some() && y.value.is_some() && x.value != y.value {
        Some(ConflictCategory::NumericCategorical)
    } else {
        None
    }
}

/// Expected `(a, b, category)` triples for a subset, in pairwise order.
pub fn oracle_detect(subset: &[usize]) -> Vec<(&'static str, &'static str, ConflictCategory)> {
    let mut out = Vec::new();
    for (k, &i) in subset.iter().enumerate() {
        for &j in &subset[k + 1..] {
            if let Some(c) = oracle_pair(&POOL[i], &POOL[j]) {
                out.push((POOL[i].text, POOL[j].text, c));
            }
        }
    }
    out
}

/// Every index subset of `0..n` with at most `k` members, each ascending.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == k {
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------- stub server

#[derive(Clone, Debug)]
pub struct CapturedRequest {
    pub method: String,
    pub path: String,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

impl CapturedRequest {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).expect("request body is JSON")
    }
}

/// Loopback HTTP server answering from a script; the last reply repeats.
pub struct StubServer {
    pub url: String,
    pub requests: Arc<Mutex<Vec<CapturedRequest>>>,
    stop: Arc<AtomicBool>,
    addr: std::net::SocketAddr,
    handle: Option<JoinHandle<()>>,
}

/// A chat completion payload carrying `content`.
pub fn completion(content: &str) -> String {
    serde_json::json!({
        "id": "stub",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}]
    })
    .to_string()
}

fn read_request(stream: &mut TcpStream) -> Option<CapturedRequest> {
    let mut reader = BufReader::new(stream.try_clone().ok()?);
    let mut first = String::new();
    reader.read_line(&mut first).ok()?;
    let mut parts = first.split_whitespace();
    let method = parts.next()?.to_string();
    let path = parts.next()?.to_string();
    let mut headers = Vec::new();
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).ok()?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            headers.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    let len: usize = headers
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case("content-length"))
        .and_then(|(_, v)| v.parse().ok())
        .unwrap_or(0);
    let mut body = vec![0; len];
    reader.read_exact(&mut body).ok()?;
    Some(CapturedRequest { method, path, headers, body: String::from_utf8_lossy(&body).into_owned() })
}

impl StubServer {
    /// Replies with `(status, body)` in order.
    pub fn start(script: Vec<(u16, String)>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        let addr = listener.local_addr().unwrap();
        let requests = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));
        let (reqs, halt) = (requests.clone(), stop.clone());
        let handle = std::thread::spawn(move || {
            let mut served = 0;
            for stream in listener.incoming() {
                if halt.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(mut stream) = stream else { continue };
                let Some(req) = read_request(&mut stream) else { continue };
                reqs.lock().unwrap().push(req);
                let (status, body) = &script[served.min(script.len() - 1)];
                served += 1;
                let reply = format!(
                    "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(reply.as_bytes());
                let _ = stream.flush();
            }
        });
        StubServer { url: format!("http://{addr}/v1"), requests, stop, addr, handle: Some(handle) }
    }

    /// Replies with each content string as a 200 completion.
    pub fn completions(contents: &[&str]) -> Self {
        Self::start(contents.iter().map(|c| (200, completion(c))).collect())
    }

    pub fn captured(&self) -> Vec<CapturedRequest> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// A loopback listener that counts connection attempts without answering.
pub struct Tripwire {
    pub url: String,
    hits: Arc<Mutex<usize>>,
    stop: Arc<AtomicBool>,
    addr: std::net::SocketAddr,
}

impl Tripwire {
    pub fn start() -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(Mutex::new(0));
        let stop = Arc::new(AtomicBool::new(false));
        let (h, s) = (hits.clone(), stop.clone());
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                if s.load(Ordering::SeqCst) {
                    break;
                }
                if stream.is_ok() {
                    *h.lock().unwrap() += 1;
                }
            }
        });
        Tripwire { url: format!("http://{addr}/v1"), hits, stop, addr }
    }

    pub fn hits(&self) -> usize {
        *self.hits.lock().unwrap()
    }
}

impl Drop for Tripwire {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
    }
}
