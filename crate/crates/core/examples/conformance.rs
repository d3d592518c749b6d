//! Check traces against a program: a faithful interpreter trace passes,
//! hand-edited ones trip the violation classes.
//!
//!     cargo run --example conformance

use cogbasic::cogops::RuleProvider;
use cogbasic::interpreter::{parse_trace_text, render_trace, run, Limits, NextLine};
use cogbasic::lang::{parse_program, CONFLICT_RESOLUTION_PROGRAM};
use cogbasic::llm::check_conformance;
use cogbasic::memory::ConflictPair;

fn main() {
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).expect("shipped program parses");
    let result = run(&program, "The sky is clear. The sky is not clear.", &RuleProvider::new(), Limits::default());
    let parsed = parse_trace_text(&render_trace(&result)).expect("rendered trace parses");
    let clean = check_conformance(&program, &parsed.entries, &parsed.final_memory);
    println!("interpreter trace: {} violation(s)", clean.len());

    // claim the IF at line 70 fell through although a conflict is present
    let mut entries = parsed.entries.clone();
    entries[6].next = NextLine::Line(80);
    entries.truncate(7);
    let mut end = entries[6].clone();
    end.line = 80;
    end.instruction = "END".into();
    end.next = NextLine::End;
    entries.push(end);
    println!("\nskipped resolution:");
    for v in check_conformance(&program, &entries, &entries[7].memory) {
        println!("  {v}");
    }

    // a fact vanishes and conflicts survive the resolution step
    let mut entries = parsed.entries.clone();
    entries[4].memory.declarative.pop();
    entries[7].memory.conflicts.push(ConflictPair::parse("x || y").expect("valid pair"));
    println!("\ncorrupted memory:");
    for v in check_conformance(&program, &entries, &parsed.final_memory) {
        println!("  {v}");
    }
}
