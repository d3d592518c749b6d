//! Score the rule provider on the shipped scenario suite and print the
//! results table and JSON.
//!
//!     cargo run --example benchmark

use cogbasic::bench::{builtin_suite, render_cards, render_report, report_json, run_suite, InterpreterRunner};
use cogbasic::cogops::RuleProvider;
use cogbasic::interpreter::Limits;
use cogbasic::lang::{parse_program, CONFLICT_RESOLUTION_PROGRAM};

fn main() {
    let suite = builtin_suite();
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).expect("shipped program parses");
    let runner = InterpreterRunner { ops: RuleProvider::new(), limits: Limits::default() };
    let report = run_suite(&suite, &program, &runner, 4);
    print!("{}", render_report(&report));
    println!();
    print!("{}", render_cards(&report.cards));
    println!("\n{}", report_json(&report));
}
