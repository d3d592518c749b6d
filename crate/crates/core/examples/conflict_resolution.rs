//! Run the conflict resolution program with the rule provider and print the
//! full trace.
//!
//!     cargo run --example conflict_resolution -- "The shop opens at 9am. The shop opens at 10am."

use cogbasic::cogops::RuleProvider;
use cogbasic::interpreter::{render_trace, run, Limits};
use cogbasic::lang::{parse_program, CONFLICT_RESOLUTION_PROGRAM};

fn main() {
    let scenario = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "The sky is clear. The sky is not clear. Check the forecast before leaving.".into());
    let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).expect("shipped program parses");
    let result = run(&program, &scenario, &RuleProvider::new(), Limits::default());
    print!("{}", render_trace(&result));
    let path: Vec<String> = result.trace.iter().map(|e| e.line.to_string()).collect();
    println!("\nexecuted lines: {}", path.join(" "));
    println!("outcome: {}", result.outcome.label());
}
