//! Drive the interpreter one statement at a time and watch control flow.
//!
//!     cargo run --example step_through

use cogbasic::cogops::RuleProvider;
use cogbasic::interpreter::{Limits, Machine, Status};
use cogbasic::lang::{parse_program, CONFLICT_RESOLUTION_PROGRAM};

fn main() {
    let ops = RuleProvider::new();
    for scenario in ["The car is red. The car is blue.", "The car is red. The garage is open."] {
        println!("scenario: {scenario}");
        let program = parse_program(CONFLICT_RESOLUTION_PROGRAM).expect("shipped program parses");
        let mut machine = Machine::new(program, scenario, Limits::default());
        while *machine.status() == Status::Running {
            let entry = machine.step(&ops).expect("step succeeds");
            println!(
                "  {:>3} -> {:<4} conflicts={} | {}",
                entry.line,
                entry.next.to_string(),
                entry.memory.conflicts.len(),
                entry.rationale
            );
        }
        println!("  resolution: {:?}\n", machine.memory().resolution);
    }
}
