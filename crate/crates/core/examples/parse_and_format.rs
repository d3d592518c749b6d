//! Parse a program, print it in canonical form, and show how syntax errors
//! are reported.
//!
//!     cargo run --example parse_and_format

use cogbasic::lang::{format_program, parse_program, EXTRACT_KNOWLEDGE_PROGRAM};

fn main() {
    let sloppy =
        "20   facts=EXTRACT_DECLARATIVE( working )\n10 LET   working=INPUT( )\n30 ADD declarative FROM facts\n40 END\n";
    let program = parse_program(sloppy).expect("valid program");
    println!("canonical form:\n{}\n", format_program(&program));

    let shipped = parse_program(EXTRACT_KNOWLEDGE_PROGRAM).expect("shipped program parses");
    println!("shipped extraction program has {} lines\n", shipped.len());

    let broken = "10 LET working = INPUT(\n20 ADD memory FROM facts\n20 END\n";
    match parse_program(broken) {
        Ok(_) => unreachable!("program is malformed"),
        Err(e) => println!("errors:\n{e}"),
    }
}
