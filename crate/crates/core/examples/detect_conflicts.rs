//! Use the rule provider directly: analyze facts, detect the three kinds of
//! contradiction, and merge each pair.
//!
//!     cargo run --example detect_conflicts

use cogbasic::cogops::RuleProvider;

fn main() {
    let ops = RuleProvider::new();
    let facts: Vec<String> = [
        "The alarm always rings at dawn.",
        "The sky is clear.",
        "The shop opens at 9am.",
        "The alarm sometimes rings at dawn.",
        "The sky is not clear.",
        "The shop opens at 10am.",
        "The shop sells bread.",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    for fact in &facts {
        let a = ops.analyze(fact);
        println!(
            "{fact:<38} key={:?} polarity={:?} quantifier={:?} value={:?}",
            a.subject_key.join(" "),
            a.polarity,
            a.quantifier,
            a.value.map(|v| v.key)
        );
    }
    println!();
    let pairs = ops.detect(&facts);
    for pair in &pairs {
        println!("[{}] {pair}", pair.category());
        println!("    -> {}", ops.merge(pair));
    }
    let resolution = ops.resolve(&pairs).expect("pairs found");
    println!("\nsummary: {}", resolution.summary);
}
