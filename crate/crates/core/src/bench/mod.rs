//! Scenario suite, D/C/R scoring and reports.
//!
//! D: both contradictory statements were extracted into `declarative`.
//! C: `conflicts` held the expected pair at some point of the run.
//! R: the run ended with empty `conflicts` and a resolution naming every
//! resolution keyword. Full chain requires all three.

mod report;
mod scenario;
mod score;
mod suite;

pub use report::{format_hundredths, render_cards, render_report, render_table, report_json, TABLE_HEADER};
pub use scenario::{builtin_suite, load_suite, parse_suite, Scenario, SuiteError, SUITE_V1};
pub use score::{matches_keywords, score_run, tokens, RunEvidence, ScoreCard};
pub use suite::{mean_hundredths, run_suite, InModelRunner, InterpreterRunner, Means, ScenarioRunner, SuiteReport};
