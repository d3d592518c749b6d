use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cogops::CognitiveOps;
use crate::interpreter::{run, Limits, Outcome};
use crate::lang::Program;
use crate::llm::{run_in_model, ChatBackend, InterpreterFile};

use super::{score_run, RunEvidence, Scenario, ScoreCard};

/// Executes one scenario and returns what scoring needs, or a failure note.
pub trait ScenarioRunner: Sync {
    fn label(&self) -> String;

    fn run(&self, program: &Program, scenario: &Scenario) -> Result<RunEvidence, String>;
}

/// Runs the deterministic interpreter with a provider behind the builtins.
pub struct InterpreterRunner<P> {
    pub ops: P,
    pub limits: Limits,
}

impl<P: CognitiveOps + Sync> ScenarioRunner for InterpreterRunner<P> {
    fn label(&self) -> String {
        self.ops.label()
    }

    fn run(&self, program: &Program, scenario: &Scenario) -> Result<RunEvidence, String> {
        let result = run(program, &scenario.text, &self.ops, self.limits);
        match &result.outcome {
            Outcome::Completed => Ok(RunEvidence::from_run(&result)),
            Outcome::StepLimitExceeded => Err(format!("step limit exceeded after {} steps", result.steps())),
            Outcome::RuntimeError(e) => Err(format!("runtime error: {e}")),
            Outcome::Interrupted => Err("interrupted".into()),
        }
    }
}

/// Asks the model to execute the whole program and scores its own trace.
pub struct InModelRunner<B> {
    pub backend: B,
    pub interpreter: InterpreterFile,
}

impl<B: ChatBackend> ScenarioRunner for InModelRunner<B> {
    fn label(&self) -> String {
        format!("{} (in-model)", self.backend.label())
    }

    fn run(&self, program: &Program, scenario: &Scenario) -> Result<RunEvidence, String> {
        let trace =
            run_in_model(&self.backend, &self.interpreter, program, &scenario.text).map_err(|e| e.to_string())?;
        Ok(RunEvidence::from_trace(&trace.entries, &trace.final_memory))
    }
}

/// Column means, exact.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Means {
    pub d: f64,
    pub c: f64,
    pub r: f64,
    pub full_chain: f64,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub label: String,
    /// Ordered by scenario id.
    pub cards: Vec<ScoreCard>,
    /// Ids of control scenarios, which are left out of the means.
    pub controls: Vec<String>,
    pub runtime: Duration,
}

/// `sum / n` in hundredths, rounded half up, in exact integer arithmetic.
pub fn mean_hundredths(sum: u64, n: u64) -> u64 {
    assert!(n > 0, "mean of an empty column");
    (200 * sum + n) / (2 * n)
}

impl SuiteReport {
    /// Cards that count towards the means: all non-control scenarios, or
    /// every card if the suite has only controls.
    pub fn scored(&self) -> Vec<&ScoreCard> {
        let main: Vec<&ScoreCard> = self.cards.iter().filter(|c| !self.controls.contains(&c.scenario_id)).collect();
        if main.is_empty() {
            self.cards.iter().collect()
        } else {
            main
        }
    }

    fn column(&self, f: impl Fn(&ScoreCard) -> u8) -> (u64, u64) {
        let cards = self.scored();
        (cards.iter().map(|c| u64::from(f(c))).sum(), cards.len() as u64)
    }

    pub fn means(&self) -> Means {
        let mean = |(s, n): (u64, u64)| if n == 0 { 0.0 } else { s as f64 / n as f64 };
        Means {
            d: mean(self.column(|c| c.d)),
            c: mean(self.column(|c| c.c)),
            r: mean(self.column(|c| c.r)),
            full_chain: mean(self.column(|c| c.full_chain)),
        }
    }

    /// D, C, R and full-chain means in hundredths, rounded half up.
    pub fn rounded(&self) -> [u64; 4] {
        let h = |(s, n): (u64, u64)| if n == 0 { 0 } else { mean_hundredths(s, n) };
        [h(self.column(|c| c.d)), h(self.column(|c| c.c)), h(self.column(|c| c.r)), h(self.column(|c| c.full_chain))]
    }
}

/// Runs and scores every scenario, at most `in_flight` at a time.
pub fn run_suite(suite: &[Scenario], program: &Program, runner: &dyn ScenarioRunner, in_flight: usize) -> SuiteReport {
    let started = Instant::now();
    let score = |s: &Scenario| match runner.run(program, s) {
        Ok(ev) => score_run(s, &ev),
        Err(note) => ScoreCard::failed(&s.id, note),
    };
    let mut cards: Vec<ScoreCard> = match rayon::ThreadPoolBuilder::new().num_threads(in_flight.max(1)).build() {
        Ok(pool) => pool.install(|| suite.par_iter().map(score).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running sequentially");
            suite.iter().map(score).collect()
        }
    };
    cards.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    SuiteReport {
        label: runner.label(),
        cards,
        controls: suite.iter().filter(|s| s.control).map(|s| s.id.clone()).collect(),
        runtime: started.elapsed(),
    }
}
