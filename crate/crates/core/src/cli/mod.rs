//! Command-line front end: `run`, `step`, `bench`, `check-trace`, `fmt`.
//!
//! Exit codes: 0 completed, 1 parse or configuration error, 2 runtime
//! error (or conformance violations, or unformatted files under
//! `fmt --check`), 3 step limit exceeded.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    builtin_suite, load_suite, render_cards, render_report, report_json, run_suite, InModelRunner, InterpreterRunner,
};
use crate::cogops::{CognitiveOps, RuleProvider};
use crate::interpreter::{
    parse_trace_jsonl, parse_trace_text, render_trace, render_trace_entry, run, write_trace_jsonl, Limits, Machine,
    Outcome, RunResult, Status, DEFAULT_STEP_LIMIT,
};
use crate::lang::{format_program, parse_program, Program, CONFLICT_RESOLUTION_PROGRAM};
use crate::llm::{
    check_conformance, check_model_trace, run_in_model, EndpointConfig, HttpChatClient, InterpreterFile, LlmProvider,
    DEFAULT_IN_FLIGHT,
};
use crate::memory::render_final_memory;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_STEP_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cogbasic", version, about = "Run Cognitive BASIC programs and benchmarks")]
pub struct Cli {
    /// More output; -vv adds provider prompt and reply excerpts.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Print only the final memory.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// 0 = final memory only, 1 = full trace, 2 = plus provider excerpts.
    pub fn verbosity(&self) -> u8 {
        if self.quiet {
            0
        } else {
            (1 + self.verbose).min(2)
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a program and print its trace.
    Run(RunArgs),
    /// Execute a program one statement per Enter.
    Step(RunArgs),
    /// Score a provider on a scenario suite.
    Bench(BenchArgs),
    /// Check a recorded trace against a program.
    CheckTrace(CheckArgs),
    /// Rewrite programs in canonical form.
    Fmt(FmtArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProviderChoice {
    /// Deterministic lexicon rules; no network.
    Rules,
    /// One model call per builtin.
    Llm,
    /// The model executes the whole program.
    LlmInmodel,
}

#[derive(Debug, Args)]
pub struct EndpointArgs {
    #[arg(long, value_enum, default_value = "rules")]
    pub provider: ProviderChoice,
    /// Base URL of an OpenAI-compatible API (or COGBASIC_LLM_URL).
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model name (or COGBASIC_LLM_MODEL).
    #[arg(long)]
    pub model: Option<String>,
    /// Interpreter file sent to the model in llm-inmodel mode.
    #[arg(long)]
    pub interpreter_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Program file; defaults to the built-in conflict resolution program.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Scenario text file.
    #[arg(long, conflicts_with = "text")]
    pub scenario: Option<PathBuf>,
    /// Inline scenario text.
    #[arg(long)]
    pub text: Option<String>,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    pub step_limit: usize,
    /// Write the trace as JSON lines to this file.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Scenario suite (JSON lines); defaults to the shipped suite.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    #[arg(long)]
    pub program: Option<PathBuf>,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    pub step_limit: usize,
    /// Write machine-readable results to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scenarios run concurrently.
    #[arg(long, default_value_t = DEFAULT_IN_FLIGHT)]
    pub in_flight: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Trace file: the text block format or JSON lines.
    pub trace: PathBuf,
    #[arg(long)]
    pub program: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FmtArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Report files that are not canonical instead of rewriting them.
    #[arg(long)]
    pub check: bool,
}

/// Terminal streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_program(path: Option<&Path>) -> Result<Program, Failure> {
    let (name, source) = match path {
        Some(p) => (p.display().to_string(), read(p)?),
        None => ("<built-in>".to_string(), CONFLICT_RESOLUTION_PROGRAM.to_string()),
    };
    parse_program(&source).map_err(|e| usage(format!("{name}: {e}")))
}

fn load_scenario(args: &RunArgs) -> Result<String, Failure> {
    match (&args.scenario, &args.text) {
        (Some(p), _) => read(p),
        (None, Some(t)) => Ok(t.clone()),
        (None, None) => Ok(String::new()),
    }
}

fn endpoint_client(args: &EndpointArgs) -> Result<HttpChatClient, Failure> {
    let config =
        EndpointConfig::resolve(args.endpoint.clone(), args.model.clone(), None).map_err(|e| usage(e.to_string()))?;
    HttpChatClient::new(config).map_err(|e| usage(e.to_string()))
}

fn interpreter_file(args: &EndpointArgs) -> Result<InterpreterFile, Failure> {
    match &args.interpreter_file {
        Some(p) => Ok(InterpreterFile::new(read(p)?)),
        None => Ok(InterpreterFile::builtin()),
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure { code: EXIT_RUNTIME, message: format!("output error: {e}") }
}

fn write_trace_file(path: &Path, result: &RunResult) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    write_trace_jsonl(&mut w, result).and_then(|_| w.flush()).map_err(io_err)
}

fn exit_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Completed | Outcome::Interrupted => EXIT_OK,
        Outcome::RuntimeError(_) => EXIT_RUNTIME,
        Outcome::StepLimitExceeded => EXIT_STEP_LIMIT,
    }
}

fn finish_run(result: &RunResult, args: &RunArgs, verbosity: u8, io: &mut Io) -> Result<i32, Failure> {
    let text = if verbosity == 0 { render_final_memory(&result.final_memory) } else { render_trace(result) };
    io.stdout.write_all(text.as_bytes()).map_err(io_err)?;
    if let Some(path) = &args.trace_out {
        write_trace_file(path, result)?;
    }
    if let Outcome::RuntimeError(e) = &result.outcome {
        writeln!(io.stderr, "error: {e}").map_err(io_err)?;
    } else if let Outcome::StepLimitExceeded = result.outcome {
        writeln!(io.stderr, "error: step limit of {} reached", args.step_limit).map_err(io_err)?;
    }
    Ok(exit_code(&result.outcome))
}

fn cmd_run(args: &RunArgs, verbosity: u8, io: &mut Io) -> Result<i32, Failure> {
    let program = load_program(args.program.as_deref())?;
    let scenario = load_scenario(args)?;
    let limits = Limits { step_limit: args.step_limit };
    match args.endpoint.provider {
        ProviderChoice::Rules => {
            finish_run(&run(&program, &scenario, &RuleProvider::new(), limits), args, verbosity, io)
        }
        ProviderChoice::Llm => {
            let ops = LlmProvider::new(endpoint_client(&args.endpoint)?);
            finish_run(&run(&program, &scenario, &ops, limits), args, verbosity, io)
        }
        ProviderChoice::LlmInmodel => {
            let client = endpoint_client(&args.endpoint)?;
            let interpreter = interpreter_file(&args.endpoint)?;
            let trace = match run_in_model(&client, &interpreter, &program, &scenario) {
                Ok(t) => t,
                Err(e) => {
                    if let Some(raw) = e.raw() {
                        if verbosity > 0 {
                            io.stdout.write_all(raw.as_bytes()).map_err(io_err)?;
                        }
                    }
                    return Err(Failure { code: EXIT_RUNTIME, message: e.to_string() });
                }
            };
            let shown = if verbosity == 0 { render_final_memory(&trace.final_memory) } else { trace.raw.clone() };
            io.stdout.write_all(shown.as_bytes()).map_err(io_err)?;
            for w in &trace.warnings {
                writeln!(io.stderr, "warning: {w}").map_err(io_err)?;
            }
            for v in check_model_trace(&program, &trace) {
                writeln!(io.stderr, "violation {v}").map_err(io_err)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_step(args: &RunArgs, verbosity: u8, io: &mut Io) -> Result<i32, Failure> {
    let program = load_program(args.program.as_deref())?;
    let scenario = load_scenario(args)?;
    let rules;
    let llm;
    let ops: &dyn CognitiveOps = match args.endpoint.provider {
        ProviderChoice::Rules => {
            rules = RuleProvider::new();
            &rules
        }
        ProviderChoice::Llm => {
            llm = LlmProvider::new(endpoint_client(&args.endpoint)?);
            &llm
        }
        ProviderChoice::LlmInmodel => return Err(usage("step needs a per-statement provider (rules or llm)")),
    };
    let mut machine = Machine::new(program, scenario, Limits { step_limit: args.step_limit });
    let mut trace = Vec::new();
    let mut continuous = false;
    let outcome = loop {
        match machine.status() {
            Status::Ended => break Outcome::Completed,
            Status::Failed(_) => {
                let line = trace.last().map_or(0, |e: &crate::interpreter::TraceEntry| e.line);
                break Outcome::RuntimeError(crate::interpreter::RuntimeError::RanOffEnd { line });
            }
            Status::Running => {}
        }
        if !continuous {
            let line = machine.current_line().unwrap_or_default();
            write!(io.stdout, "[{line}] Enter=step m=memory c=continue q=quit> ").map_err(io_err)?;
            io.stdout.flush().map_err(io_err)?;
            let mut input = String::new();
            let read = io.stdin.read_line(&mut input).map_err(io_err)?;
            match input.trim() {
                _ if read == 0 => break Outcome::Interrupted,
                "q" => break Outcome::Interrupted,
                "m" => {
                    io.stdout.write_all(render_final_memory(machine.memory()).as_bytes()).map_err(io_err)?;
                    continue;
                }
                "c" => continuous = true,
                "" => {}
                other => {
                    writeln!(io.stdout, "unknown command {other:?}").map_err(io_err)?;
                    continue;
                }
            }
        }
        match machine.step(ops) {
            Ok(entry) => {
                if verbosity > 0 {
                    io.stdout.write_all(render_trace_entry(&entry).as_bytes()).map_err(io_err)?;
                }
                trace.push(entry);
            }
            Err(crate::interpreter::RuntimeError::StepLimit { .. }) => break Outcome::StepLimitExceeded,
            Err(e) => break Outcome::RuntimeError(e),
        }
    };
    let result = machine.into_result(trace, outcome);
    if !result.outcome.is_completed() && verbosity > 0 {
        writeln!(io.stdout, "OUTCOME: {}\n", result.outcome.label()).map_err(io_err)?;
    }
    io.stdout.write_all(render_final_memory(&result.final_memory).as_bytes()).map_err(io_err)?;
    if let Some(path) = &args.trace_out {
        write_trace_file(path, &result)?;
    }
    if let Outcome::RuntimeError(e) = &result.outcome {
        writeln!(io.stderr, "error: {e}").map_err(io_err)?;
    }
    Ok(exit_code(&result.outcome))
}

fn cmd_bench(args: &BenchArgs, verbosity: u8, io: &mut Io) -> Result<i32, Failure> {
    let suite = match &args.suite {
        Some(p) => load_suite(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => builtin_suite(),
    };
    let program = load_program(args.program.as_deref())?;
    let limits = Limits { step_limit: args.step_limit };
    let report = match args.endpoint.provider {
        ProviderChoice::Rules => {
            run_suite(&suite, &program, &InterpreterRunner { ops: RuleProvider::new(), limits }, args.in_flight)
        }
        ProviderChoice::Llm => {
            let ops = LlmProvider::new(endpoint_client(&args.endpoint)?);
            run_suite(&suite, &program, &InterpreterRunner { ops, limits }, args.in_flight)
        }
        ProviderChoice::LlmInmodel => {
            let runner = InModelRunner {
                backend: endpoint_client(&args.endpoint)?,
                interpreter: interpreter_file(&args.endpoint)?,
            };
            run_suite(&suite, &program, &runner, args.in_flight)
        }
    };
    io.stdout.write_all(render_report(&report).as_bytes()).map_err(io_err)?;
    if verbosity > 1 {
        writeln!(io.stdout).map_err(io_err)?;
        io.stdout.write_all(render_cards(&report.cards).as_bytes()).map_err(io_err)?;
    } else if verbosity > 0 {
        for card in report.cards.iter().filter(|c| !c.notes.is_empty()) {
            writeln!(io.stderr, "{}: {}", card.scenario_id, card.notes).map_err(io_err)?;
        }
    }
    if let Some(path) = &args.out {
        fs::write(path, report_json(&report) + "\n")
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn cmd_check_trace(args: &CheckArgs, io: &mut Io) -> Result<i32, Failure> {
    let program = load_program(args.program.as_deref())?;
    let text = read(&args.trace)?;
    let is_jsonl = text.trim_start().starts_with('{');
    let parsed = if is_jsonl { parse_trace_jsonl(&text) } else { parse_trace_text(&text) }
        .map_err(|e| usage(format!("{}: {e}", args.trace.display())))?;
    for w in &parsed.warnings {
        writeln!(io.stderr, "warning: {w}").map_err(io_err)?;
    }
    let violations = check_conformance(&program, &parsed.entries, &parsed.final_memory);
    if violations.is_empty() {
        writeln!(io.stdout, "conformant: {} entries, no violations", parsed.entries.len()).map_err(io_err)?;
        return Ok(EXIT_OK);
    }
    for v in &violations {
        writeln!(io.stdout, "{v}").map_err(io_err)?;
    }
    writeln!(io.stdout, "{} violation(s)", violations.len()).map_err(io_err)?;
    Ok(EXIT_RUNTIME)
}

fn cmd_fmt(args: &FmtArgs, io: &mut Io) -> Result<i32, Failure> {
    let mut unformatted = 0;
    for path in &args.files {
        let source = read(path)?;
        let program = parse_program(&source).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let canonical = format_program(&program) + "\n";
        if canonical == source {
            continue;
        }
        if args.check {
            unformatted += 1;
            writeln!(io.stdout, "{} is not in canonical form", path.display()).map_err(io_err)?;
        } else {
            fs::write(path, canonical).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            writeln!(io.stdout, "formatted {}", path.display()).map_err(io_err)?;
        }
    }
    Ok(if unformatted > 0 { EXIT_RUNTIME } else { EXIT_OK })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli, io: &mut Io) -> i32 {
    let v = cli.verbosity();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, v, io),
        Command::Step(a) => cmd_step(a, v, io),
        Command::Bench(a) => cmd_bench(a, v, io),
        Command::CheckTrace(a) => cmd_check_trace(a, io),
        Command::Fmt(a) => cmd_fmt(a, io),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, io: &mut Io) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, io),
        Err(e) => {
            let _ = write!(io.stderr, "{}", e.render());
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = write!(io.stdout, "{}", e.render());
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
    }
}

/// Log level for a verbosity: warnings by default, debug at -vv.
pub fn log_level(verbosity: u8) -> log::LevelFilter {
    match verbosity {
        0 | 1 => log::LevelFilter::Warn,
        _ => log::LevelFilter::Debug,
    }
}
