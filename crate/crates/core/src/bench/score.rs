use serde::Serialize;

use crate::interpreter::{RunResult, TraceEntry};
use crate::memory::{ConflictPair, MemoryState};

use super::Scenario;

/// What a run leaves behind for scoring. Extraction and detection are
/// judged on everything seen during the run, since resolution rewrites
/// `declarative` and clears `conflicts`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunEvidence {
    pub final_memory: MemoryState,
    pub declarative_seen: Vec<String>,
    pub conflicts_seen: Vec<ConflictPair>,
}

impl RunEvidence {
    pub fn from_snapshots<'a>(
        snapshots: impl IntoIterator<Item = &'a MemoryState>,
        final_memory: &'a MemoryState,
    ) -> Self {
        let mut ev = RunEvidence { final_memory: final_memory.clone(), ..Default::default() };
        for m in snapshots.into_iter().chain(Some(final_memory)) {
            for d in &m.declarative {
                if !ev.declarative_seen.contains(d) {
                    ev.declarative_seen.push(d.clone());
                }
            }
            for c in &m.conflicts {
                if !ev.conflicts_seen.iter().any(|s| s.same_statements(c)) {
                    ev.conflicts_seen.push(c.clone());
                }
            }
        }
        ev
    }

    pub fn from_trace(entries: &[TraceEntry], final_memory: &MemoryState) -> Self {
        Self::from_snapshots(entries.iter().map(|e| &e.memory), final_memory)
    }

    pub fn from_run(result: &RunResult) -> Self {
        Self::from_trace(&result.trace, &result.final_memory)
    }
}

/// Lowercased whitespace tokens with leading and trailing punctuation removed.
pub fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// True when every keyword occurs in `text` as a token (or, for a
/// multi-word keyword, as a run of consecutive tokens).
pub fn matches_keywords(text: &str, keywords: &[String]) -> bool {
    let toks = tokens(text);
    keywords.iter().all(|k| {
        let needle = tokens(k);
        !needle.is_empty() && toks.windows(needle.len()).any(|w| w == needle.as_slice())
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScoreCard {
    pub scenario_id: String,
    pub d: u8,
    pub c: u8,
    pub r: u8,
    pub full_chain: u8,
    pub notes: String,
}

impl ScoreCard {
    pub fn failed(scenario_id: &str, notes: impl Into<String>) -> Self {
        Self { scenario_id: scenario_id.to_string(), d: 0, c: 0, r: 0, full_chain: 0, notes: notes.into() }
    }
}

pub fn score_run(scenario: &Scenario, ev: &RunEvidence) -> ScoreCard {
    let mut notes = Vec::new();
    let (d, c, r) = if scenario.control {
        let c = ev.conflicts_seen.is_empty();
        let r = ev.final_memory.resolution.trim().is_empty();
        if !c {
            notes.push(format!("control run produced {} conflict(s)", ev.conflicts_seen.len()));
        }
        if !r {
            notes.push("control run wrote a resolution".to_string());
        }
        (true, c, r)
    } else {
        let any = |kw: &[String]| ev.declarative_seen.iter().any(|f| matches_keywords(f, kw));
        let d = any(&scenario.expected_a) && any(&scenario.expected_b);
        if !d {
            notes.push("expected facts not extracted".to_string());
        }
        let side = |s: &str, kw: &[String]| matches_keywords(s, kw);
        let c = ev.conflicts_seen.iter().any(|p| {
            (side(p.a(), &scenario.expected_a) && side(p.b(), &scenario.expected_b))
                || (side(p.a(), &scenario.expected_b) && side(p.b(), &scenario.expected_a))
        });
        if !c {
            notes.push("expected contradiction not detected".to_string());
        }
        let m = &ev.final_memory;
        let r = !m.resolution.trim().is_empty()
            && m.conflicts.is_empty()
            && matches_keywords(&m.resolution, &scenario.resolution_keywords);
        if !r {
            notes.push(if !m.conflicts.is_empty() {
                "conflicts were not cleared".to_string()
            } else {
                "resolution missing or lacks keywords".to_string()
            });
        }
        (d, c, r)
    };
    let full = d && c && r;
    ScoreCard {
        scenario_id: scenario.id.clone(),
        d: d.into(),
        c: c.into(),
        r: r.into(),
        full_chain: full.into(),
        notes: notes.join("; "),
    }
}
