use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::memory::ConflictCategory;

/// The shipped suite: 25 conflict scenarios and 5 controls.
pub const SUITE_V1: &str = include_str!("../../data/suite_v1.jsonl");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub text: String,
    /// `None` for control scenarios.
    pub category: Option<ConflictCategory>,
    pub expected_a: Vec<String>,
    pub expected_b: Vec<String>,
    pub resolution_keywords: Vec<String>,
    #[serde(default)]
    pub control: bool,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("record {record}: {detail}")]
    Record { record: usize, detail: String },
    #[error("duplicate scenario id {0:?}")]
    DuplicateId(String),
    #[error("suite is empty")]
    Empty,
    #[error("cannot read suite: {0}")]
    Io(#[from] std::io::Error),
}

impl Scenario {
    fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if self.text.trim().is_empty() {
            return Err("empty text".into());
        }
        match self.category {
            Some(ConflictCategory::Unclassified) => Err("category must be one of the three conflict classes".into()),
            Some(_) if self.expected_a.is_empty() || self.expected_b.is_empty() => {
                Err("conflict scenarios need both keyword lists".into())
            }
            Some(_) if self.control => Err("a control scenario has no category".into()),
            None if !self.control => Err("a scenario without category must be a control".into()),
            _ => Ok(()),
        }
    }
}

/// Parses one scenario per non-blank line.
pub fn parse_suite(text: &str) -> Result<Vec<Scenario>, SuiteError> {
    let mut out: Vec<Scenario> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = i + 1;
        let s: Scenario =
            serde_json::from_str(line).map_err(|e| SuiteError::Record { record, detail: e.to_string() })?;
        s.validate().map_err(|detail| SuiteError::Record { record, detail: format!("{}: {detail}", s.id) })?;
        if out.iter().any(|o| o.id == s.id) {
            return Err(SuiteError::DuplicateId(s.id));
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(SuiteError::Empty);
    }
    Ok(out)
}

pub fn load_suite(path: &Path) -> Result<Vec<Scenario>, SuiteError> {
    parse_suite(&std::fs::read_to_string(path)?)
}

pub fn builtin_suite() -> Vec<Scenario> {
    parse_suite(SUITE_V1).expect("shipped suite is valid")
}
