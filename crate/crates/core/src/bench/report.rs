use serde::Serialize;

use super::{ScoreCard, SuiteReport};

pub const TABLE_HEADER: [&str; 5] = ["Model", "D", "C", "R", "Full Chain"];

/// `92` becomes `0.92`.
pub fn format_hundredths(h: u64) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

/// Aligned plain-text table, one row per report.
pub fn render_table(rows: &[(String, [u64; 4])]) -> String {
    let width = rows.iter().map(|(l, _)| l.len()).chain(Some(TABLE_HEADER[0].len())).max().unwrap_or(5);
    let mut out = format!(
        "{:<width$}  {:>4}  {:>4}  {:>4}  {:>10}\n",
        TABLE_HEADER[0], TABLE_HEADER[1], TABLE_HEADER[2], TABLE_HEADER[3], TABLE_HEADER[4]
    );
    for (label, h) in rows {
        out.push_str(&format!(
            "{label:<width$}  {:>4}  {:>4}  {:>4}  {:>10}\n",
            format_hundredths(h[0]),
            format_hundredths(h[1]),
            format_hundredths(h[2]),
            format_hundredths(h[3])
        ));
    }
    out
}

pub fn render_report(report: &SuiteReport) -> String {
    render_table(&[(report.label.clone(), report.rounded())])
}

/// One line per scenario: id, the four scores, and notes.
pub fn render_cards(cards: &[ScoreCard]) -> String {
    cards
        .iter()
        .map(|c| {
            let mut line = format!("{:<8} D={} C={} R={} full={}", c.scenario_id, c.d, c.c, c.r, c.full_chain);
            if !c.notes.is_empty() {
                line.push_str(&format!("  ({})", c.notes));
            }
            line.push('\n');
            line
        })
        .collect()
}

#[derive(Serialize)]
struct MeansJson {
    d: f64,
    c: f64,
    r: f64,
    full_chain: f64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    provider: &'a str,
    scored_scenarios: usize,
    means: MeansJson,
    runtime_seconds: f64,
    scenarios: Vec<CardJson<'a>>,
}

#[derive(Serialize)]
struct CardJson<'a> {
    #[serde(flatten)]
    card: &'a ScoreCard,
    control: bool,
}

/// Machine-readable results; means are the rounded table values.
pub fn report_json(report: &SuiteReport) -> String {
    let [d, c, r, f] = report.rounded().map(|h| h as f64 / 100.0);
    let json = ReportJson {
        provider: &report.label,
        scored_scenarios: report.scored().len(),
        means: MeansJson { d, c, r, full_chain: f },
        runtime_seconds: report.runtime.as_secs_f64(),
        scenarios: report
            .cards
            .iter()
            .map(|card| CardJson { card, control: report.controls.contains(&card.scenario_id) })
            .collect(),
    };
    serde_json::to_string_pretty(&json).expect("report serializes")
}
