use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::eval::Score;

use super::engine::{NodeSource, TopLine};
use super::ratio::RatioInputs;
use super::{EngineFamily, SuiteRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format '{s}' (markdown or csv)")),
        }
    }
}

pub const CSV_HEADER: &str = "study,engine,move,q_pawns,winprob,nodes,ms,depth,solved";

/// Percentage to three significant figures: `100%`, `16.3%`, `8.23%`.
pub fn format_percent(p: f64) -> String {
    let x = (p * 100.0).clamp(0.0, 100.0);
    let digits = if x >= 99.95 {
        0
    } else if x >= 9.995 {
        1
    } else if x >= 0.9995 {
        2
    } else {
        3
    };
    format!("{x:.digits$}%")
}

fn csv_q(score: Score) -> String {
    match score {
        Score::MateIn(n) => format!("#{n}"),
        Score::Centipawns(c) => format!("{:.2}", c as f64 / 100.0),
    }
}

pub fn render_report(records: &[SuiteRecord], format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(records),
        ReportFormat::Csv => render_csv(records),
    }
}

fn render_csv(records: &[SuiteRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let tail = format!("{},{},{},{}", r.nodes, r.elapsed_ms, r.depth, r.solved);
        if r.lines.is_empty() {
            let _ = writeln!(out, "{},{},,,,{tail}", r.study, r.engine);
        }
        let mut lines: Vec<&TopLine> = r.lines.iter().collect();
        lines.sort_by(|a, b| b.score.cmp(&a.score));
        for l in lines {
            let _ = writeln!(out, "{},{},{},{},{:.4},{tail}", r.study, r.engine, l.san, csv_q(l.score), l.winprob);
        }
    }
    out
}

/// The move-per-column table: moves ordered by score, a Q-value row and a
/// win-probability row. Empty input renders nothing.
pub fn render_table(lines: &[TopLine]) -> String {
    let mut out = String::new();
    if lines.is_empty() {
        return out;
    }
    let mut lines: Vec<&TopLine> = lines.iter().collect();
    lines.sort_by(|a, b| b.score.cmp(&a.score));
    out.push('|');
    for l in &lines {
        let _ = write!(out, " | {}", l.san);
    }
    out.push_str(" |\n|---|");
    for _ in &lines {
        out.push_str("---|");
    }
    out.push_str("\n| **Q-value**");
    for l in &lines {
        let _ = write!(out, " | {}", l.score);
    }
    out.push_str(" |\n| **Win Probability**");
    for l in &lines {
        let _ = write!(out, " | {}", format_percent(l.winprob));
    }
    out.push_str(" |\n\n");
    out
}

fn render_markdown(records: &[SuiteRecord]) -> String {
    let mut out = String::from("# Study benchmark report\n\n");
    if records.is_empty() {
        out.push_str("no trials\n");
        return out;
    }
    for r in records {
        let _ = writeln!(out, "## {} / {}\n", r.study, r.engine);
        let _ = writeln!(out, "limits: {}\n", r.limits);
        if let Some(e) = &r.error {
            let _ = writeln!(out, "error: {e}\n");
            continue;
        }
        out.push_str(&render_table(&r.lines));
        let solved = match (&r.solved, &r.solution_san) {
            (true, Some(m)) => format!("yes ({m})"),
            _ => "no".to_string(),
        };
        let _ = writeln!(out, "nodes: {}, time: {} ms, depth: {}, solved: {solved}\n", r.nodes, r.elapsed_ms, r.depth);
    }
    out.push_str(&render_summary(records));
    out
}

#[derive(Default)]
struct Tally {
    family: Option<EngineFamily>,
    trials: usize,
    solved: usize,
}

fn render_summary(records: &[SuiteRecord]) -> String {
    let mut out = String::from("## Summary\n\n| engine | family | solved | trials | rate |\n|---|---|---|---|---|\n");
    let mut order = Vec::new();
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for r in records {
        let t = tallies.entry(&r.engine).or_insert_with(|| {
            order.push(r.engine.as_str());
            Tally::default()
        });
        t.family = Some(r.family);
        t.trials += 1;
        t.solved += r.solved as usize;
    }
    for id in order {
        let t = &tallies[id];
        let family = t.family.map_or("", |f| f.name());
        let rate = format_percent(t.solved as f64 / t.trials as f64);
        let _ = writeln!(out, "| {id} | {family} | {} | {} | {rate} |", t.solved, t.trials);
    }
    out.push('\n');
    if let Some(line) = ratio_line(records) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn ratio_line(records: &[SuiteRecord]) -> Option<String> {
    let ran: Vec<&SuiteRecord> = records.iter().filter(|r| r.error.is_none()).collect();
    let ab: Vec<_> = ran.iter().filter(|r| r.family == EngineFamily::AlphaBeta).collect();
    let mcts: Vec<_> = ran.iter().filter(|r| r.family == EngineFamily::Mcts).collect();
    if ab.is_empty() || mcts.is_empty() {
        return None;
    }
    let sources: Vec<NodeSource> = ran.iter().map(|r| r.node_source).collect();
    if sources.iter().any(|&s| s != sources[0]) {
        return Some("Leela ratio: not computed (internal and external node counts are not mixed)\n".into());
    }
    let total = |rs: &[&&SuiteRecord]| {
        let nodes: u64 = rs.iter().map(|r| r.nodes).sum();
        let ms: u64 = rs.iter().map(|r| r.elapsed_ms).sum();
        (nodes as f64, ms as f64)
    };
    let (sf_nodes, sf_ms) = total(&ab);
    let (lc_nodes, lc_ms) = total(&mcts);
    let inputs = RatioInputs {
        sf_nps: if sf_ms > 0.0 { sf_nodes * 1000.0 / sf_ms } else { 0.0 },
        lc_nps: if lc_ms > 0.0 { lc_nodes * 1000.0 / lc_ms } else { 0.0 },
        sf_nodes,
        lc_nodes,
    };
    Some(match inputs.compute() {
        Ok(r) => format!("Leela ratio: F = {:.2}, R = {:.2}; {}\n", r.factor, r.ratio, r.interpretation()),
        Err(e) => format!("Leela ratio: not computed ({e})\n"),
    })
}
