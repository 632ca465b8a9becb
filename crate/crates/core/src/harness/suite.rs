use std::collections::HashSet;

use crate::board::{parse_epd, Move, Position};

use super::HarnessError;

/// The suite shipped with the crate: the Plaskett studies and twenty
/// oracle-checked mates in one to three.
pub const BUILTIN_SUITE: &str = include_str!("../../data/suite.epd");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Study {
    pub id: String,
    pub position: Position,
    pub best_moves: Vec<Move>,
    /// Full moves to mate, when known.
    pub mate_distance: Option<u32>,
    pub note: Option<String>,
}

impl Study {
    pub fn is_best(&self, m: Move) -> bool {
        self.best_moves.contains(&m)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StudySuite {
    pub studies: Vec<Study>,
}

impl StudySuite {
    pub fn builtin() -> StudySuite {
        parse_suite(BUILTIN_SUITE).expect("builtin suite is valid")
    }

    pub fn get(&self, id: &str) -> Option<&Study> {
        self.studies.iter().find(|s| s.id == id)
    }

    pub fn len(&self) -> usize {
        self.studies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.studies.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Study> {
        self.studies.iter()
    }
}

/// Parses an EPD suite. Blank lines and `#` comments are skipped; every
/// record needs an `id` and at least one `bm`, ids must be unique.
pub fn parse_suite(text: &str) -> Result<StudySuite, HarnessError> {
    let mut studies = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| HarnessError::Suite { line: i + 1, msg };
        let (position, ops) = parse_epd(line).map_err(|e| bad(e.to_string()))?;
        let id = ops.id.clone().ok_or_else(|| bad("record has no id".into()))?;
        if !seen.insert(id.clone()) {
            return Err(bad(format!("duplicate id '{id}'")));
        }
        if ops.best_moves.is_empty() {
            return Err(bad(format!("study '{id}' has no bm")));
        }
        let note = ops.other.get("c0").map(|s| s.trim_matches('"').to_string());
        studies.push(Study { id, position, best_moves: ops.best_moves, mate_distance: ops.mate_distance, note });
    }
    Ok(StudySuite { studies })
}
