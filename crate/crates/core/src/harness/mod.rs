//! Endgame-study benchmark harness: suites, engine trials, the Leela
//! ratio and reports.

mod engine;
mod manifest;
mod ratio;
mod report;
mod suite;
mod trial;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use engine::{
    internal_engine, AbEngine, MctsEngine, MctsEvaluatorKind, NodeSource, Snapshot, TopLine, TrialEngine,
    DEFAULT_SIMULATIONS,
};
pub use manifest::{parse_manifest, EngineKind, EngineSpec, Manifest};
pub use ratio::{leela_factor, leela_ratio, LeelaRatio, RatioInputs};
pub use report::{format_percent, render_report, render_table, ReportFormat, CSV_HEADER};
pub use suite::{parse_suite, Study, StudySuite, BUILTIN_SUITE};
pub use trial::{describe_limits, run_concurrent, run_suite, run_trial, SolveRule, SuiteRecord};

use crate::mcts::MctsError;
use crate::search::SearchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineFamily {
    AlphaBeta,
    Mcts,
}

impl EngineFamily {
    pub fn name(self) -> &'static str {
        match self {
            EngineFamily::AlphaBeta => "ab",
            EngineFamily::Mcts => "mcts",
        }
    }
}

impl fmt::Display for EngineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ab" => Ok(EngineFamily::AlphaBeta),
            "mcts" => Ok(EngineFamily::Mcts),
            other => Err(format!("unknown engine family '{other}'")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("suite line {line}: {msg}")]
    Suite { line: usize, msg: String },
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("{0} must not be zero")]
    ZeroDenominator(&'static str),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("unknown option '{0}'")]
    UnknownOption(String),
    #[error("bad value '{value}' for option '{name}'")]
    BadOption { name: String, value: String },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Mcts(#[from] MctsError),
    #[error("engine: {0}")]
    Engine(String),
}
