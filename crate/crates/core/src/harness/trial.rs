use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::sync::mpsc;

use crate::board::Move;
use crate::eval::Score;
use crate::search::SearchLimits;

use super::engine::{NodeSource, Snapshot, TopLine, TrialEngine};
use super::{EngineFamily, Study, StudySuite};

/// When a trial counts as solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveRule {
    /// A suite best move ranked first in this many consecutive snapshots.
    /// 0 judges the final snapshot only.
    pub stable_iterations: u32,
    /// A reported mate for the side to move no longer than the study's
    /// mate distance (or, without one, with a suite best move first).
    pub accept_mate: bool,
}

impl Default for SolveRule {
    fn default() -> Self {
        SolveRule { stable_iterations: 3, accept_mate: true }
    }
}

impl SolveRule {
    pub const FINAL_MOVE: SolveRule = SolveRule { stable_iterations: 0, accept_mate: false };

    fn mate_ok(&self, study: &Study, best: &TopLine) -> bool {
        self.accept_mate
            && match best.score {
                Score::MateIn(n) if n > 0 => match study.mate_distance {
                    Some(dm) => n as u32 <= dm,
                    None => study.is_best(best.mv),
                },
                _ => false,
            }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRecord {
    pub study: String,
    pub engine: String,
    pub family: EngineFamily,
    pub node_source: NodeSource,
    pub limits: String,
    pub solved: bool,
    /// Best move when solved, or when the search ended.
    pub solution_move: Option<Move>,
    pub solution_san: Option<String>,
    pub nodes: u64,
    pub elapsed_ms: u64,
    /// Nominal depth or simulations at the recorded instant.
    pub depth: u64,
    pub lines: Vec<TopLine>,
    /// Why the trial failed to run, if it did.
    pub error: Option<String>,
}

pub fn describe_limits(limits: &SearchLimits) -> String {
    let mut out = String::new();
    if let Some(d) = limits.max_depth {
        let _ = write!(out, "depth {d} ");
    }
    if let Some(n) = limits.max_nodes {
        let _ = write!(out, "nodes {n} ");
    }
    if let Some(t) = limits.max_time {
        let _ = write!(out, "time {}ms ", t.as_millis());
    }
    let _ = write!(out, "multipv {}", limits.multipv);
    out
}

/// Runs one study on `engine`. Engine failures produce an unsolved record
/// carrying the error.
pub fn run_trial(engine: &mut dyn TrialEngine, study: &Study, limits: &SearchLimits, rule: SolveRule) -> SuiteRecord {
    let mut record = SuiteRecord {
        study: study.id.clone(),
        engine: engine.id().to_string(),
        family: engine.family(),
        node_source: engine.node_source(),
        limits: describe_limits(limits),
        solved: false,
        solution_move: None,
        solution_san: None,
        nodes: 0,
        elapsed_ms: 0,
        depth: 0,
        lines: Vec::new(),
        error: None,
    };
    if let Err(e) = engine.new_game().and_then(|_| engine.prepare(study)) {
        record.error = Some(e.to_string());
        return record;
    }

    let mut streak = 0;
    let mut solved_at: Option<Snapshot> = None;
    let mut last_progress = None;
    let mut judge = |snap: &Snapshot, is_final: bool| -> bool {
        let Some(best) = snap.best() else { return false };
        if rule.mate_ok(study, best) {
            return true;
        }
        if rule.stable_iterations == 0 {
            return is_final && study.is_best(best.mv);
        }
        streak = if study.is_best(best.mv) { streak + 1 } else { 0 };
        streak >= rule.stable_iterations
    };
    let result = engine.analyze(&study.position, &[], limits, &mut |snap| {
        last_progress = Some(snap.progress);
        if judge(snap, false) {
            solved_at = Some(snap.clone());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    let last = match result {
        Ok(s) => s,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    if solved_at.is_none() && (last_progress != Some(last.progress) || rule.stable_iterations == 0) && judge(&last, true) {
        solved_at = Some(last.clone());
    }
    record.solved = solved_at.is_some();
    let snap = solved_at.unwrap_or(last);
    record.solution_move = snap.best().map(|l| l.mv);
    record.solution_san = snap.best().map(|l| l.san.clone());
    record.nodes = snap.nodes;
    record.elapsed_ms = snap.elapsed_ms;
    record.depth = snap.progress;
    record.lines = snap.lines;
    record
}

/// Every study of `suite` in order, on one engine.
pub fn run_suite(
    engine: &mut dyn TrialEngine,
    suite: &StudySuite,
    limits: &SearchLimits,
    rule: SolveRule,
) -> Vec<SuiteRecord> {
    suite.iter().map(|s| run_trial(engine, s, limits, rule)).collect()
}

/// Runs the suite on each engine, with its own limits, in its own thread.
/// Records come back in engine order, then suite order.
pub fn run_concurrent(
    engines: &mut [(Box<dyn TrialEngine + Send>, SearchLimits)],
    suite: &StudySuite,
    rule: SolveRule,
) -> Vec<SuiteRecord> {
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for (e, (engine, limits)) in engines.iter_mut().enumerate() {
            let tx = tx.clone();
            scope.spawn(move || {
                for (s, study) in suite.iter().enumerate() {
                    let record = run_trial(engine.as_mut(), study, &*limits, rule);
                    if tx.send((e, s, record)).is_err() {
                        break;
                    }
                }
            });
        }
    });
    drop(tx);
    let mut all: Vec<(usize, usize, SuiteRecord)> = rx.into_iter().collect();
    all.sort_by_key(|(e, s, _)| (*e, *s));
    all.into_iter().map(|(_, _, r)| r).collect()
}
