//! Engines the harness can drive, and the internal ones it ships with.

use std::ops::ControlFlow;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Instant;

use crate::board::{Move, Position};
use crate::eval::{lc0_q_to_cp, NnueNetwork, Score, WinProbModel, MAX_CENTIPAWNS};
use crate::mcts::{Evaluator, HeuristicEvaluator, Mcts, MctsLimits, MctsResult, OracleEvaluator, PuctParams};
use crate::search::{LeafEvaluator, SearchLimits, SearchResult, Searcher, DEFAULT_TT_MIB};

use super::{EngineFamily, HarnessError, Study};

/// One ranked root move as an engine reported it.
#[derive(Clone, Debug, PartialEq)]
pub struct TopLine {
    pub mv: Move,
    pub san: String,
    pub score: Score,
    pub winprob: f64,
    pub pv: Vec<Move>,
}

/// Engine state after one iteration (alpha-beta) or one report interval
/// (MCTS).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Snapshot {
    /// Nominal depth, or simulations for MCTS.
    pub progress: u64,
    pub seldepth: u32,
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub hashfull: Option<u32>,
    /// Best first.
    pub lines: Vec<TopLine>,
}

impl Snapshot {
    pub fn best(&self) -> Option<&TopLine> {
        self.lines.first()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeSource {
    /// Counted by this crate's searchers.
    Internal,
    /// Sampled from an external engine's info lines.
    External,
}

pub trait TrialEngine {
    fn id(&self) -> &str;
    fn family(&self) -> EngineFamily;
    fn node_source(&self) -> NodeSource {
        NodeSource::Internal
    }
    fn set_option(&mut self, name: &str, value: &str) -> Result<(), HarnessError>;
    /// Forgets all state carried over from earlier searches.
    fn new_game(&mut self) -> Result<(), HarnessError>;
    /// Called before each trial with the study about to be searched.
    fn prepare(&mut self, _study: &Study) -> Result<(), HarnessError> {
        Ok(())
    }
    /// Flag that ends a running `analyze` early when set.
    fn stop_flag(&self) -> Option<Arc<AtomicBool>> {
        None
    }
    /// Searches `pos` (reached through `history`, oldest hash first).
    /// `on_snapshot` sees every intermediate state and may end the search.
    fn analyze(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: &SearchLimits,
        on_snapshot: &mut dyn FnMut(&Snapshot) -> ControlFlow<()>,
    ) -> Result<Snapshot, HarnessError>;
}

fn parse_value<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, HarnessError> {
    value.trim().parse().map_err(|_| HarnessError::BadOption { name: name.to_string(), value: value.to_string() })
}

fn parse_bool(name: &str, value: &str) -> Result<bool, HarnessError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(HarnessError::BadOption { name: name.to_string(), value: value.to_string() }),
    }
}

/// The alpha-beta searcher behind the harness interface.
pub struct AbEngine {
    id: String,
    pub searcher: Searcher,
    pub multipv: usize,
}

impl AbEngine {
    pub fn new(id: &str) -> AbEngine {
        AbEngine { id: id.to_string(), searcher: Searcher::new(DEFAULT_TT_MIB), multipv: 1 }
    }

    pub fn snapshot(pos: &Position, r: &SearchResult, hashfull: Option<u32>) -> Snapshot {
        Snapshot {
            progress: r.nominal_depth as u64,
            seldepth: r.seldepth,
            nodes: r.nodes,
            elapsed_ms: r.elapsed_ms,
            hashfull,
            lines: r
                .lines
                .iter()
                .map(|l| TopLine {
                    mv: l.mv,
                    san: pos.to_san(l.mv),
                    score: l.score,
                    winprob: WinProbModel::Logistic400.win_probability(l.score),
                    pv: l.pv.clone(),
                })
                .collect(),
        }
    }
}

impl TrialEngine for AbEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn family(&self) -> EngineFamily {
        EngineFamily::AlphaBeta
    }

    fn set_option(&mut self, name: &str, value: &str) -> Result<(), HarnessError> {
        let s = &mut self.searcher;
        match name.to_ascii_lowercase().as_str() {
            "multipv" => {
                self.multipv = parse_value::<usize>(name, value)?.max(1);
            }
            "futilitypruning" => s.toggles.futility = parse_bool(name, value)?,
            "lmr" => s.toggles.lmr = parse_bool(name, value)?,
            "quiescence" => s.toggles.quiescence = parse_bool(name, value)?,
            "futilitymargin" => s.params.futility_margin = parse_value(name, value)?,
            "futilitydepthcap" => s.params.futility_depth_cap = parse_value(name, value)?,
            "ttsizemib" | "hash" => s.resize_tt(parse_value::<usize>(name, value)?.max(1)),
            "evalfile" => {
                let path = value.trim();
                s.evaluator = if path.is_empty() || path == "<empty>" {
                    LeafEvaluator::Classical
                } else {
                    let net = NnueNetwork::read_file(path).map_err(|e| HarnessError::Engine(e.to_string()))?;
                    LeafEvaluator::Nnue(Arc::new(net))
                };
            }
            _ => return Err(HarnessError::UnknownOption(name.to_string())),
        }
        Ok(())
    }

    fn new_game(&mut self) -> Result<(), HarnessError> {
        self.searcher.new_game();
        Ok(())
    }

    fn stop_flag(&self) -> Option<Arc<AtomicBool>> {
        Some(self.searcher.stop_flag())
    }

    fn analyze(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: &SearchLimits,
        on_snapshot: &mut dyn FnMut(&Snapshot) -> ControlFlow<()>,
    ) -> Result<Snapshot, HarnessError> {
        let mut limits = limits.clone();
        limits.multipv = limits.multipv.max(self.multipv);
        let r = self.searcher.search_with(pos, history, &limits, |r| on_snapshot(&AbEngine::snapshot(pos, r, None)))?;
        Ok(AbEngine::snapshot(pos, &r, Some(self.searcher.hashfull())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MctsEvaluatorKind {
    Heuristic,
    Oracle,
}

/// The PUCT searcher behind the harness interface.
pub struct MctsEngine {
    id: String,
    pub mcts: Mcts,
    pub simulations: u32,
    pub multipv: usize,
    pub evaluator: MctsEvaluatorKind,
    /// 0 means twice the study's mate distance minus one.
    pub oracle_horizon: u32,
    pub temperature: f64,
    study_horizon: Option<u32>,
}

pub const DEFAULT_SIMULATIONS: u32 = 10_000;

impl MctsEngine {
    pub fn new(id: &str) -> MctsEngine {
        MctsEngine {
            id: id.to_string(),
            mcts: Mcts::new(PuctParams::default(), 0),
            simulations: DEFAULT_SIMULATIONS,
            multipv: 1,
            evaluator: MctsEvaluatorKind::Heuristic,
            oracle_horizon: 0,
            temperature: 1.0,
            study_horizon: None,
        }
    }

    fn make_evaluator(&self) -> Result<Box<dyn Evaluator>, HarnessError> {
        Ok(match self.evaluator {
            MctsEvaluatorKind::Heuristic => Box::new(HeuristicEvaluator { temperature: self.temperature }),
            MctsEvaluatorKind::Oracle => {
                let h = match self.oracle_horizon {
                    0 => self.study_horizon.ok_or_else(|| {
                        HarnessError::Engine("oracle evaluator needs OracleHorizon or a study with dm".into())
                    })?,
                    h => h,
                };
                Box::new(OracleEvaluator::new(h))
            }
        })
    }

    pub fn snapshot(pos: &Position, r: &MctsResult, multipv: usize) -> Snapshot {
        let lines = r
            .stats
            .iter()
            .take(multipv.max(1))
            .map(|s| {
                let q = s.q.unwrap_or(0.0);
                let cp = lc0_q_to_cp(q).round().clamp(-(MAX_CENTIPAWNS as f64), MAX_CENTIPAWNS as f64);
                let pv = if s.mv == r.best_move { r.pv.clone() } else { vec![s.mv] };
                TopLine { mv: s.mv, san: pos.to_san(s.mv), score: Score::cp(cp as i32), winprob: (q + 1.0) / 2.0, pv }
            })
            .collect();
        Snapshot {
            progress: r.simulations as u64,
            seldepth: r.pv.len() as u32,
            nodes: r.simulations as u64,
            elapsed_ms: r.elapsed_ms,
            hashfull: None,
            lines,
        }
    }
}

impl TrialEngine for MctsEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn family(&self) -> EngineFamily {
        EngineFamily::Mcts
    }

    fn set_option(&mut self, name: &str, value: &str) -> Result<(), HarnessError> {
        let p = &mut self.mcts.params;
        match name.to_ascii_lowercase().as_str() {
            "simulations" => self.simulations = parse_value::<u32>(name, value)?.max(1),
            "multipv" => self.multipv = parse_value::<usize>(name, value)?.max(1),
            "cinit" => p.c_init = parse_value(name, value)?,
            "cbase" => p.c_base = parse_value(name, value)?,
            "fpu" => p.fpu_reduction = parse_value(name, value)?,
            "seed" => self.mcts.seed = parse_value(name, value)?,
            "temperature" => self.temperature = parse_value(name, value)?,
            "oraclehorizon" => self.oracle_horizon = parse_value(name, value)?,
            "evaluator" => {
                self.evaluator = match value.trim().to_ascii_lowercase().as_str() {
                    "heuristic" => MctsEvaluatorKind::Heuristic,
                    "oracle" => MctsEvaluatorKind::Oracle,
                    _ => return Err(HarnessError::BadOption { name: name.to_string(), value: value.to_string() }),
                }
            }
            _ => return Err(HarnessError::UnknownOption(name.to_string())),
        }
        if !(p.c_base > 0.0) || !p.c_init.is_finite() || !p.fpu_reduction.is_finite() || !(self.temperature > 0.0) {
            return Err(HarnessError::BadOption { name: name.to_string(), value: value.to_string() });
        }
        Ok(())
    }

    fn new_game(&mut self) -> Result<(), HarnessError> {
        self.study_horizon = None;
        Ok(())
    }

    fn prepare(&mut self, study: &Study) -> Result<(), HarnessError> {
        self.study_horizon = study.mate_distance.map(|d| 2 * d - 1);
        Ok(())
    }

    fn stop_flag(&self) -> Option<Arc<AtomicBool>> {
        Some(self.mcts.stop_flag())
    }

    /// Runs `limits.max_nodes` simulations, or the `Simulations` option
    /// when no node limit is set. Depth limits do not apply.
    fn analyze(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: &SearchLimits,
        on_snapshot: &mut dyn FnMut(&Snapshot) -> ControlFlow<()>,
    ) -> Result<Snapshot, HarnessError> {
        let simulations = limits.max_nodes.map_or(self.simulations, |n| n.clamp(1, u32::MAX as u64) as u32);
        let multipv = limits.multipv.max(self.multipv);
        let mut evaluator = self.make_evaluator()?;
        let started = Instant::now();
        let max_time = limits.max_time;
        let report_every = (simulations / 20).clamp(1, 1000);
        let r = self.mcts.search_with(
            pos,
            history,
            MctsLimits { simulations, report_every },
            evaluator.as_mut(),
            |r| {
                if max_time.is_some_and(|t| started.elapsed() >= t) {
                    return ControlFlow::Break(());
                }
                on_snapshot(&MctsEngine::snapshot(pos, r, multipv))
            },
        )?;
        Ok(MctsEngine::snapshot(pos, &r, multipv))
    }
}

/// An internal engine by manifest name (`ab` or `mcts`).
pub fn internal_engine(id: &str, name: &str) -> Result<Box<dyn TrialEngine + Send>, HarnessError> {
    match name {
        "ab" => Ok(Box::new(AbEngine::new(id))),
        "mcts" => Ok(Box::new(MctsEngine::new(id))),
        _ => Err(HarnessError::Engine(format!("unknown internal engine '{name}'"))),
    }
}
