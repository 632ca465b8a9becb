//! Iterative-deepening alpha-beta search.
//!
//! Principal variation search over a negamax tree with a transposition
//! table, quiescence search, futility pruning and late move reductions.
//! One node is one call that generates moves or evaluates a position.

mod alphabeta;
mod tt;

use std::sync::OnceLock;
use std::time::Duration;

use thiserror::Error;

pub use alphabeta::{LeafEvaluator, Searcher};
pub use tt::{score_from_tt, score_to_tt, Bound, TranspositionTable, TtEntry, DEFAULT_TT_MIB};

use crate::board::{GameResult, Move, Position};
use crate::eval::Score;

/// Score of delivering mate at the root; mate at ply `p` scores `MATE - p`.
pub const MATE: i32 = 32_000;
/// Scores beyond this magnitude are mate scores.
pub const MATE_BOUND: i32 = MATE - 1_000;
pub const MAX_PLY: usize = 128;
pub const MAX_DEPTH: u32 = 100;

/// Decodes an internal root-relative score.
pub fn decode_score(v: i32) -> Score {
    if v > MATE_BOUND {
        Score::MateIn((MATE - v + 1) / 2)
    } else if v < -MATE_BOUND {
        Score::MateIn(-(MATE + v) / 2)
    } else {
        Score::Centipawns(v)
    }
}

/// Inverse of [`decode_score`] for scores it can produce.
pub fn encode_score(s: Score) -> i32 {
    match s {
        Score::Centipawns(c) => c.clamp(-MATE_BOUND, MATE_BOUND),
        Score::MateIn(n) if n > 0 => MATE - (2 * n - 1),
        Score::MateIn(n) => -(MATE + 2 * n),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: Option<u32>,
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    pub multipv: usize,
}

impl SearchLimits {
    pub fn depth(d: u32) -> SearchLimits {
        SearchLimits { max_depth: Some(d), max_nodes: None, max_time: None, multipv: 1 }
    }

    pub fn nodes(n: u64) -> SearchLimits {
        SearchLimits { max_depth: None, max_nodes: Some(n), max_time: None, multipv: 1 }
    }

    pub fn time(t: Duration) -> SearchLimits {
        SearchLimits { max_depth: None, max_nodes: None, max_time: Some(t), multipv: 1 }
    }

    pub fn with_multipv(mut self, k: usize) -> SearchLimits {
        self.multipv = k;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.multipv == 0 {
            return Err(SearchError::ZeroMultiPv);
        }
        let finite = self.max_depth.is_some_and(|d| d > 0)
            || self.max_nodes.is_some_and(|n| n > 0)
            || self.max_time.is_some_and(|t| !t.is_zero());
        if !finite {
            return Err(SearchError::NoLimits);
        }
        Ok(())
    }
}

/// Toggles for the heuristics layered on plain alpha-beta.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicToggles {
    pub futility: bool,
    pub lmr: bool,
    pub quiescence: bool,
    pub tt_cutoffs: bool,
    pub check_extension: bool,
}

impl HeuristicToggles {
    pub const ALL_ON: HeuristicToggles = HeuristicToggles {
        futility: true,
        lmr: true,
        quiescence: true,
        tt_cutoffs: true,
        check_extension: true,
    };

    /// Fixed-depth alpha-beta with static evaluation at the leaves.
    pub const PURE: HeuristicToggles = HeuristicToggles {
        futility: false,
        lmr: false,
        quiescence: false,
        tt_cutoffs: false,
        check_extension: false,
    };
}

impl Default for HeuristicToggles {
    fn default() -> Self {
        HeuristicToggles::ALL_ON
    }
}

/// Constants of the forward-pruning and reduction heuristics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PruningParams {
    /// Futility margin per ply of remaining depth, in centipawns.
    pub futility_margin: i32,
    /// Futility pruning applies only below this remaining depth.
    pub futility_depth_cap: u32,
    /// Leading moves never reduced.
    pub lmr_exempt_moves: usize,
    pub lmr_divisor: f64,
}

impl Default for PruningParams {
    fn default() -> Self {
        PruningParams { futility_margin: 150, futility_depth_cap: 8, lmr_exempt_moves: 3, lmr_divisor: 2.25 }
    }
}

impl PruningParams {
    pub fn futility_margin_at(&self, depth: u32) -> i32 {
        self.futility_margin * depth as i32
    }

    /// Whether a node at `depth` with this static eval may skip quiet moves.
    pub fn futility_prune(&self, static_eval: Score, depth: u32, alpha: Score) -> bool {
        let (Score::Centipawns(eval), Score::Centipawns(alpha)) = (static_eval, alpha) else {
            return false;
        };
        depth < self.futility_depth_cap && eval + self.futility_margin_at(depth) <= alpha
    }

    /// `floor(0.5 + ln(depth) ln(index) / divisor)` for late quiet moves,
    /// capped so the reduced search keeps at least one ply.
    pub fn lmr_reduction(&self, move_index: usize, depth: u32, is_quiet: bool) -> u32 {
        if !is_quiet || move_index < self.lmr_exempt_moves || depth < 2 {
            return 0;
        }
        let r = (0.5 + (depth as f64).ln() * (move_index as f64).ln() / self.lmr_divisor).floor();
        (r.max(0.0) as u32).min(depth - 2)
    }
}

fn default_params() -> &'static PruningParams {
    static P: OnceLock<PruningParams> = OnceLock::new();
    P.get_or_init(PruningParams::default)
}

/// Futility test with the default margin table (150 cp per ply, cap 8).
pub fn futility_prune(static_eval: Score, depth: u32, alpha: Score) -> bool {
    default_params().futility_prune(static_eval, depth, alpha)
}

/// Late-move reduction with the default table.
pub fn lmr_reduction(move_index: usize, depth: u32, is_quiet: bool) -> u32 {
    default_params().lmr_reduction(move_index, depth, is_quiet)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PvLine {
    pub mv: Move,
    pub score: Score,
    pub pv: Vec<Move>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Best first, scores nonincreasing.
    pub lines: Vec<PvLine>,
    /// Last completed iteration; 0 if none completed.
    pub nominal_depth: u32,
    pub seldepth: u32,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

impl SearchResult {
    pub fn best(&self) -> &PvLine {
        &self.lines[0]
    }

    pub fn best_move(&self) -> Move {
        self.lines[0].mv
    }

    pub fn score(&self) -> Score {
        self.lines[0].score
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("position is terminal ({0:?})")]
    Terminal(GameResult),
    #[error("no finite depth, node or time limit")]
    NoLimits,
    #[error("multipv must be at least 1")]
    ZeroMultiPv,
}

/// One-shot search with a fresh default-size table and classical leaves.
pub fn search(
    pos: &Position,
    limits: &SearchLimits,
    toggles: HeuristicToggles,
) -> Result<SearchResult, SearchError> {
    let mut s = Searcher::new(DEFAULT_TT_MIB);
    s.toggles = toggles;
    s.search(pos, &[], limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_codec() {
        assert_eq!(decode_score(MATE - 1), Score::MateIn(1));
        assert_eq!(decode_score(MATE - 3), Score::MateIn(2));
        assert_eq!(decode_score(-(MATE - 2)), Score::MateIn(-1));
        assert_eq!(decode_score(-(MATE - 4)), Score::MateIn(-2));
        assert_eq!(decode_score(37), Score::Centipawns(37));
        for s in [Score::MateIn(1), Score::MateIn(15), Score::MateIn(-3), Score::Centipawns(-284)] {
            assert_eq!(decode_score(encode_score(s)), s);
        }
    }

    #[test]
    fn futility_examples() {
        assert!(futility_prune(Score::cp(-500), 1, Score::cp(100)));
        assert!(!futility_prune(Score::cp(-500), 8, Score::cp(100)));
        assert!(!futility_prune(Score::cp(-5000), 9, Score::cp(100)));
        assert!(!futility_prune(Score::cp(200), 1, Score::cp(100)));
        assert!(!futility_prune(Score::cp(-49), 1, Score::cp(100)));
        assert!(futility_prune(Score::cp(-50), 1, Score::cp(100)));
        assert!(!futility_prune(Score::cp(-500), 1, Score::MateIn(3)));
    }

    #[test]
    fn lmr_examples() {
        assert_eq!(lmr_reduction(0, 12, true), 0);
        assert!(lmr_reduction(20, 12, true) >= 2);
        assert_eq!(lmr_reduction(20, 1, true), 0);
        assert_eq!(lmr_reduction(20, 12, false), 0);
        assert_eq!(lmr_reduction(2, 12, true), 0);
        for d in 1..40 {
            for i in 0..60 {
                let r = lmr_reduction(i, d, true);
                assert!(d < 2 || d - 1 - r >= 1);
                assert!(lmr_reduction(i + 1, d, true) >= r);
                assert!(lmr_reduction(i, d + 1, true) >= r);
            }
        }
    }

    #[test]
    fn limits_validation() {
        assert!(SearchLimits::depth(3).validate().is_ok());
        assert_eq!(SearchLimits::depth(0).validate(), Err(SearchError::NoLimits));
        assert_eq!(SearchLimits::depth(3).with_multipv(0).validate(), Err(SearchError::ZeroMultiPv));
    }
}
