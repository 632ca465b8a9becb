use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use super::tt::{score_from_tt, score_to_tt, Bound, TranspositionTable};
use super::{
    decode_score, HeuristicToggles, PruningParams, PvLine, SearchError, SearchLimits,
    SearchResult, MATE, MATE_BOUND, MAX_DEPTH, MAX_PLY,
};
use crate::board::{Move, MoveList, PieceKind, Position};
use crate::eval::{
    nnue_apply_in_place, nnue_evaluate, nnue_refresh, static_eval, NnueAccumulator, NnueNetwork,
    Score, PIECE_VALUES,
};

const INF: i32 = MATE + 1;

/// Leaf evaluation used by the searcher.
#[derive(Clone, Debug, Default)]
pub enum LeafEvaluator {
    #[default]
    Classical,
    Nnue(Arc<NnueNetwork>),
}

pub struct Searcher {
    pub toggles: HeuristicToggles,
    pub params: PruningParams,
    pub evaluator: LeafEvaluator,
    tt: TranspositionTable,
    stop: Arc<AtomicBool>,
    lmr_table: Vec<[u8; 64]>,

    nodes: u64,
    seldepth: usize,
    started: Instant,
    limits: SearchLimits,
    aborted: bool,
    hard_limits: bool,
    root_excluded: Vec<Move>,
    path: Vec<u64>,
    pv: Vec<Vec<Move>>,
    killers: [[Option<Move>; 2]; MAX_PLY + 1],
    history: Box<[[[i32; 64]; 64]; 2]>,
    accumulators: Vec<NnueAccumulator>,
}

fn mvv_lva(pos: &Position, m: Move) -> i32 {
    let victim = pos.captured_kind(m).map_or(0, |k| PIECE_VALUES[k.index()]);
    let attacker = pos.piece_at(m.from).map_or(0, |p| p.kind.index() as i32);
    let promo = m.promotion.map_or(0, |k| PIECE_VALUES[k.index()]);
    10 * (victim + promo) - attacker
}

impl Searcher {
    pub fn new(tt_mib: usize) -> Searcher {
        let mut s = Searcher {
            toggles: HeuristicToggles::default(),
            params: PruningParams::default(),
            evaluator: LeafEvaluator::Classical,
            tt: TranspositionTable::new(tt_mib),
            stop: Arc::new(AtomicBool::new(false)),
            lmr_table: Vec::new(),
            nodes: 0,
            seldepth: 0,
            started: Instant::now(),
            limits: SearchLimits::depth(1),
            aborted: false,
            hard_limits: false,
            root_excluded: Vec::new(),
            path: Vec::new(),
            pv: vec![Vec::new(); MAX_PLY + 1],
            killers: [[None; 2]; MAX_PLY + 1],
            history: Box::new([[[0; 64]; 64]; 2]),
            accumulators: Vec::new(),
        };
        s.rebuild_lmr_table();
        s
    }

    /// Recomputes the reduction table after `params` changed.
    pub fn rebuild_lmr_table(&mut self) {
        self.lmr_table = (0..=MAX_DEPTH as usize)
            .map(|d| {
                let mut row = [0u8; 64];
                for (i, r) in row.iter_mut().enumerate() {
                    *r = self.params.lmr_reduction(i, d as u32, true) as u8;
                }
                row
            })
            .collect();
    }

    pub fn stop_flag(&self) -> Arc<AtomicBool> {
        Arc::clone(&self.stop)
    }

    pub fn set_stop_flag(&mut self, flag: Arc<AtomicBool>) {
        self.stop = flag;
    }

    pub fn resize_tt(&mut self, mib: usize) {
        self.tt = TranspositionTable::new(mib);
    }

    pub fn hashfull(&self) -> u32 {
        self.tt.hashfull()
    }

    /// Forgets everything learned from earlier searches.
    pub fn new_game(&mut self) {
        self.tt.clear();
        self.killers = [[None; 2]; MAX_PLY + 1];
        self.history.iter_mut().flatten().flatten().for_each(|h| *h = 0);
    }

    pub fn search(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: &SearchLimits,
    ) -> Result<SearchResult, SearchError> {
        self.search_with(pos, history, limits, |_| ControlFlow::Continue(()))
    }

    /// Searches `pos`, whose game so far is `history` (hashes of earlier
    /// positions, oldest first). `on_iteration` sees every completed
    /// iteration and may end the search early.
    pub fn search_with(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: &SearchLimits,
        mut on_iteration: impl FnMut(&SearchResult) -> ControlFlow<()>,
    ) -> Result<SearchResult, SearchError> {
        limits.validate()?;
        let result = pos.game_result();
        if result.is_terminal() {
            return Err(SearchError::Terminal(result));
        }
        self.started = Instant::now();
        self.limits = limits.clone();
        self.nodes = 0;
        self.seldepth = 0;
        self.aborted = false;
        self.tt.new_search();
        self.path = history.to_vec();
        for h in self.history.iter_mut().flatten().flatten() {
            *h /= 8;
        }
        if let LeafEvaluator::Nnue(net) = &self.evaluator {
            let root = nnue_refresh(pos, net);
            self.accumulators = vec![root; MAX_PLY + 2];
        }

        let legal = pos.legal_moves();
        let k = limits.multipv.min(legal.len());
        let max_depth = limits.max_depth.unwrap_or(MAX_DEPTH).clamp(1, MAX_DEPTH);
        let mut best: Option<SearchResult> = None;

        for depth in 1..=max_depth {
            // the first iteration always completes unless stopped externally
            self.hard_limits = depth > 1;
            let mut lines: Vec<PvLine> = Vec::with_capacity(k);
            self.root_excluded.clear();
            for _ in 0..k {
                let v = self.node(pos, depth as i32, -INF, INF, 0);
                if self.aborted {
                    break;
                }
                let line = self.pv[0].clone();
                let Some(&mv) = line.first() else { break };
                self.root_excluded.push(mv);
                lines.push(PvLine { mv, score: decode_score(v), pv: line });
            }
            if self.aborted {
                break;
            }
            lines.sort_by(|a, b| b.score.cmp(&a.score));
            let res = SearchResult {
                lines,
                nominal_depth: depth,
                seldepth: self.seldepth as u32,
                nodes: self.nodes,
                elapsed_ms: self.started.elapsed().as_millis() as u64,
            };
            let flow = on_iteration(&res);
            best = Some(res);
            if flow.is_break() || self.limits_reached() {
                break;
            }
        }
        self.root_excluded.clear();

        Ok(best.unwrap_or_else(|| {
            let mv = legal[0];
            SearchResult {
                lines: vec![PvLine { mv, score: Score::cp(static_eval(pos)), pv: vec![mv] }],
                nominal_depth: 0,
                seldepth: self.seldepth as u32,
                nodes: self.nodes,
                elapsed_ms: self.started.elapsed().as_millis() as u64,
            }
        }))
    }

    fn limits_reached(&self) -> bool {
        self.limits.max_nodes.is_some_and(|n| self.nodes >= n)
            || self.limits.max_time.is_some_and(|t| self.started.elapsed() >= t)
    }

    fn should_abort(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.stop.load(Ordering::Relaxed) {
            self.aborted = true;
        } else if self.hard_limits {
            let nodes_hit = self.limits.max_nodes.is_some_and(|n| self.nodes >= n);
            let time_hit = self.nodes % 256 == 0
                && self.limits.max_time.is_some_and(|t| self.started.elapsed() >= t);
            self.aborted = nodes_hit || time_hit;
        }
        self.aborted
    }

    fn evaluate(&self, pos: &Position, ply: usize) -> i32 {
        let v = match &self.evaluator {
            LeafEvaluator::Classical => static_eval(pos),
            LeafEvaluator::Nnue(net) => match nnue_evaluate(&self.accumulators[ply], net, pos.side_to_move()) {
                Score::Centipawns(c) => c,
                Score::MateIn(_) => 0,
            },
        };
        v.clamp(-MATE_BOUND + 1, MATE_BOUND - 1)
    }

    fn enter_child(&mut self, pos: &Position, m: Move, ply: usize) -> Position {
        if let LeafEvaluator::Nnue(net) = &self.evaluator {
            let (parent, rest) = self.accumulators.split_at_mut(ply + 1);
            rest[0].clone_from(&parent[ply]);
            nnue_apply_in_place(&mut rest[0], pos, m, net);
        }
        self.path.push(pos.hash());
        pos.play_unchecked(m)
    }

    fn is_repetition(&self, pos: &Position) -> bool {
        let window = pos.halfmove_clock() as usize;
        self.path.iter().rev().take(window).any(|&h| h == pos.hash())
    }

    fn order(&self, pos: &Position, moves: &mut MoveList, tt_move: Option<Move>, ply: usize) {
        let us = pos.side_to_move().index();
        let mut keyed: Vec<(i32, Move)> = moves
            .iter()
            .map(|&m| {
                let key = if Some(m) == tt_move {
                    i32::MAX
                } else if pos.is_capture(m) || m.promotion.is_some() {
                    1_000_000 + mvv_lva(pos, m)
                } else if self.killers[ply][0] == Some(m) {
                    900_000
                } else if self.killers[ply][1] == Some(m) {
                    899_999
                } else {
                    self.history[us][m.from.index()][m.to.index()].min(800_000)
                };
                (key, m)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0));
        moves.clear();
        moves.extend(keyed.into_iter().map(|(_, m)| m));
    }

    fn set_pv(&mut self, ply: usize, m: Move) {
        let (head, tail) = self.pv.split_at_mut(ply + 1);
        let line = &mut head[ply];
        line.clear();
        line.push(m);
        line.extend_from_slice(&tail[0]);
    }

    fn node(&mut self, pos: &Position, depth: i32, mut alpha: i32, beta: i32, ply: usize) -> i32 {
        self.pv[ply].clear();
        if self.should_abort() {
            return 0;
        }
        if ply > 0 && (pos.is_insufficient_material() || self.is_repetition(pos)) {
            return 0;
        }
        let in_check = pos.in_check();
        let depth = if in_check && self.toggles.check_extension && ply > 0 { depth + 1 } else { depth };
        if ply >= MAX_PLY - 1 {
            self.nodes += 1;
            return self.evaluate(pos, ply);
        }
        if depth <= 0 {
            if self.toggles.quiescence {
                return self.quiesce(pos, alpha, beta, ply);
            }
            self.nodes += 1;
            self.seldepth = self.seldepth.max(ply);
            if !pos.has_legal_move() {
                return if in_check { -(MATE - ply as i32) } else { 0 };
            }
            if pos.halfmove_clock() >= 100 {
                return 0;
            }
            return self.evaluate(pos, ply);
        }

        self.nodes += 1;
        self.seldepth = self.seldepth.max(ply);
        let pv_node = beta - alpha > 1;
        let entry = self.tt.probe(pos.hash());
        if let Some(e) = entry {
            if self.toggles.tt_cutoffs && !pv_node && ply > 0 && e.depth >= depth {
                let s = score_from_tt(e.score, ply);
                let hit = match e.bound {
                    Bound::Exact => true,
                    Bound::Lower => s >= beta,
                    Bound::Upper => s <= alpha,
                };
                if hit {
                    return s;
                }
            }
        }

        let mut moves = pos.legal_moves_unsorted();
        if ply == 0 {
            moves.retain(|m| !self.root_excluded.contains(m));
        } else if moves.is_empty() {
            return if in_check { -(MATE - ply as i32) } else { 0 };
        }
        if ply > 0 && pos.halfmove_clock() >= 100 {
            return 0;
        }

        let futility_value = if self.toggles.futility
            && ply > 0
            && !in_check
            && alpha.abs() < MATE_BOUND
            && (depth as u32) < self.params.futility_depth_cap
        {
            Some(self.evaluate(pos, ply) + self.params.futility_margin_at(depth as u32))
                .filter(|&v| v <= alpha)
        } else {
            None
        };

        self.order(pos, &mut moves, entry.and_then(|e| e.best_move), ply);

        let original_alpha = alpha;
        let mut best = -INF;
        let mut best_move = None;
        let mut searched = 0usize;
        for (i, &m) in moves.iter().enumerate() {
            let tactical = pos.is_capture(m) || m.promotion.is_some();
            let child = self.enter_child(pos, m, ply);
            let quiet = !tactical && !child.in_check();
            if let (Some(v), true) = (futility_value, quiet) {
                self.path.pop();
                best = best.max(v);
                continue;
            }
            let score = if searched == 0 {
                -self.node(&child, depth - 1, -beta, -alpha, ply + 1)
            } else {
                let r = if self.toggles.lmr && quiet && !in_check && ply > 0 {
                    self.lmr_table[(depth as usize).min(MAX_DEPTH as usize)][i.min(63)] as i32
                } else {
                    0
                };
                let mut s = -self.node(&child, depth - 1 - r, -alpha - 1, -alpha, ply + 1);
                if r > 0 && s > alpha && !self.aborted {
                    s = -self.node(&child, depth - 1, -alpha - 1, -alpha, ply + 1);
                }
                if s > alpha && s < beta && !self.aborted {
                    s = -self.node(&child, depth - 1, -beta, -alpha, ply + 1);
                }
                s
            };
            self.path.pop();
            searched += 1;
            if self.aborted {
                return 0;
            }
            if score > best {
                best = score;
                best_move = Some(m);
                if score > alpha {
                    alpha = score;
                    self.set_pv(ply, m);
                    if score >= beta {
                        if !tactical {
                            self.record_quiet_cutoff(pos, m, depth, ply);
                        }
                        break;
                    }
                }
            }
        }
        if searched == 0 {
            if ply == 0 {
                return -INF;
            }
            return best;
        }

        if ply > 0 || self.root_excluded.is_empty() {
            let bound = if best >= beta {
                Bound::Lower
            } else if best > original_alpha {
                Bound::Exact
            } else {
                Bound::Upper
            };
            self.tt.store(pos.hash(), depth, score_to_tt(best, ply), bound, best_move);
        }
        best
    }

    fn record_quiet_cutoff(&mut self, pos: &Position, m: Move, depth: i32, ply: usize) {
        let k = &mut self.killers[ply];
        if k[0] != Some(m) {
            k[1] = k[0];
            k[0] = Some(m);
        }
        let h = &mut self.history[pos.side_to_move().index()][m.from.index()][m.to.index()];
        *h = (*h + depth * depth).min(400_000);
    }

    fn quiesce(&mut self, pos: &Position, mut alpha: i32, beta: i32, ply: usize) -> i32 {
        self.pv[ply].clear();
        if self.should_abort() {
            return 0;
        }
        self.nodes += 1;
        self.seldepth = self.seldepth.max(ply);
        if ply >= MAX_PLY - 1 {
            return self.evaluate(pos, ply);
        }
        let in_check = pos.in_check();
        let mut moves = pos.legal_moves_unsorted();
        if moves.is_empty() {
            return if in_check { -(MATE - ply as i32) } else { 0 };
        }
        if pos.is_insufficient_material() {
            return 0;
        }
        let mut best = -INF;
        if !in_check {
            let stand = self.evaluate(pos, ply);
            if stand >= beta {
                return stand;
            }
            alpha = alpha.max(stand);
            best = stand;
            moves.retain(|m| pos.is_capture(*m) || m.promotion == Some(PieceKind::Queen));
        }
        self.order(pos, &mut moves, None, ply.min(MAX_PLY));
        for &m in moves.iter() {
            let child = self.enter_child(pos, m, ply);
            let score = -self.quiesce(&child, -beta, -alpha, ply + 1);
            self.path.pop();
            if self.aborted {
                return 0;
            }
            if score > best {
                best = score;
                if score > alpha {
                    alpha = score;
                    self.set_pv(ply, m);
                    if score >= beta {
                        break;
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::search;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    #[test]
    fn back_rank_mate() {
        let p = pos("6k1/5ppp/8/8/8/8/8/4R2K w - - 0 1");
        let r = search(&p, &SearchLimits::depth(3), HeuristicToggles::ALL_ON).unwrap();
        assert_eq!(r.best_move().to_uci(), "e1e8");
        assert_eq!(r.score(), Score::MateIn(1));
        assert_eq!(r.best().pv.len(), 1);
    }

    #[test]
    fn hanging_queen_is_taken() {
        let p = pos("4k3/8/8/3q4/8/8/3R4/4K3 w - - 0 1");
        let r = search(&p, &SearchLimits::depth(2), HeuristicToggles::ALL_ON).unwrap();
        assert_eq!(r.best_move().to_uci(), "d2d5");
        assert!(r.score() > Score::cp(300));
    }

    #[test]
    fn multipv_lines_are_distinct_and_sorted() {
        let r = search(&Position::startpos(), &SearchLimits::depth(3).with_multipv(5), HeuristicToggles::ALL_ON)
            .unwrap();
        assert_eq!(r.lines.len(), 5);
        for w in r.lines.windows(2) {
            assert!(w[0].score >= w[1].score);
        }
        let mut firsts: Vec<Move> = r.lines.iter().map(|l| l.mv).collect();
        firsts.dedup();
        assert_eq!(firsts.len(), 5);
    }

    #[test]
    fn multipv_is_capped_by_legal_moves() {
        let p = pos("7k/8/8/8/8/8/8/K7 w - - 0 1");
        let r = search(&p, &SearchLimits::depth(2).with_multipv(10), HeuristicToggles::ALL_ON);
        assert!(r.is_err(), "insufficient material is terminal");
        let p = pos("7k/8/8/8/8/8/8/KR6 w - - 0 1");
        let r = search(&p, &SearchLimits::depth(2).with_multipv(100), HeuristicToggles::ALL_ON).unwrap();
        assert_eq!(r.lines.len(), p.legal_moves().len());
    }

    #[test]
    fn terminal_and_limit_errors() {
        let mate = pos("7k/6Q1/6K1/8/8/8/8/8 b - - 0 1");
        assert!(matches!(
            search(&mate, &SearchLimits::depth(2), HeuristicToggles::ALL_ON),
            Err(SearchError::Terminal(_))
        ));
        let limits = SearchLimits { max_depth: None, max_nodes: Some(0), max_time: None, multipv: 1 };
        assert_eq!(search(&Position::startpos(), &limits, HeuristicToggles::ALL_ON), Err(SearchError::NoLimits));
    }

    #[test]
    fn node_limit_returns_completed_iteration() {
        let r = search(&Position::startpos(), &SearchLimits::nodes(5_000), HeuristicToggles::ALL_ON).unwrap();
        assert!(r.nominal_depth >= 1);
        assert!(!r.lines.is_empty());
    }

    #[test]
    fn stop_flag_ends_search() {
        let mut s = Searcher::new(1);
        s.stop_flag().store(true, Ordering::Relaxed);
        let r = s.search(&Position::startpos(), &[], &SearchLimits::depth(30)).unwrap();
        assert_eq!(r.nominal_depth, 0);
        assert!(Position::startpos().is_legal(r.best_move()));
    }
}
