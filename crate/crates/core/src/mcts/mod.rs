//! Monte Carlo tree search with PUCT selection.
//!
//! Values live in [−1, 1]. Each node stores the total value `w` from the
//! point of view of the player who moved into it, so a parent reads its
//! children's `w / n` directly as Q(s, a).
//!
//! Game-theoretic values are tracked alongside the averages: checkmates,
//! draws and evaluations flagged exact mark a node proven, and proofs
//! propagate upward (a node with a child lost for the opponent is won, a
//! node whose children are all proven takes the best of them). Selection
//! always enters a winning child and avoids losing ones while any
//! alternative remains.

mod policy;

use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use policy::{decode_move, encode_move, mask_and_normalize, PolicyIndex, POLICY_PLANES, POLICY_SIZE};

use crate::board::{GameResult, Move, Position};
use crate::eval::{cp_to_winprob, static_eval, Score};
use crate::oracle::{Oracle, DEFAULT_NODE_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PuctParams {
    pub c_base: f64,
    pub c_init: f64,
    /// Unvisited children are valued at the parent's Q minus this.
    pub fpu_reduction: f64,
}

impl Default for PuctParams {
    fn default() -> Self {
        PuctParams { c_base: 19652.0, c_init: 1.25, fpu_reduction: 0.2 }
    }
}

impl PuctParams {
    /// Exploration rate C(s) for a node visited `n` times.
    pub fn exploration(&self, n: u32) -> f64 {
        ((1.0 + n as f64 + self.c_base) / self.c_base).ln() + self.c_init
    }

    /// U(s, a) for a child with prior `p` and `n_child` visits under a node
    /// of `n_parent` visits whose children total `n_sum` visits.
    pub fn exploration_bonus(&self, n_parent: u32, n_sum: u32, p: f64, n_child: u32) -> f64 {
        self.exploration(n_parent) * p * (n_sum as f64).sqrt() / (1.0 + n_child as f64)
    }
}

/// Leaf estimate: value for the side to move and a prior per legal move.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub policy: Vec<f64>,
    /// `value` is the true game value, not an estimate.
    pub exact: bool,
}

pub trait Evaluator {
    /// `legal` is nonempty and in the order `policy` must follow; `ply` is
    /// the distance from the search root.
    fn evaluate(&mut self, pos: &Position, legal: &[Move], ply: usize) -> Evaluation;
}

/// Classical eval through the logistic, rescaled to [−1, 1], with a
/// softmax over one-ply evals (in pawns) as the policy.
#[derive(Clone, Debug)]
pub struct HeuristicEvaluator {
    pub temperature: f64,
}

impl Default for HeuristicEvaluator {
    fn default() -> Self {
        HeuristicEvaluator { temperature: 1.0 }
    }
}

impl Evaluator for HeuristicEvaluator {
    fn evaluate(&mut self, pos: &Position, legal: &[Move], _ply: usize) -> Evaluation {
        let value = 2.0 * cp_to_winprob(Score::cp(static_eval(pos))) - 1.0;
        let logits: Vec<f64> = legal
            .iter()
            .map(|&m| -static_eval(&pos.play_unchecked(m)) as f64 / 100.0 / self.temperature)
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        Evaluation { value, policy: exps.into_iter().map(|e| e / sum).collect(), exact: false }
    }
}

/// Exact values for a horizon counted from the search root, with a uniform
/// policy. A forced win or loss inside the horizon is exact; anything else
/// reads as 0.
pub struct OracleEvaluator {
    pub horizon: u32,
    oracle: Oracle,
}

impl OracleEvaluator {
    pub fn new(horizon: u32) -> OracleEvaluator {
        OracleEvaluator { horizon, oracle: Oracle::new(DEFAULT_NODE_BUDGET) }
    }
}

impl Evaluator for OracleEvaluator {
    fn evaluate(&mut self, pos: &Position, legal: &[Move], ply: usize) -> Evaluation {
        let remaining = self.horizon.saturating_sub(ply as u32);
        // a budget overrun leaves the leaf undecided
        let v = self.oracle.value(pos, remaining).unwrap_or(0.5);
        Evaluation {
            value: 2.0 * v - 1.0,
            policy: vec![1.0 / legal.len() as f64; legal.len()],
            exact: v != 0.5,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MctsError {
    #[error("position is terminal ({0:?})")]
    Terminal(GameResult),
    #[error("at least one simulation is required")]
    NoSimulations,
    #[error("node has not been expanded")]
    Unexpanded,
}

#[derive(Clone, Debug)]
pub struct MctsNode {
    pub mv: Option<Move>,
    pub parent: Option<usize>,
    pub first_child: usize,
    pub child_count: usize,
    pub n: u32,
    pub w: f64,
    pub prior: f64,
    /// Game value for the side to move, once known.
    pub proven: Option<f64>,
    pub expanded: bool,
}

impl MctsNode {
    fn new(mv: Option<Move>, parent: Option<usize>, prior: f64) -> MctsNode {
        MctsNode {
            mv,
            parent,
            first_child: 0,
            child_count: 0,
            n: 0,
            w: 0.0,
            prior,
            proven: None,
            expanded: false,
        }
    }

    /// Mean value from the point of view of the player who moved here.
    pub fn q(&self) -> Option<f64> {
        (self.n > 0).then(|| self.w / self.n as f64)
    }
}

/// Arena-allocated search tree; node 0 is the root.
#[derive(Clone, Debug, Default)]
pub struct Tree {
    pub nodes: Vec<MctsNode>,
}

impl Tree {
    pub fn children(&self, id: usize) -> std::ops::Range<usize> {
        let n = &self.nodes[id];
        n.first_child..n.first_child + n.child_count
    }

    /// Child of `id` maximising Q + U; ties go to the earliest child. A
    /// child proven lost for the opponent is taken outright and children
    /// proven won for the opponent are passed over while others remain.
    pub fn select(&self, id: usize, params: &PuctParams) -> Result<usize, MctsError> {
        let node = &self.nodes[id];
        if !node.expanded || node.child_count == 0 {
            return Err(MctsError::Unexpanded);
        }
        if let Some(c) = self.children(id).find(|&c| self.nodes[c].proven == Some(-1.0)) {
            return Ok(c);
        }
        let all_lost = self.children(id).all(|c| self.nodes[c].proven == Some(1.0));
        let n_sum: u32 = self.children(id).map(|c| self.nodes[c].n).sum();
        let parent_q = node.q().map_or(0.0, |q| -q);
        let fpu = (parent_q - params.fpu_reduction).max(-1.0);
        let mut best = (f64::NEG_INFINITY, id);
        for c in self.children(id) {
            let child = &self.nodes[c];
            if child.proven == Some(1.0) && !all_lost {
                continue;
            }
            let q = child.q().unwrap_or(fpu);
            let score = q + params.exploration_bonus(node.n, n_sum, child.prior, child.n);
            if score > best.0 {
                best = (score, c);
            }
        }
        Ok(best.1)
    }

    fn expand(&mut self, id: usize, legal: &[Move], priors: &[f64]) {
        let first = self.nodes.len();
        for (&m, &p) in legal.iter().zip(priors) {
            self.nodes.push(MctsNode::new(Some(m), Some(id), p));
        }
        let node = &mut self.nodes[id];
        node.first_child = first;
        node.child_count = legal.len();
        node.expanded = true;
    }

    /// Derives proofs for the ancestors of a newly proven node.
    fn propagate_proof(&mut self, mut id: usize) {
        while let Some(parent) = self.nodes[id].parent {
            let children = self.children(parent);
            let values: Vec<Option<f64>> = children.map(|c| self.nodes[c].proven).collect();
            let proof = if values.contains(&Some(-1.0)) {
                Some(1.0)
            } else if values.iter().all(Option::is_some) {
                values.iter().map(|v| -v.unwrap()).reduce(f64::max)
            } else {
                None
            };
            if proof.is_none() || self.nodes[parent].proven.is_some() {
                return;
            }
            self.nodes[parent].proven = proof;
            id = parent;
        }
    }

    /// Adds `value`, seen by the side to move at `leaf`, to every node on
    /// the path to the root, flipping sign each ply.
    pub fn backup(&mut self, leaf: usize, value: f64) {
        let mut v = -value;
        let mut cur = Some(leaf);
        while let Some(id) = cur {
            let node = &mut self.nodes[id];
            node.n += 1;
            node.w += v;
            v = -v;
            cur = node.parent;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MctsLimits {
    pub simulations: u32,
    /// Progress is reported every this many simulations; 0 disables it.
    pub report_every: u32,
}

impl MctsLimits {
    pub fn simulations(n: u32) -> MctsLimits {
        MctsLimits { simulations: n, report_every: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootStat {
    pub mv: Move,
    pub visits: u32,
    /// Mean value for the side to move at the root; `None` if unvisited.
    pub q: Option<f64>,
    pub prior: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MctsResult {
    /// Root children, most visited first.
    pub stats: Vec<RootStat>,
    pub best_move: Move,
    pub pv: Vec<Move>,
    pub simulations: u32,
    /// Root value for its side to move.
    pub value: f64,
    pub tree_size: usize,
    pub elapsed_ms: u64,
}

impl MctsResult {
    pub fn visit_fraction(&self, m: Move) -> f64 {
        let total: u32 = self.stats.iter().map(|s| s.visits).sum();
        let v = self.stats.iter().find(|s| s.mv == m).map_or(0, |s| s.visits);
        if total == 0 {
            0.0
        } else {
            v as f64 / total as f64
        }
    }

    /// `move,visits,fraction,Q,prior`, one row per root move.
    pub fn root_csv(&self) -> String {
        let total: u32 = self.stats.iter().map(|s| s.visits).sum::<u32>().max(1);
        let mut out = String::from("move,visits,fraction,Q,prior\n");
        for s in &self.stats {
            let q = s.q.map_or(String::new(), |q| format!("{q:.6}"));
            let _ = writeln!(
                out,
                "{},{},{:.6},{},{:.6}",
                s.mv,
                s.visits,
                s.visits as f64 / total as f64,
                q,
                s.prior
            );
        }
        out
    }
}

pub struct Mcts {
    pub params: PuctParams,
    pub seed: u64,
    stop: Arc<AtomicBool>,
    tree: Tree,
}

fn terminal_value(pos: &Position, path: &[u64]) -> Option<f64> {
    let result = pos.game_result();
    if result.is_checkmate() {
        return Some(-1.0);
    }
    if result.is_terminal() {
        return Some(0.0);
    }
    let window = pos.halfmove_clock() as usize;
    path.iter().rev().take(window).any(|&h| h == pos.hash()).then_some(0.0)
}

impl Mcts {
    pub fn new(params: PuctParams, seed: u64) -> Mcts {
        Mcts { params, seed, stop: Arc::new(AtomicBool::new(false)), tree: Tree::default() }
    }

    pub fn stop_flag(&self) -> Arc<AtomicBool> {
        Arc::clone(&self.stop)
    }

    pub fn set_stop_flag(&mut self, flag: Arc<AtomicBool>) {
        self.stop = flag;
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn search(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: MctsLimits,
        evaluator: &mut dyn Evaluator,
    ) -> Result<MctsResult, MctsError> {
        self.search_with(pos, history, limits, evaluator, |_| ControlFlow::Continue(()))
    }

    /// Runs up to `limits.simulations` simulations from `pos`, whose game
    /// so far is `history`. The stop flag and `on_report` are checked
    /// between simulations.
    pub fn search_with(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: MctsLimits,
        evaluator: &mut dyn Evaluator,
        mut on_report: impl FnMut(&MctsResult) -> ControlFlow<()>,
    ) -> Result<MctsResult, MctsError> {
        let result = pos.game_result();
        if result.is_terminal() {
            return Err(MctsError::Terminal(result));
        }
        if limits.simulations == 0 {
            return Err(MctsError::NoSimulations);
        }
        let started = std::time::Instant::now();
        self.tree = Tree { nodes: vec![MctsNode::new(None, None, 1.0)] };
        let mut done = 0;
        while done < limits.simulations {
            if self.stop.load(Ordering::Relaxed) && done > 0 {
                break;
            }
            self.simulate(pos, history, evaluator);
            done += 1;
            if limits.report_every > 0 && done % limits.report_every == 0 && done < limits.simulations {
                let snapshot = self.result(done, started.elapsed().as_millis() as u64);
                if on_report(&snapshot).is_break() {
                    break;
                }
            }
        }
        Ok(self.result(done, started.elapsed().as_millis() as u64))
    }

    fn simulate(&mut self, root: &Position, history: &[u64], evaluator: &mut dyn Evaluator) {
        let mut path = history.to_vec();
        let mut pos = root.clone();
        let mut id = 0;
        let mut ply = 0;
        loop {
            let node = &self.tree.nodes[id];
            if !node.expanded || (node.proven.is_some() && id != 0) {
                break;
            }
            path.push(pos.hash());
            id = self.tree.select(id, &self.params).expect("expanded node has children");
            pos = pos.play_unchecked(self.tree.nodes[id].mv.expect("non-root node has a move"));
            ply += 1;
        }
        if let Some(v) = self.tree.nodes[id].proven {
            self.tree.backup(id, v);
            return;
        }
        let terminal = if id == 0 { None } else { terminal_value(&pos, &path) };
        if let Some(v) = terminal {
            self.tree.nodes[id].proven = Some(v);
            self.tree.nodes[id].expanded = true;
            self.tree.propagate_proof(id);
            self.tree.backup(id, v);
            return;
        }
        let legal = pos.legal_moves();
        let eval = evaluator.evaluate(&pos, &legal, ply);
        self.tree.expand(id, &legal, &eval.policy);
        let value = eval.value.clamp(-1.0, 1.0);
        if eval.exact {
            self.tree.nodes[id].proven = Some(value);
            self.tree.propagate_proof(id);
        }
        self.tree.backup(id, value);
    }

    fn result(&self, simulations: u32, elapsed_ms: u64) -> MctsResult {
        let tree = &self.tree;
        let mut stats: Vec<RootStat> = tree
            .children(0)
            .map(|c| {
                let n = &tree.nodes[c];
                RootStat { mv: n.mv.unwrap(), visits: n.n, q: n.q(), prior: n.prior }
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut order: Vec<usize> = (0..stats.len()).collect();
        order.shuffle(&mut rng);
        let key = |s: &RootStat| (s.visits, s.q.unwrap_or(f64::NEG_INFINITY), s.prior);
        // a stable sort after the seeded shuffle breaks exact ties reproducibly
        order.sort_by(|&a, &b| key(&stats[b]).partial_cmp(&key(&stats[a])).unwrap());
        stats = order.into_iter().map(|i| stats[i].clone()).collect();

        let mut pv = Vec::new();
        let mut id = 0;
        while tree.nodes[id].child_count > 0 {
            let best = tree.children(id).max_by_key(|&c| (tree.nodes[c].n, std::cmp::Reverse(c))).unwrap();
            if tree.nodes[best].n == 0 {
                break;
            }
            pv.push(tree.nodes[best].mv.unwrap());
            id = best;
        }
        let best_move = stats[0].mv;
        if pv.first() != Some(&best_move) {
            pv = vec![best_move];
        }
        let root = &tree.nodes[0];
        MctsResult {
            best_move,
            pv,
            simulations,
            value: root.q().map_or(0.0, |q| -q),
            tree_size: tree.nodes.len(),
            elapsed_ms,
            stats,
        }
    }
}

/// One-shot search with a fresh tree.
pub fn run_search(
    pos: &Position,
    simulations: u32,
    evaluator: &mut dyn Evaluator,
    params: PuctParams,
    seed: u64,
) -> Result<MctsResult, MctsError> {
    Mcts::new(params, seed).search(pos, &[], MctsLimits::simulations(simulations), evaluator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Square;

    fn mv(from: &str, to: &str) -> Move {
        Move::new(Square::parse(from).unwrap(), Square::parse(to).unwrap())
    }

    fn two_child_tree(p: [f64; 2], n: [u32; 2], w: [f64; 2]) -> Tree {
        let mut t = Tree { nodes: vec![MctsNode::new(None, None, 1.0)] };
        let a = mv("e2", "e4");
        let b = mv("d2", "d4");
        t.expand(0, &[a, b], &p);
        for i in 0..2 {
            t.nodes[1 + i].n = n[i];
            t.nodes[1 + i].w = w[i];
        }
        t.nodes[0].n = 1 + n[0] + n[1];
        t
    }

    #[test]
    fn exploration_rate() {
        let params = PuctParams::default();
        assert!((params.exploration(0) - 1.25).abs() < 1e-4);
        assert!(params.exploration(100_000) > 2.0);
    }

    #[test]
    fn select_prefers_unexplored_prior() {
        let t = two_child_tree([0.6, 0.4], [1, 0], [0.0, 0.0]);
        let params = PuctParams { fpu_reduction: 0.0, ..PuctParams::default() };
        assert_eq!(t.select(0, &params).unwrap(), 2);
    }

    #[test]
    fn unexpanded_select_errors() {
        let t = Tree { nodes: vec![MctsNode::new(None, None, 1.0)] };
        assert_eq!(t.select(0, &PuctParams::default()), Err(MctsError::Unexpanded));
    }

    #[test]
    fn backup_alternates() {
        let mut t = two_child_tree([0.5, 0.5], [0, 0], [0.0, 0.0]);
        t.nodes[0].n = 0;
        t.expand(1, &[mv("e7", "e5")], &[1.0]);
        t.backup(3, 0.5);
        assert_eq!((t.nodes[3].n, t.nodes[3].w), (1, -0.5));
        assert_eq!((t.nodes[1].n, t.nodes[1].w), (1, 0.5));
        assert_eq!((t.nodes[0].n, t.nodes[0].w), (1, -0.5));
    }
}
