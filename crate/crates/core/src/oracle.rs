//! Exact horizon-bounded backward induction.
//!
//! Every value is a win probability for the side to move in `{0, ½, 1}`:
//! checkmating is 1, being mated 0, stalemate and rule draws ½. A node
//! reached at the horizon without being terminal is a cutoff. The reported
//! value scores cutoffs as ½; `resolved` says the value would be the same
//! whatever the cutoffs were worth, which is checked by solving once with
//! cutoffs pessimistic for the root side and once optimistic.

use std::collections::HashMap;

use thiserror::Error;

use crate::board::{Move, Position};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("node budget of {0} exhausted")]
    NodeBudget(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub value: f64,
    /// Q-value of every legal move, in legal-move order.
    pub q: Vec<(Move, f64)>,
    /// Per move: is its Q-value independent of the horizon cutoff?
    pub q_resolved: Vec<bool>,
    /// Moves achieving the maximum Q-value.
    pub optimal: Vec<Move>,
    pub horizon: u32,
    pub resolved: bool,
    pub nodes: u64,
}

impl ExactSolution {
    pub fn q_of(&self, m: Move) -> Option<f64> {
        self.q.iter().find(|(mv, _)| *mv == m).map(|&(_, q)| q)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Bound {
    Exact,
    Lower,
    Upper,
}

/// Values are kept in half units: 0 = loss, 1 = draw, 2 = win.
struct Solver {
    memo: HashMap<(u64, u32, u8), (u8, Bound)>,
    path: Vec<u64>,
    nodes: u64,
    budget: u64,
}

impl Solver {
    fn new(history: &[u64], budget: u64) -> Solver {
        Solver { memo: HashMap::new(), path: history.to_vec(), nodes: 0, budget }
    }

    /// `cutoff` is the value a horizon node has for its own side to move.
    fn value(
        &mut self,
        pos: &Position,
        depth: u32,
        cutoff: u8,
        mut alpha: u8,
        beta: u8,
        root: bool,
    ) -> Result<u8, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::NodeBudget(self.budget));
        }
        let moves = pos.legal_moves();
        if moves.is_empty() {
            return Ok(if pos.in_check() { 0 } else { 1 });
        }
        if pos.halfmove_clock() >= 100 || pos.is_insufficient_material() {
            return Ok(1);
        }
        if !root {
            let window = pos.halfmove_clock() as usize;
            if self.path.iter().rev().take(window).any(|&h| h == pos.hash()) {
                return Ok(1);
            }
        }
        if depth == 0 {
            return Ok(cutoff);
        }
        let key = (pos.hash(), depth, cutoff);
        if let Some(&(v, bound)) = self.memo.get(&key) {
            match bound {
                Bound::Exact => return Ok(v),
                Bound::Lower if v >= beta => return Ok(v),
                Bound::Upper if v <= alpha => return Ok(v),
                _ => {}
            }
        }
        let original_alpha = alpha;
        let mut best = 0u8;
        self.path.push(pos.hash());
        for &m in moves.iter() {
            let child = pos.play_unchecked(m);
            let r = self.value(&child, depth - 1, 2 - cutoff, 2 - beta, 2 - alpha, false);
            let v = match r {
                Ok(v) => 2 - v,
                Err(e) => {
                    self.path.pop();
                    return Err(e);
                }
            };
            best = best.max(v);
            alpha = alpha.max(v);
            if alpha >= beta {
                break;
            }
        }
        self.path.pop();
        let bound = if best <= original_alpha {
            Bound::Upper
        } else if best >= beta {
            Bound::Lower
        } else {
            Bound::Exact
        };
        self.memo.insert(key, (best, bound));
        Ok(best)
    }

    /// Value with cutoffs worth ½, and whether the two extreme cutoff
    /// assignments agree.
    fn resolve(&mut self, pos: &Position, depth: u32, root: bool) -> Result<(u8, bool), OracleError> {
        let lo = self.value(pos, depth, 0, 0, 2, root)?;
        let hi = self.value(pos, depth, 2, 0, 2, root)?;
        if lo == hi {
            return Ok((lo, true));
        }
        Ok((self.value(pos, depth, 1, 0, 2, root)?, false))
    }
}

/// Solves `pos` to `horizon` plies with the default node budget.
pub fn solve(pos: &Position, horizon: u32) -> Result<ExactSolution, OracleError> {
    solve_with(pos, horizon, &[], DEFAULT_NODE_BUDGET)
}

/// Q-values of every legal move of `pos` at `horizon`.
pub fn q_values(pos: &Position, horizon: u32) -> Result<Vec<(Move, f64)>, OracleError> {
    Ok(solve(pos, horizon)?.q)
}

/// Solves `pos` given the hashes of the positions that preceded it.
pub fn solve_with(
    pos: &Position,
    horizon: u32,
    history: &[u64],
    budget: u64,
) -> Result<ExactSolution, OracleError> {
    let mut solver = Solver::new(history, budget);
    let moves = pos.legal_moves();
    let terminal = if moves.is_empty() {
        Some(if pos.in_check() { 0 } else { 1 })
    } else if pos.halfmove_clock() >= 100 || pos.is_insufficient_material() {
        Some(1)
    } else {
        None
    };
    if let Some(v) = terminal {
        return Ok(ExactSolution {
            value: v as f64 / 2.0,
            q: Vec::new(),
            q_resolved: Vec::new(),
            optimal: Vec::new(),
            horizon,
            resolved: true,
            nodes: 1,
        });
    }

    let mut q = Vec::with_capacity(moves.len());
    let mut q_resolved = Vec::with_capacity(moves.len());
    solver.path.push(pos.hash());
    for &m in moves.iter() {
        if horizon == 0 {
            q.push((m, 0.5));
            q_resolved.push(false);
            continue;
        }
        let child = pos.play_unchecked(m);
        let (v, resolved) = solver.resolve(&child, horizon - 1, false)?;
        q.push((m, (2 - v) as f64 / 2.0));
        q_resolved.push(resolved);
    }
    solver.path.pop();

    let value = q.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let optimal = q.iter().filter(|&&(_, v)| v == value).map(|&(m, _)| m).collect();
    // resolved iff the root value is pinned whatever the cutoffs are worth
    let resolved = if horizon == 0 {
        false
    } else {
        let lo = solver.value(pos, horizon, 0, 0, 2, true)?;
        let hi = solver.value(pos, horizon, 2, 0, 2, true)?;
        lo == hi
    };
    Ok(ExactSolution { value, q, q_resolved, optimal, horizon, resolved, nodes: solver.nodes })
}

/// Solver whose memo persists across queries, for callers evaluating many
/// related positions. Repetitions are judged against each query's own path
/// only.
pub struct Oracle {
    solver: Solver,
}

impl Oracle {
    pub fn new(budget: u64) -> Oracle {
        Oracle { solver: Solver::new(&[], budget) }
    }

    /// Value of `pos` for its side to move at `horizon`, cutoffs worth ½.
    pub fn value(&mut self, pos: &Position, horizon: u32) -> Result<f64, OracleError> {
        self.solver.nodes = 0;
        self.solver.path.clear();
        Ok(self.solver.value(pos, horizon, 1, 0, 2, true)? as f64 / 2.0)
    }

    pub fn clear(&mut self) {
        self.solver.memo.clear();
    }
}

/// Shortest forced mate for the side to move, in moves, searching up to
/// `max_moves`.
pub fn mate_distance(pos: &Position, max_moves: u32) -> Result<Option<u32>, OracleError> {
    for n in 1..=max_moves {
        let mut solver = Solver::new(&[], DEFAULT_NODE_BUDGET);
        if solver.value(pos, 2 * n - 1, 0, 0, 2, true)? == 2 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
