//! Unpruned reference searches.

use dualmind_core::eval::static_eval;
use dualmind_core::search::{MATE, MATE_BOUND};
use dualmind_core::{Move, Position};

fn repeated(pos: &Position, path: &[u64]) -> bool {
    path.iter().rev().take(pos.halfmove_clock() as usize).any(|&h| h == pos.hash())
}

/// Negamax over every legal move to `depth` plies with static leaves, using
/// the searcher's draw and mate conventions.
pub fn negamax(pos: &Position, depth: u32) -> i32 {
    fn go(pos: &Position, depth: u32, ply: i32, path: &mut Vec<u64>) -> i32 {
        if ply > 0 && (pos.is_insufficient_material() || repeated(pos, path)) {
            return 0;
        }
        let moves = pos.legal_moves();
        if moves.is_empty() {
            return if pos.in_check() { -(MATE - ply) } else { 0 };
        }
        if ply > 0 && pos.halfmove_clock() >= 100 {
            return 0;
        }
        if depth == 0 {
            return static_eval(pos).clamp(-MATE_BOUND + 1, MATE_BOUND - 1);
        }
        path.push(pos.hash());
        let best = moves
            .iter()
            .map(|&m| -go(&pos.play_unchecked(m), depth - 1, ply + 1, path))
            .max()
            .unwrap();
        path.pop();
        best
    }
    go(pos, depth, 0, &mut Vec::new())
}

fn induce(pos: &Position, depth: u32, cutoff: u8, root: bool, path: &mut Vec<u64>) -> u8 {
    let moves = pos.legal_moves();
    if moves.is_empty() {
        return if pos.in_check() { 0 } else { 1 };
    }
    if pos.halfmove_clock() >= 100 || pos.is_insufficient_material() {
        return 1;
    }
    if !root && repeated(pos, path) {
        return 1;
    }
    if depth == 0 {
        return cutoff;
    }
    path.push(pos.hash());
    let best = moves
        .iter()
        .map(|&m| 2 - induce(&pos.play_unchecked(m), depth - 1, 2 - cutoff, false, path))
        .max()
        .unwrap();
    path.pop();
    best
}

/// Backward induction in half units (0 loss, 1 draw, 2 win) where a
/// non-terminal node at the horizon is worth `cutoff` to its side to move.
pub fn induction(pos: &Position, depth: u32, cutoff: u8) -> u8 {
    induce(pos, depth, cutoff, true, &mut Vec::new())
}

/// Per-move values of [`induction`] at the root, from the mover's side.
pub fn induction_q(pos: &Position, depth: u32, cutoff: u8) -> Vec<(Move, u8)> {
    let mut path = vec![pos.hash()];
    pos.legal_moves()
        .iter()
        .map(|&m| (m, 2 - induce(&pos.play_unchecked(m), depth - 1, 2 - cutoff, false, &mut path)))
        .collect()
}
