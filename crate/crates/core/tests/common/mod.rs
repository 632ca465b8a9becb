#![allow(dead_code)]

pub mod minimax;
pub mod studies;
pub mod slow_movegen;
pub mod suite;

use dualmind_core::Position;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Positions visited by a seeded random playout from the start position.
pub fn random_walk(seed: u64, plies: usize) -> Vec<Position> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Position::startpos();
    let mut out = vec![pos.clone()];
    for _ in 0..plies {
        let moves = pos.legal_moves();
        let Some(m) = moves.choose(&mut rng) else { break };
        pos = pos.apply_move(*m).unwrap();
        out.push(pos.clone());
    }
    out
}
