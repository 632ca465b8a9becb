use super::position::{GameResult, Position};
use super::types::Move;
use super::BoardError;

/// A position plus the hashes of every earlier position since the game
/// started, for repetition detection.
#[derive(Clone, Debug)]
pub struct Game {
    current: Position,
    history: Vec<u64>,
    moves: Vec<Move>,
}

impl Game {
    pub fn new(start: Position) -> Game {
        Game { current: start, history: Vec::new(), moves: Vec::new() }
    }

    pub fn position(&self) -> &Position {
        &self.current
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Hashes of the positions before the current one, oldest first.
    pub fn history(&self) -> &[u64] {
        &self.history
    }

    pub fn play(&mut self, m: Move) -> Result<(), BoardError> {
        let next = self.current.apply_move(m)?;
        self.history.push(self.current.hash());
        self.moves.push(m);
        self.current = next;
        Ok(())
    }

    pub fn play_san(&mut self, token: &str) -> Result<Move, BoardError> {
        let m = self.current.parse_san(token)?;
        self.play(m)?;
        Ok(m)
    }

    pub fn play_uci(&mut self, token: &str) -> Result<Move, BoardError> {
        let m = self.current.parse_uci(token)?;
        self.play(m)?;
        Ok(m)
    }

    /// Occurrences of the current position earlier in the game, looking back
    /// only as far as the last irreversible move.
    pub fn repetitions(&self) -> usize {
        let hash = self.current.hash();
        let window = self.current.halfmove_clock() as usize;
        self.history
            .iter()
            .rev()
            .take(window)
            .filter(|&&h| h == hash)
            .count()
    }

    pub fn result(&self) -> GameResult {
        match self.current.game_result() {
            GameResult::Ongoing if self.repetitions() >= 2 => GameResult::DrawByRule,
            r => r,
        }
    }
}
