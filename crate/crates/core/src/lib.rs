//! Dual-paradigm chess engine core: rules, an alpha-beta searcher, a PUCT
//! Monte-Carlo searcher, an exact backward-induction oracle and an
//! endgame-study benchmark harness.

pub mod board;
pub mod eval;
pub mod harness;
pub mod mcts;
pub mod oracle;
pub mod search;
pub mod uci;

pub use board::{Color, Game, GameResult, Move, Piece, PieceKind, Position, Square};
pub use eval::{cp_to_winprob, Score};
