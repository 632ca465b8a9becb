//! Chess rules: position representation, FEN/EPD/SAN/UCI text formats,
//! legal move generation and game-end detection.

mod bitboard;
mod epd;
mod fen;
mod game;
mod movegen;
mod position;
mod san;
mod types;
mod zobrist;

pub use bitboard::{
    bishop_attacks, king_attacks, knight_attacks, pawn_attacks, queen_attacks, rook_attacks,
    Bitboard,
};
pub use epd::{parse_epd, EpdOps};
pub use fen::MAX_HALFMOVE_CLOCK;
pub use game::Game;
pub use movegen::{perft, perft_divide, MoveList};
pub use position::{CastlingRights, GameResult, Position, START_FEN};
pub use types::{Color, Move, Piece, PieceKind, Square};
pub use zobrist::ZOBRIST_SEED;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("FEN needs 6 fields, found {0}")]
    FenFieldCount(usize),
    #[error("bad piece placement: {0}")]
    FenPlacement(String),
    #[error("bad side to move '{0}'")]
    FenSideToMove(String),
    #[error("bad castling field: {0}")]
    FenCastling(String),
    #[error("bad en-passant field: {0}")]
    FenEnPassant(String),
    #[error("bad move clock: {0}")]
    FenClock(String),
    #[error("illegal piece counts: {0}")]
    PieceCount(String),
    #[error("side not to move is in check")]
    OpponentInCheck,
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("malformed SAN '{0}'")]
    SanSyntax(String),
    #[error("no legal move matches '{0}'")]
    SanNoMatch(String),
    #[error("ambiguous SAN '{0}'")]
    SanAmbiguous(String),
    #[error("check/mate suffix of '{0}' contradicts the position")]
    SanSuffix(String),
    #[error("malformed UCI move '{0}'")]
    UciSyntax(String),
    #[error("malformed EPD: {0}")]
    Epd(String),
}
