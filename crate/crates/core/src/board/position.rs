use super::bitboard::{
    bishop_attacks, king_attacks, knight_attacks, pawn_attacks, queen_attacks, rook_attacks,
    Bitboard,
};
use super::types::{Color, Move, Piece, PieceKind, Square};
use super::zobrist;
use super::BoardError;

pub const WHITE_KINGSIDE: u8 = 1;
pub const WHITE_QUEENSIDE: u8 = 2;
pub const BLACK_KINGSIDE: u8 = 4;
pub const BLACK_QUEENSIDE: u8 = 8;

/// Castling rights as four flags.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CastlingRights(pub(crate) u8);

impl CastlingRights {
    pub const NONE: CastlingRights = CastlingRights(0);
    pub const ALL: CastlingRights = CastlingRights(15);

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn has(self, flag: u8) -> bool {
        self.0 & flag != 0
    }

    pub fn kingside(self, color: Color) -> bool {
        self.has(match color {
            Color::White => WHITE_KINGSIDE,
            Color::Black => BLACK_KINGSIDE,
        })
    }

    pub fn queenside(self, color: Color) -> bool {
        self.has(match color {
            Color::White => WHITE_QUEENSIDE,
            Color::Black => BLACK_QUEENSIDE,
        })
    }
}

/// Rights that survive a move touching each square.
static CASTLE_MASK: [u8; 64] = {
    let mut mask = [15u8; 64];
    mask[0] = 15 & !WHITE_QUEENSIDE;
    mask[4] = 15 & !(WHITE_KINGSIDE | WHITE_QUEENSIDE);
    mask[7] = 15 & !WHITE_KINGSIDE;
    mask[56] = 15 & !BLACK_QUEENSIDE;
    mask[60] = 15 & !(BLACK_KINGSIDE | BLACK_QUEENSIDE);
    mask[63] = 15 & !BLACK_KINGSIDE;
    mask
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameResult {
    Ongoing,
    WhiteMates,
    BlackMates,
    Stalemate,
    /// Fifty-move rule, threefold repetition or insufficient material.
    DrawByRule,
}

impl GameResult {
    pub fn is_terminal(self) -> bool {
        self != GameResult::Ongoing
    }

    pub fn is_checkmate(self) -> bool {
        matches!(self, GameResult::WhiteMates | GameResult::BlackMates)
    }
}

/// A complete chess position.
///
/// Positions are values: [`Position::apply_move`] returns a new position and
/// never mutates `self`.
#[derive(Clone, Debug)]
pub struct Position {
    pub(crate) by_kind: [Bitboard; 6],
    pub(crate) by_color: [Bitboard; 2],
    pub(crate) mailbox: [Option<Piece>; 64],
    pub(crate) side_to_move: Color,
    pub(crate) castling: CastlingRights,
    pub(crate) en_passant: Option<Square>,
    pub(crate) halfmove_clock: u16,
    pub(crate) fullmove_number: u16,
    pub(crate) hash: u64,
}

impl PartialEq for Position {
    fn eq(&self, other: &Self) -> bool {
        self.mailbox == other.mailbox
            && self.side_to_move == other.side_to_move
            && self.castling == other.castling
            && self.en_passant == other.en_passant
            && self.halfmove_clock == other.halfmove_clock
            && self.fullmove_number == other.fullmove_number
    }
}

impl Eq for Position {}

pub const START_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

impl Position {
    pub(crate) fn empty() -> Position {
        Position {
            by_kind: [Bitboard::EMPTY; 6],
            by_color: [Bitboard::EMPTY; 2],
            mailbox: [None; 64],
            side_to_move: Color::White,
            castling: CastlingRights::NONE,
            en_passant: None,
            halfmove_clock: 0,
            fullmove_number: 1,
            hash: 0,
        }
    }

    pub fn startpos() -> Position {
        Position::from_fen(START_FEN).expect("start FEN is valid")
    }

    #[inline]
    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.mailbox[sq.index()]
    }

    #[inline]
    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    pub fn castling_rights(&self) -> CastlingRights {
        self.castling
    }

    pub fn en_passant(&self) -> Option<Square> {
        self.en_passant
    }

    pub fn halfmove_clock(&self) -> u16 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u16 {
        self.fullmove_number
    }

    /// Incrementally maintained Zobrist hash.
    #[inline]
    pub fn hash(&self) -> u64 {
        self.hash
    }

    #[inline]
    pub fn occupied(&self) -> Bitboard {
        self.by_color[0] | self.by_color[1]
    }

    #[inline]
    pub fn color_bb(&self, color: Color) -> Bitboard {
        self.by_color[color.index()]
    }

    #[inline]
    pub fn kind_bb(&self, kind: PieceKind) -> Bitboard {
        self.by_kind[kind.index()]
    }

    #[inline]
    pub fn pieces(&self, color: Color, kind: PieceKind) -> Bitboard {
        self.by_color[color.index()] & self.by_kind[kind.index()]
    }

    #[inline]
    pub fn king_square(&self, color: Color) -> Square {
        self.pieces(color, PieceKind::King)
            .lsb()
            .expect("a valid position has a king of each color")
    }

    /// Iterates `(square, piece)` over occupied squares in index order.
    pub fn piece_squares(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        self.occupied().map(move |sq| (sq, self.mailbox[sq.index()].unwrap()))
    }

    pub(crate) fn put_piece(&mut self, piece: Piece, sq: Square) {
        debug_assert!(self.mailbox[sq.index()].is_none());
        let bb = Bitboard::from_square(sq);
        self.by_kind[piece.kind.index()] |= bb;
        self.by_color[piece.color.index()] |= bb;
        self.mailbox[sq.index()] = Some(piece);
        self.hash ^= zobrist::piece_key(piece, sq);
    }

    pub(crate) fn remove_piece(&mut self, sq: Square) -> Piece {
        let piece = self.mailbox[sq.index()].take().expect("square is occupied");
        let bb = Bitboard::from_square(sq);
        self.by_kind[piece.kind.index()] ^= bb;
        self.by_color[piece.color.index()] ^= bb;
        self.hash ^= zobrist::piece_key(piece, sq);
        piece
    }

    /// Hash recomputed from scratch; always equal to [`Position::hash`].
    pub fn compute_hash(&self) -> u64 {
        let mut h = 0;
        for (sq, piece) in self.piece_squares() {
            h ^= zobrist::piece_key(piece, sq);
        }
        h ^ zobrist::side_key(self.side_to_move)
            ^ zobrist::castling_key(self.castling.0)
            ^ zobrist::en_passant_key(self.en_passant)
    }

    /// All pieces of `by` attacking `sq` given an occupancy.
    pub fn attackers_to(&self, sq: Square, by: Color, occupied: Bitboard) -> Bitboard {
        let them = self.color_bb(by);
        let diag = self.kind_bb(PieceKind::Bishop) | self.kind_bb(PieceKind::Queen);
        let ortho = self.kind_bb(PieceKind::Rook) | self.kind_bb(PieceKind::Queen);
        ((pawn_attacks(!by, sq) & self.kind_bb(PieceKind::Pawn))
            | (knight_attacks(sq) & self.kind_bb(PieceKind::Knight))
            | (king_attacks(sq) & self.kind_bb(PieceKind::King))
            | (bishop_attacks(sq, occupied) & diag)
            | (rook_attacks(sq, occupied) & ortho))
            & them
    }

    #[inline]
    pub fn is_attacked(&self, sq: Square, by: Color) -> bool {
        !self.attackers_to(sq, by, self.occupied()).is_empty()
    }

    /// Whether the side to move is in check.
    #[inline]
    pub fn in_check(&self) -> bool {
        self.is_attacked(self.king_square(self.side_to_move), !self.side_to_move)
    }

    pub(crate) fn side_not_to_move_in_check(&self) -> bool {
        let them = !self.side_to_move;
        self.is_attacked(self.king_square(them), self.side_to_move)
    }

    /// Squares attacked by a piece standing on `sq` (pawns: capture squares).
    pub fn attacks_from(&self, piece: Piece, sq: Square) -> Bitboard {
        let occ = self.occupied();
        match piece.kind {
            PieceKind::Pawn => pawn_attacks(piece.color, sq),
            PieceKind::Knight => knight_attacks(sq),
            PieceKind::Bishop => bishop_attacks(sq, occ),
            PieceKind::Rook => rook_attacks(sq, occ),
            PieceKind::Queen => queen_attacks(sq, occ),
            PieceKind::King => king_attacks(sq),
        }
    }

    /// Whether `m` captures something, en passant included.
    #[inline]
    pub fn is_capture(&self, m: Move) -> bool {
        self.mailbox[m.to.index()].is_some() || self.is_en_passant(m)
    }

    #[inline]
    pub fn is_en_passant(&self, m: Move) -> bool {
        Some(m.to) == self.en_passant
            && matches!(self.mailbox[m.from.index()], Some(p) if p.kind == PieceKind::Pawn)
    }

    /// Kind of the piece captured by `m`, if any.
    pub fn captured_kind(&self, m: Move) -> Option<PieceKind> {
        match self.mailbox[m.to.index()] {
            Some(p) => Some(p.kind),
            None if self.is_en_passant(m) => Some(PieceKind::Pawn),
            None => None,
        }
    }

    /// Applies a legal move. Returns an error when `m` is not legal here.
    pub fn apply_move(&self, m: Move) -> Result<Position, BoardError> {
        if !self.is_legal(m) {
            return Err(BoardError::IllegalMove(m.to_uci()));
        }
        Ok(self.play_unchecked(m))
    }

    pub fn is_legal(&self, m: Move) -> bool {
        self.legal_moves().contains(&m)
    }

    /// Applies a move known to be at least pseudo-legal, without checking it.
    pub fn play_unchecked(&self, m: Move) -> Position {
        let mut next = self.clone();
        let us = self.side_to_move;
        let them = !us;
        let piece = self.mailbox[m.from.index()].expect("move starts on an occupied square");

        next.hash ^= zobrist::castling_key(self.castling.0) ^ zobrist::en_passant_key(self.en_passant);
        next.en_passant = None;
        next.halfmove_clock = self.halfmove_clock.saturating_add(1);

        if self.mailbox[m.to.index()].is_some() {
            next.remove_piece(m.to);
            next.halfmove_clock = 0;
        }

        next.remove_piece(m.from);
        if piece.kind == PieceKind::Pawn {
            next.halfmove_clock = 0;
            if Some(m.to) == self.en_passant {
                let victim = Square::from_coords(m.to.file(), m.from.rank()).unwrap();
                next.remove_piece(victim);
            }
        }
        let placed = match m.promotion {
            Some(kind) => Piece::new(us, kind),
            None => piece,
        };
        next.put_piece(placed, m.to);

        if piece.kind == PieceKind::King && m.from.file().abs_diff(m.to.file()) == 2 {
            let rank = m.from.rank();
            let (rook_from, rook_to) = if m.to.file() == 6 { (7, 5) } else { (0, 3) };
            let rook = next.remove_piece(Square::from_coords(rook_from, rank).unwrap());
            next.put_piece(rook, Square::from_coords(rook_to, rank).unwrap());
        }

        if piece.kind == PieceKind::Pawn && m.from.rank().abs_diff(m.to.rank()) == 2 {
            let mid = Square::from_coords(m.from.file(), (m.from.rank() + m.to.rank()) / 2).unwrap();
            if !(pawn_attacks(us, mid) & next.pieces(them, PieceKind::Pawn)).is_empty() {
                next.en_passant = Some(mid);
            }
        }

        next.castling = CastlingRights(
            self.castling.0 & CASTLE_MASK[m.from.index()] & CASTLE_MASK[m.to.index()],
        );
        next.side_to_move = them;
        if us == Color::Black {
            next.fullmove_number = self.fullmove_number.saturating_add(1);
        }
        next.hash ^= zobrist::castling_key(next.castling.0)
            ^ zobrist::en_passant_key(next.en_passant)
            ^ zobrist::side_key(Color::White)
            ^ zobrist::side_key(Color::Black);
        next
    }

    /// Passes the turn. Only meaningful when not in check; used by tests and
    /// evaluation symmetry checks, never by search.
    pub fn with_side_to_move(&self, color: Color) -> Position {
        let mut next = self.clone();
        next.side_to_move = color;
        next.en_passant = None;
        next.hash = next.compute_hash();
        next
    }

    /// Mirror image with colors swapped: White pieces become Black pieces on
    /// the rank-mirrored squares, side to move and castling rights swap too.
    pub fn color_flip(&self) -> Position {
        let mut flipped = Position::empty();
        for (sq, piece) in self.piece_squares() {
            flipped.put_piece(Piece::new(!piece.color, piece.kind), sq.flip_rank());
        }
        let c = self.castling.0;
        flipped.castling = CastlingRights(((c & 3) << 2) | ((c >> 2) & 3));
        flipped.side_to_move = !self.side_to_move;
        flipped.en_passant = self.en_passant.map(Square::flip_rank);
        flipped.halfmove_clock = self.halfmove_clock;
        flipped.fullmove_number = self.fullmove_number;
        flipped.hash = flipped.compute_hash();
        flipped
    }

    pub fn is_insufficient_material(&self) -> bool {
        let heavy = self.kind_bb(PieceKind::Pawn)
            | self.kind_bb(PieceKind::Rook)
            | self.kind_bb(PieceKind::Queen);
        if !heavy.is_empty() {
            return false;
        }
        let minors = self.kind_bb(PieceKind::Knight) | self.kind_bb(PieceKind::Bishop);
        minors.count() <= 1
    }

    /// Result from this position alone. Threefold repetition needs the game
    /// history; see [`crate::board::Game::result`].
    pub fn game_result(&self) -> GameResult {
        if self.legal_moves().is_empty() {
            return if self.in_check() {
                match self.side_to_move {
                    Color::White => GameResult::BlackMates,
                    Color::Black => GameResult::WhiteMates,
                }
            } else {
                GameResult::Stalemate
            };
        }
        if self.halfmove_clock >= 100 || self.is_insufficient_material() {
            return GameResult::DrawByRule;
        }
        GameResult::Ongoing
    }

    /// Whether `m` (assumed legal) gives check.
    pub fn gives_check(&self, m: Move) -> bool {
        self.play_unchecked(m).in_check()
    }

    /// Knights, bishops, rooks and queens of `color`.
    pub fn non_pawn_material(&self, color: Color) -> Bitboard {
        self.color_bb(color)
            & !(self.kind_bb(PieceKind::Pawn) | self.kind_bb(PieceKind::King))
    }
}
