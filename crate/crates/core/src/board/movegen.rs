//! Pseudo-legal generation plus a make-and-test legality filter.

use arrayvec::ArrayVec;

use super::bitboard::{
    bishop_attacks, king_attacks, knight_attacks, pawn_attacks, queen_attacks, rook_attacks,
    Bitboard,
};
use super::position::Position;
use super::types::{Color, Move, PieceKind, Square};

/// 218 is the known maximum number of legal moves in a chess position.
pub type MoveList = ArrayVec<Move, 256>;

fn push_pawn_move(list: &mut MoveList, from: Square, to: Square) {
    if to.rank() == 0 || to.rank() == 7 {
        for kind in PieceKind::PROMOTIONS {
            list.push(Move::with_promotion(from, to, kind));
        }
    } else {
        list.push(Move::new(from, to));
    }
}

impl Position {
    /// Pseudo-legal moves: obey piece movement rules but may leave the own
    /// king in check. Castling is only emitted when the king does not pass
    /// through or land on an attacked square.
    pub fn pseudo_legal_moves(&self) -> MoveList {
        let mut list = MoveList::new();
        let us = self.side_to_move;
        let them = !us;
        let own = self.color_bb(us);
        let enemy = self.color_bb(them);
        let occ = self.occupied();
        let targets = !own;

        let forward: i8 = if us == Color::White { 1 } else { -1 };
        let start_rank = if us == Color::White { 1 } else { 6 };
        for from in self.pieces(us, PieceKind::Pawn) {
            if let Some(one) = from.offset(0, forward) {
                if !occ.contains(one) {
                    push_pawn_move(&mut list, from, one);
                    if from.rank() == start_rank {
                        let two = one.offset(0, forward).unwrap();
                        if !occ.contains(two) {
                            list.push(Move::new(from, two));
                        }
                    }
                }
            }
            let mut caps = pawn_attacks(us, from) & enemy;
            if let Some(ep) = self.en_passant {
                caps |= pawn_attacks(us, from) & Bitboard::from_square(ep);
            }
            for to in caps {
                push_pawn_move(&mut list, from, to);
            }
        }

        for from in self.pieces(us, PieceKind::Knight) {
            for to in knight_attacks(from) & targets {
                list.push(Move::new(from, to));
            }
        }
        for from in self.pieces(us, PieceKind::Bishop) {
            for to in bishop_attacks(from, occ) & targets {
                list.push(Move::new(from, to));
            }
        }
        for from in self.pieces(us, PieceKind::Rook) {
            for to in rook_attacks(from, occ) & targets {
                list.push(Move::new(from, to));
            }
        }
        for from in self.pieces(us, PieceKind::Queen) {
            for to in queen_attacks(from, occ) & targets {
                list.push(Move::new(from, to));
            }
        }
        let king = self.king_square(us);
        for to in king_attacks(king) & targets {
            list.push(Move::new(king, to));
        }

        self.push_castling(&mut list, king, occ);
        list
    }

    fn push_castling(&self, list: &mut MoveList, king: Square, occ: Bitboard) {
        let us = self.side_to_move;
        let them = !us;
        let rank = if us == Color::White { 0 } else { 7 };
        if king != Square::from_coords(4, rank).unwrap() {
            return;
        }
        let sq = |f: u8| Square::from_coords(f, rank).unwrap();
        let rook_home = |f: u8| {
            self.piece_at(sq(f))
                .is_some_and(|p| p.color == us && p.kind == PieceKind::Rook)
        };
        if self.castling.kingside(us)
            && rook_home(7)
            && !occ.contains(sq(5))
            && !occ.contains(sq(6))
            && !self.is_attacked(sq(4), them)
            && !self.is_attacked(sq(5), them)
            && !self.is_attacked(sq(6), them)
        {
            list.push(Move::new(sq(4), sq(6)));
        }
        if self.castling.queenside(us)
            && rook_home(0)
            && !occ.contains(sq(1))
            && !occ.contains(sq(2))
            && !occ.contains(sq(3))
            && !self.is_attacked(sq(4), them)
            && !self.is_attacked(sq(3), them)
            && !self.is_attacked(sq(2), them)
        {
            list.push(Move::new(sq(4), sq(2)));
        }
    }

    /// Whether a pseudo-legal move keeps the mover's king safe.
    #[inline]
    pub fn is_pseudo_legal_safe(&self, m: Move) -> bool {
        let next = self.play_unchecked(m);
        !next.side_not_to_move_in_check()
    }

    /// Legal moves, sorted by (from, to, promotion).
    pub fn legal_moves(&self) -> MoveList {
        let mut list = self.pseudo_legal_moves();
        list.retain(|m| self.is_pseudo_legal_safe(*m));
        list.sort_unstable();
        list
    }

    /// Legal moves in generation order, for callers that re-order anyway.
    pub fn legal_moves_unsorted(&self) -> MoveList {
        let mut list = self.pseudo_legal_moves();
        list.retain(|m| self.is_pseudo_legal_safe(*m));
        list
    }

    pub fn has_legal_move(&self) -> bool {
        self.pseudo_legal_moves().iter().any(|m| self.is_pseudo_legal_safe(*m))
    }
}

/// Number of leaf nodes of the legal move tree at exactly `depth` ply.
pub fn perft(pos: &Position, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = pos.legal_moves_unsorted();
    if depth == 1 {
        return moves.len() as u64;
    }
    moves.iter().map(|m| perft(&pos.play_unchecked(*m), depth - 1)).sum()
}

/// Per-root-move perft counts, in legal move order.
pub fn perft_divide(pos: &Position, depth: u32) -> Vec<(Move, u64)> {
    if depth == 0 {
        return Vec::new();
    }
    pos.legal_moves()
        .iter()
        .map(|m| (*m, perft(&pos.play_unchecked(*m), depth - 1)))
        .collect()
}
