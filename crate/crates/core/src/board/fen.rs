use super::bitboard::{pawn_attacks, Bitboard};
use super::position::{
    CastlingRights, Position, BLACK_KINGSIDE, BLACK_QUEENSIDE, WHITE_KINGSIDE, WHITE_QUEENSIDE,
};
use super::types::{Color, Piece, PieceKind, Square};
use super::BoardError;

/// The fifty-move counter never legitimately exceeds 150 half-moves
/// (the seventy-five move rule ends the game first).
pub const MAX_HALFMOVE_CLOCK: u16 = 150;

impl Position {
    /// Parses a six-field FEN string.
    pub fn from_fen(text: &str) -> Result<Position, BoardError> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(BoardError::FenFieldCount(fields.len()));
        }
        let mut pos = Position::from_fen_fields(&fields[..4])?;
        pos.halfmove_clock = fields[4]
            .parse::<u16>()
            .ok()
            .filter(|&n| n <= MAX_HALFMOVE_CLOCK)
            .ok_or_else(|| BoardError::FenClock(format!("halfmove clock '{}'", fields[4])))?;
        pos.fullmove_number = fields[5]
            .parse::<u16>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| BoardError::FenClock(format!("fullmove number '{}'", fields[5])))?;
        Ok(pos)
    }

    /// Parses the four position fields shared by FEN and EPD. Clocks are
    /// set to `0 1`.
    pub(crate) fn from_fen_fields(fields: &[&str]) -> Result<Position, BoardError> {
        debug_assert_eq!(fields.len(), 4);
        let mut pos = Position::empty();
        parse_placement(&mut pos, fields[0])?;

        pos.side_to_move = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            other => return Err(BoardError::FenSideToMove(other.to_string())),
        };

        pos.castling = parse_castling(fields[2])?;
        validate_material(&pos)?;
        validate_castling(&pos)?;
        pos.en_passant = parse_en_passant(&pos, fields[3])?;

        if pos.side_not_to_move_in_check() {
            return Err(BoardError::OpponentInCheck);
        }
        pos.hash = pos.compute_hash();
        Ok(pos)
    }

    /// Canonical FEN. The en-passant square is written only when a pawn
    /// could capture there.
    pub fn to_fen(&self) -> String {
        format!(
            "{} {} {}",
            self.fen_fields(),
            self.halfmove_clock,
            self.fullmove_number
        )
    }

    /// The first four FEN fields (the EPD position part).
    pub fn fen_fields(&self) -> String {
        let mut out = String::with_capacity(80);
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                match self.piece_at(Square::from_coords(file, rank).unwrap()) {
                    Some(piece) => {
                        if empty > 0 {
                            out.push(char::from(b'0' + empty));
                            empty = 0;
                        }
                        out.push(piece.to_fen_char());
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                out.push(char::from(b'0' + empty));
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out.push(' ');
        out.push(if self.side_to_move == Color::White { 'w' } else { 'b' });
        out.push(' ');
        if self.castling.bits() == 0 {
            out.push('-');
        } else {
            for (flag, c) in [
                (WHITE_KINGSIDE, 'K'),
                (WHITE_QUEENSIDE, 'Q'),
                (BLACK_KINGSIDE, 'k'),
                (BLACK_QUEENSIDE, 'q'),
            ] {
                if self.castling.has(flag) {
                    out.push(c);
                }
            }
        }
        out.push(' ');
        match self.en_passant {
            Some(sq) => out.push_str(&sq.to_string()),
            None => out.push('-'),
        }
        out
    }
}

fn parse_placement(pos: &mut Position, text: &str) -> Result<(), BoardError> {
    let ranks: Vec<&str> = text.split('/').collect();
    if ranks.len() != 8 {
        return Err(BoardError::FenPlacement(format!("expected 8 ranks, found {}", ranks.len())));
    }
    for (i, row) in ranks.iter().enumerate() {
        let rank = 7 - i as u8;
        let mut file = 0u8;
        for c in row.chars() {
            if let Some(d) = c.to_digit(10) {
                if !(1..=8).contains(&d) {
                    return Err(BoardError::FenPlacement(format!("bad empty-run '{c}'")));
                }
                file += d as u8;
            } else {
                let piece = Piece::from_fen_char(c)
                    .ok_or_else(|| BoardError::FenPlacement(format!("unknown piece '{c}'")))?;
                let sq = Square::from_coords(file, rank).ok_or_else(|| {
                    BoardError::FenPlacement(format!("rank {} overflows", rank + 1))
                })?;
                pos.put_piece(piece, sq);
                file += 1;
            }
            if file > 8 {
                return Err(BoardError::FenPlacement(format!("rank {} overflows", rank + 1)));
            }
        }
        if file != 8 {
            return Err(BoardError::FenPlacement(format!("rank {} has {file} squares", rank + 1)));
        }
    }
    Ok(())
}

fn parse_castling(text: &str) -> Result<CastlingRights, BoardError> {
    if text == "-" {
        return Ok(CastlingRights::NONE);
    }
    let mut bits = 0u8;
    for c in text.chars() {
        let flag = match c {
            'K' => WHITE_KINGSIDE,
            'Q' => WHITE_QUEENSIDE,
            'k' => BLACK_KINGSIDE,
            'q' => BLACK_QUEENSIDE,
            _ => return Err(BoardError::FenCastling(format!("unknown flag '{c}' in '{text}'"))),
        };
        if bits & flag != 0 {
            return Err(BoardError::FenCastling(format!("repeated flag '{c}'")));
        }
        bits |= flag;
    }
    Ok(CastlingRights(bits))
}

fn validate_material(pos: &Position) -> Result<(), BoardError> {
    for color in Color::ALL {
        let kings = pos.pieces(color, PieceKind::King).count();
        if kings != 1 {
            return Err(BoardError::PieceCount(format!(
                "{} has {kings} kings",
                color.name()
            )));
        }
        if pos.color_bb(color).count() > 16 {
            return Err(BoardError::PieceCount(format!("{} has more than 16 pieces", color.name())));
        }
        if pos.pieces(color, PieceKind::Pawn).count() > 8 {
            return Err(BoardError::PieceCount(format!("{} has more than 8 pawns", color.name())));
        }
    }
    if !(pos.kind_bb(PieceKind::Pawn) & Bitboard::BACK_RANKS).is_empty() {
        return Err(BoardError::PieceCount("pawn on first or last rank".into()));
    }
    Ok(())
}

fn validate_castling(pos: &Position) -> Result<(), BoardError> {
    let checks = [
        (WHITE_KINGSIDE, Color::White, Square::E1, Square::H1),
        (WHITE_QUEENSIDE, Color::White, Square::E1, Square::A1),
        (BLACK_KINGSIDE, Color::Black, Square::E8, Square::H8),
        (BLACK_QUEENSIDE, Color::Black, Square::E8, Square::A8),
    ];
    for (flag, color, king, rook) in checks {
        if !pos.castling.has(flag) {
            continue;
        }
        let ok = pos.piece_at(king) == Some(Piece::new(color, PieceKind::King))
            && pos.piece_at(rook) == Some(Piece::new(color, PieceKind::Rook));
        if !ok {
            return Err(BoardError::FenCastling(format!(
                "right without king on {king} and rook on {rook}"
            )));
        }
    }
    Ok(())
}

fn parse_en_passant(pos: &Position, text: &str) -> Result<Option<Square>, BoardError> {
    if text == "-" {
        return Ok(None);
    }
    let sq = Square::parse(text)
        .ok_or_else(|| BoardError::FenEnPassant(format!("bad square '{text}'")))?;
    let us = pos.side_to_move;
    let (ep_rank, pawn_rank, origin_rank) = match us {
        Color::White => (5, 4, 6),
        Color::Black => (2, 3, 1),
    };
    let pawn_sq = Square::from_coords(sq.file(), pawn_rank).unwrap();
    let origin = Square::from_coords(sq.file(), origin_rank).unwrap();
    let consistent = sq.rank() == ep_rank
        && pos.piece_at(sq).is_none()
        && pos.piece_at(origin).is_none()
        && pos.piece_at(pawn_sq) == Some(Piece::new(!us, PieceKind::Pawn));
    if !consistent {
        return Err(BoardError::FenEnPassant(format!(
            "{text} is not behind a pawn that just advanced two squares"
        )));
    }
    let capturers = pawn_attacks(!us, sq) & pos.pieces(us, PieceKind::Pawn);
    Ok(if capturers.is_empty() { None } else { Some(sq) })
}
