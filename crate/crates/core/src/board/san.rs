//! Standard Algebraic Notation.
//!
//! Trailing `!`/`?` annotations are dropped. A trailing `+` or `#` must agree
//! with the board (check, resp. checkmate) and is otherwise ignored; a
//! missing suffix is accepted.

use super::position::Position;
use super::types::{Move, PieceKind, Square};
use super::BoardError;

#[derive(Debug, Default)]
struct SanPattern {
    kind: Option<PieceKind>,
    from_file: Option<u8>,
    from_rank: Option<u8>,
    capture: bool,
    to: Option<Square>,
    promotion: Option<PieceKind>,
    castle: Option<bool>, // Some(true) = kingside
}

fn parse_pattern(core: &str) -> Option<SanPattern> {
    match core {
        "O-O" | "0-0" => return Some(SanPattern { castle: Some(true), ..Default::default() }),
        "O-O-O" | "0-0-0" => return Some(SanPattern { castle: Some(false), ..Default::default() }),
        _ => {}
    }
    let mut chars: Vec<char> = core.chars().collect();
    let mut pat = SanPattern::default();

    if let Some(&first) = chars.first() {
        if let Some(kind) = PieceKind::from_san_letter(first) {
            pat.kind = Some(kind);
            chars.remove(0);
        }
    }
    // promotion: "=Q" or a bare trailing piece letter on a pawn move
    if pat.kind.is_none() {
        if let Some(&last) = chars.last() {
            if let Some(kind) = PieceKind::from_san_letter(last).filter(|k| k.is_promotion_target()) {
                pat.promotion = Some(kind);
                chars.pop();
                if chars.last() == Some(&'=') {
                    chars.pop();
                }
            }
        }
    }
    if chars.len() < 2 {
        return None;
    }
    let dest: String = chars[chars.len() - 2..].iter().collect();
    pat.to = Some(Square::parse(&dest)?);
    chars.truncate(chars.len() - 2);

    if chars.last() == Some(&'x') {
        pat.capture = true;
        chars.pop();
    }
    for c in chars {
        match c {
            'a'..='h' if pat.from_file.is_none() => pat.from_file = Some(c as u8 - b'a'),
            '1'..='8' if pat.from_rank.is_none() => pat.from_rank = Some(c as u8 - b'1'),
            _ => return None,
        }
    }
    Some(pat)
}

impl Position {
    /// Resolves a SAN token to the unique matching legal move.
    pub fn parse_san(&self, text: &str) -> Result<Move, BoardError> {
        let token = text.trim();
        let mut core = token.trim_end_matches(['!', '?']);
        let mut suffix = None;
        if let Some(rest) = core.strip_suffix('#') {
            suffix = Some('#');
            core = rest;
        } else if let Some(rest) = core.strip_suffix('+') {
            suffix = Some('+');
            core = rest;
        }
        let pat = parse_pattern(core).ok_or_else(|| BoardError::SanSyntax(token.to_string()))?;

        let legal = self.legal_moves();
        let matches: Vec<Move> = legal
            .iter()
            .copied()
            .filter(|&m| self.matches_pattern(m, &pat))
            .collect();
        let m = match matches.as_slice() {
            [] => return Err(BoardError::SanNoMatch(token.to_string())),
            [m] => *m,
            _ => return Err(BoardError::SanAmbiguous(token.to_string())),
        };

        if let Some(s) = suffix {
            let next = self.play_unchecked(m);
            let ok = match s {
                '#' => next.in_check() && !next.has_legal_move(),
                _ => next.in_check(),
            };
            if !ok {
                return Err(BoardError::SanSuffix(token.to_string()));
            }
        }
        Ok(m)
    }

    fn matches_pattern(&self, m: Move, pat: &SanPattern) -> bool {
        let piece = match self.piece_at(m.from) {
            Some(p) => p,
            None => return false,
        };
        let is_castle = piece.kind == PieceKind::King && m.from.file().abs_diff(m.to.file()) == 2;
        if let Some(kingside) = pat.castle {
            return is_castle && (m.to.file() == 6) == kingside;
        }
        if is_castle {
            return false;
        }
        if piece.kind != pat.kind.unwrap_or(PieceKind::Pawn) {
            return false;
        }
        if Some(m.to) != pat.to || m.promotion != pat.promotion {
            return false;
        }
        if pat.from_file.is_some_and(|f| f != m.from.file())
            || pat.from_rank.is_some_and(|r| r != m.from.rank())
        {
            return false;
        }
        if pat.capture && !self.is_capture(m) {
            return false;
        }
        // a pawn move without a source file is a push along its own file
        if piece.kind == PieceKind::Pawn && pat.from_file.is_none() && m.from.file() != m.to.file() {
            return false;
        }
        true
    }

    /// SAN for a legal move, with `+`/`#` suffix.
    pub fn to_san(&self, m: Move) -> String {
        let piece = self.piece_at(m.from).expect("move starts on a piece");
        let mut out = String::new();
        if piece.kind == PieceKind::King && m.from.file().abs_diff(m.to.file()) == 2 {
            out.push_str(if m.to.file() == 6 { "O-O" } else { "O-O-O" });
        } else if piece.kind == PieceKind::Pawn {
            if self.is_capture(m) {
                out.push((b'a' + m.from.file()) as char);
                out.push('x');
            }
            out.push_str(&m.to.to_string());
            if let Some(kind) = m.promotion {
                out.push('=');
                out.push(kind.san_letter().unwrap());
            }
        } else {
            out.push(piece.kind.san_letter().unwrap());
            let rivals: Vec<Move> = self
                .legal_moves()
                .into_iter()
                .filter(|o| {
                    o.to == m.to && o.from != m.from && self.piece_at(o.from) == Some(piece)
                })
                .collect();
            if !rivals.is_empty() {
                let same_file = rivals.iter().any(|o| o.from.file() == m.from.file());
                let same_rank = rivals.iter().any(|o| o.from.rank() == m.from.rank());
                if !same_file {
                    out.push((b'a' + m.from.file()) as char);
                } else if !same_rank {
                    out.push((b'1' + m.from.rank()) as char);
                } else {
                    out.push_str(&m.from.to_string());
                }
            }
            if self.is_capture(m) {
                out.push('x');
            }
            out.push_str(&m.to.to_string());
        }
        let next = self.play_unchecked(m);
        if next.in_check() {
            out.push(if next.has_legal_move() { '+' } else { '#' });
        }
        out
    }

    /// Resolves UCI long algebraic text to a legal move.
    pub fn parse_uci(&self, text: &str) -> Result<Move, BoardError> {
        let m = Move::parse_uci_text(text.trim())
            .ok_or_else(|| BoardError::UciSyntax(text.to_string()))?;
        if self.is_legal(m) {
            Ok(m)
        } else {
            Err(BoardError::IllegalMove(text.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLASKETT: &str = "8/3P3k/n2K3p/2p3n1/1b4N1/2p1p1P1/8/3B4 w - - 0 1";
    const CORRECTED_H8: &str = "7n/3P3k/n2K3p/2p5/1b4N1/2p1p1P1/8/3B4 w - - 0 1";

    fn sq(s: &str) -> Square {
        Square::parse(s).unwrap()
    }

    #[test]
    fn knight_check_from_plaskett() {
        let p = Position::from_fen(PLASKETT).unwrap();
        assert_eq!(p.parse_san("Nf6+").unwrap(), Move::new(sq("g4"), sq("f6")));
        assert_eq!(p.parse_san("Nf6").unwrap(), Move::new(sq("g4"), sq("f6")));
        assert!(matches!(p.parse_san("Nf6#"), Err(BoardError::SanSuffix(_))));
        assert_eq!(p.to_san(Move::new(sq("g4"), sq("f6"))), "Nf6+");
    }

    #[test]
    fn underpromotion_in_corrected_line() {
        let mut p = Position::from_fen(CORRECTED_H8).unwrap();
        for t in ["Nf6+", "Kg7", "Nh5+", "Kg6"] {
            p = p.apply_move(p.parse_san(t).unwrap()).unwrap();
        }
        let m = p.parse_san("d8=N").unwrap();
        assert_eq!(m, Move::with_promotion(sq("d7"), sq("d8"), PieceKind::Knight));
        assert_eq!(p.parse_san("d8N").unwrap(), m);
        assert_eq!(p.to_san(m), "d8=N");
    }

    #[test]
    fn pawn_push_and_errors() {
        let p = Position::startpos();
        assert_eq!(p.parse_san("e4").unwrap(), Move::new(sq("e2"), sq("e4")));
        assert!(matches!(p.parse_san("e5"), Err(BoardError::SanNoMatch(_))));
        assert!(matches!(p.parse_san("Zz9"), Err(BoardError::SanSyntax(_))));
        assert!(matches!(p.parse_san("exd3"), Err(BoardError::SanNoMatch(_))));
    }

    #[test]
    fn disambiguation() {
        let p = Position::from_fen("4k3/8/8/8/8/8/8/R4R1K w - - 0 1").unwrap();
        assert!(matches!(p.parse_san("Rd1"), Err(BoardError::SanAmbiguous(_))));
        assert_eq!(p.parse_san("Rad1").unwrap(), Move::new(sq("a1"), sq("d1")));
        assert_eq!(p.to_san(Move::new(sq("a1"), sq("c1"))), "Rac1");
        let q = Position::from_fen("4k3/8/8/8/R7/8/8/R3K3 w - - 0 1").unwrap();
        assert_eq!(q.to_san(Move::new(sq("a1"), sq("a2"))), "R1a2");
    }

    #[test]
    fn castling_tokens() {
        let p = Position::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1").unwrap();
        assert_eq!(p.parse_san("O-O").unwrap(), Move::new(Square::E1, Square::G1));
        assert_eq!(p.parse_san("0-0-0").unwrap(), Move::new(Square::E1, Square::C1));
        assert_eq!(p.to_san(Move::new(Square::E1, Square::G1)), "O-O");
    }

    #[test]
    fn annotations_are_ignored() {
        let p = Position::from_fen(PLASKETT).unwrap();
        assert!(p.parse_san("Nf6+!").is_ok());
        assert!(p.parse_san("Nf6!?").is_ok());
    }

    #[test]
    fn uci_resolution() {
        let p = Position::from_fen(PLASKETT).unwrap();
        assert_eq!(p.parse_uci("g4f6").unwrap(), Move::new(sq("g4"), sq("f6")));
        assert!(p.parse_uci("d7d8n").is_ok());
        assert!(matches!(p.parse_uci("d7d8"), Err(BoardError::IllegalMove(_))));
        assert!(matches!(p.parse_uci("zz"), Err(BoardError::UciSyntax(_))));
    }
}
