//! Hand-crafted evaluation: material, tapered piece-square tables, mobility
//! and passed pawns.

use std::sync::OnceLock;

use super::{EvalError, Score};
use crate::board::{
    bishop_attacks, knight_attacks, queen_attacks, rook_attacks, Bitboard, Color, PieceKind,
    Position, Square,
};

/// Material values in centipawns, indexed by [`PieceKind::index`].
pub const PIECE_VALUES: [i32; 6] = [100, 320, 330, 500, 900, 0];

const PHASE_WEIGHTS: [i32; 6] = [0, 1, 1, 2, 4, 0];
const MAX_PHASE: i32 = 24;

const MOBILITY_MG: [i32; 6] = [0, 4, 5, 2, 1, 0];
const MOBILITY_EG: [i32; 6] = [0, 4, 5, 4, 2, 0];

/// Bonus for a passed pawn by its rank relative to its owner.
const PASSED_EG: [i32; 8] = [0, 10, 15, 25, 40, 65, 100, 0];
const PASSED_MG: [i32; 8] = [0, 5, 8, 12, 20, 32, 50, 0];

const PST_TEXT: &str = include_str!("../../data/pst.txt");

/// `[kind][sq]` for White, square index a1 = 0.
pub struct PieceSquareTables {
    pub mg: [[i32; 64]; 6],
    pub eg: [[i32; 64]; 6],
}

/// Parses the committed table text. Blocks are headed `<piece> <mg|eg>` and
/// list ranks 8 down to 1.
pub fn parse_pst(text: &str) -> Result<PieceSquareTables, String> {
    let mut tables = PieceSquareTables { mg: [[0; 64]; 6], eg: [[0; 64]; 6] };
    let mut seen = [[false; 2]; 6];
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    while let Some(header) = lines.next() {
        let mut words = header.split_whitespace();
        let kind = match words.next() {
            Some("pawn") => PieceKind::Pawn,
            Some("knight") => PieceKind::Knight,
            Some("bishop") => PieceKind::Bishop,
            Some("rook") => PieceKind::Rook,
            Some("queen") => PieceKind::Queen,
            Some("king") => PieceKind::King,
            _ => return Err(format!("bad table header: {header}")),
        };
        let phase = match words.next() {
            Some("mg") => 0,
            Some("eg") => 1,
            _ => return Err(format!("bad table phase: {header}")),
        };
        let table = if phase == 0 { &mut tables.mg[kind.index()] } else { &mut tables.eg[kind.index()] };
        for rank in (0..8).rev() {
            let row = lines.next().ok_or_else(|| format!("{header}: missing rows"))?;
            let values: Vec<i32> = row
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| format!("{header}: {e}"))?;
            if values.len() != 8 {
                return Err(format!("{header}: row has {} values", values.len()));
            }
            for (file, v) in values.into_iter().enumerate() {
                table[rank * 8 + file] = v;
            }
        }
        seen[kind.index()][phase] = true;
    }
    if seen.iter().flatten().any(|s| !s) {
        return Err("missing table".to_string());
    }
    Ok(tables)
}

pub fn piece_square_tables() -> &'static PieceSquareTables {
    static TABLES: OnceLock<PieceSquareTables> = OnceLock::new();
    TABLES.get_or_init(|| parse_pst(PST_TEXT).expect("committed piece-square tables parse"))
}

fn passed_mask(color: Color, sq: Square) -> Bitboard {
    let mut mask = 0u64;
    let file = sq.file() as i32;
    for f in (file - 1).max(0)..=(file + 1).min(7) {
        for r in 0..8u8 {
            let ahead = match color {
                Color::White => r > sq.rank(),
                Color::Black => r < sq.rank(),
            };
            if ahead {
                mask |= 1 << (r as u64 * 8 + f as u64);
            }
        }
    }
    Bitboard(mask)
}

/// Game phase in `0..=24`; 24 is the full middlegame.
pub fn game_phase(pos: &Position) -> i32 {
    let mut phase = 0;
    for kind in PieceKind::ALL {
        phase += PHASE_WEIGHTS[kind.index()] * pos.kind_bb(kind).count() as i32;
    }
    phase.min(MAX_PHASE)
}

fn side_terms(pos: &Position, color: Color) -> (i32, i32) {
    let pst = piece_square_tables();
    let occupied = pos.occupied();
    let own = pos.color_bb(color);
    let enemy_pawns = pos.pieces(!color, PieceKind::Pawn);
    let (mut mg, mut eg) = (0, 0);
    for kind in PieceKind::ALL {
        for sq in pos.pieces(color, kind) {
            let rel = sq.relative_to(color).index();
            let value = PIECE_VALUES[kind.index()];
            mg += value + pst.mg[kind.index()][rel];
            eg += value + pst.eg[kind.index()][rel];
            let attacks = match kind {
                PieceKind::Knight => knight_attacks(sq),
                PieceKind::Bishop => bishop_attacks(sq, occupied),
                PieceKind::Rook => rook_attacks(sq, occupied),
                PieceKind::Queen => queen_attacks(sq, occupied),
                _ => Bitboard::EMPTY,
            };
            let mobility = (attacks & !own).count() as i32;
            mg += MOBILITY_MG[kind.index()] * mobility;
            eg += MOBILITY_EG[kind.index()] * mobility;
            if kind == PieceKind::Pawn && (passed_mask(color, sq) & enemy_pawns).is_empty() {
                let r = sq.relative_to(color).rank() as usize;
                mg += PASSED_MG[r];
                eg += PASSED_EG[r];
            }
        }
    }
    (mg, eg)
}

/// White-minus-Black evaluation in centipawns, no terminal check.
pub fn evaluate_white(pos: &Position) -> i32 {
    let (wmg, weg) = side_terms(pos, Color::White);
    let (bmg, beg) = side_terms(pos, Color::Black);
    let phase = game_phase(pos);
    // truncating division keeps the result exactly antisymmetric
    ((wmg - bmg) * phase + (weg - beg) * (MAX_PHASE - phase)) / MAX_PHASE
}

/// Side-to-move evaluation in centipawns, no terminal check. Used at search
/// leaves where the caller already knows the position is live.
pub fn static_eval(pos: &Position) -> i32 {
    evaluate_white(pos) * pos.side_to_move().sign()
}

/// Side-to-move evaluation of a non-terminal position.
pub fn evaluate_classical(pos: &Position) -> Result<Score, EvalError> {
    let result = pos.game_result();
    if result.is_terminal() {
        return Err(EvalError::Terminal(result));
    }
    Ok(Score::cp(static_eval(pos)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_parse_and_mirror() {
        let pst = piece_square_tables();
        assert_eq!(pst.mg[PieceKind::King.index()][Square::G1.index()], 30);
        assert_eq!(pst.eg[PieceKind::Pawn.index()][Square::A8.index() - 8], 80);
        assert!(parse_pst("pawn mg\n1 2 3").is_err());
        assert!(parse_pst("").is_err());
    }

    #[test]
    fn start_position_is_level() {
        let s = evaluate_classical(&Position::startpos()).unwrap();
        assert_eq!(s, Score::cp(0));
    }

    #[test]
    fn queen_up_is_winning() {
        let p = Position::from_fen("4k3/8/8/8/8/8/8/3QK3 w - - 0 1").unwrap();
        assert!(static_eval(&p) >= 800);
        let b = p.with_side_to_move(Color::Black);
        assert!(static_eval(&b) <= -800);
    }

    #[test]
    fn terminal_positions_are_rejected() {
        let mate = Position::from_fen("7k/6Q1/6K1/8/8/8/8/8 b - - 0 1").unwrap();
        assert!(matches!(evaluate_classical(&mate), Err(EvalError::Terminal(_))));
    }

    #[test]
    fn passed_pawn_masks() {
        let m = passed_mask(Color::White, Square::parse("a2").unwrap());
        assert_eq!(m.count(), 12);
        let m = passed_mask(Color::Black, Square::parse("e7").unwrap());
        assert_eq!(m.count(), 18);
    }
}
