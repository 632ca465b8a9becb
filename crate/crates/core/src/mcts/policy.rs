//! The 8×8×73 move encoding: a plane per move shape, a square per origin.
//!
//! Planes 0..56 are queen-like moves, `direction * 7 + distance - 1` with
//! directions N, NE, E, SE, S, SW, W, NW. Planes 56..64 are knight jumps.
//! Planes 64..73 are underpromotions, `64 + lane * 3 + piece` where lane is
//! west capture, straight, east capture and piece is knight, bishop, rook.
//! Directions are absolute board directions; queen promotions use the
//! queen-like planes.

use crate::board::{Color, Move, PieceKind, Position, Square};

pub const POLICY_PLANES: usize = 73;
pub const POLICY_SIZE: usize = POLICY_PLANES * 64;

const QUEEN_DIRS: [(i8, i8); 8] = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)];
const KNIGHT_JUMPS: [(i8, i8); 8] = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];
const UNDERPROMOTIONS: [PieceKind; 3] = [PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PolicyIndex {
    pub plane: u8,
    pub square: Square,
}

impl PolicyIndex {
    pub fn flat(self) -> usize {
        self.plane as usize * 64 + self.square.index()
    }

    pub fn from_flat(i: usize) -> Option<PolicyIndex> {
        if i >= POLICY_SIZE {
            return None;
        }
        Some(PolicyIndex { plane: (i / 64) as u8, square: Square::new((i % 64) as u8)? })
    }
}

fn delta(m: Move) -> (i8, i8) {
    (
        m.to.file() as i8 - m.from.file() as i8,
        m.to.rank() as i8 - m.from.rank() as i8,
    )
}

/// Policy index of `m`; `None` only for moves no piece could make.
pub fn encode_move(m: Move) -> Option<PolicyIndex> {
    let (df, dr) = delta(m);
    let plane = match m.promotion {
        Some(kind) if kind != PieceKind::Queen => {
            let piece = UNDERPROMOTIONS.iter().position(|&k| k == kind)?;
            if dr.abs() != 1 || df.abs() > 1 {
                return None;
            }
            64 + (df + 1) as usize * 3 + piece
        }
        _ => {
            if let Some(k) = KNIGHT_JUMPS.iter().position(|&j| j == (df, dr)) {
                56 + k
            } else {
                let dist = df.abs().max(dr.abs());
                if dist == 0 || (df != 0 && dr != 0 && df.abs() != dr.abs()) {
                    return None;
                }
                let dir = QUEEN_DIRS.iter().position(|&d| d == (df.signum(), dr.signum()))?;
                dir * 7 + dist as usize - 1
            }
        }
    };
    Some(PolicyIndex { plane: plane as u8, square: m.from })
}

/// The move `idx` denotes in `pos`, if it is legal there.
pub fn decode_move(pos: &Position, idx: PolicyIndex) -> Option<Move> {
    let from = idx.square;
    let plane = idx.plane as usize;
    let (df, dr, promotion) = match plane {
        0..=55 => {
            let (f, r) = QUEEN_DIRS[plane / 7];
            let dist = (plane % 7 + 1) as i8;
            (f * dist, r * dist, None)
        }
        56..=63 => {
            let (f, r) = KNIGHT_JUMPS[plane - 56];
            (f, r, None)
        }
        64..=72 => {
            let lane = ((plane - 64) / 3) as i8 - 1;
            let forward = if pos.side_to_move() == Color::White { 1 } else { -1 };
            (lane, forward, Some(UNDERPROMOTIONS[(plane - 64) % 3]))
        }
        _ => return None,
    };
    let to = from.offset(df, dr)?;
    let pawn_to_last = promotion.is_none()
        && pos.piece_at(from).is_some_and(|p| p.kind == PieceKind::Pawn)
        && (to.rank() == 0 || to.rank() == 7);
    let m = Move { from, to, promotion: if pawn_to_last { Some(PieceKind::Queen) } else { promotion } };
    pos.is_legal(m).then_some(m)
}

/// Softmax of `raw` restricted to the encodings of `legal`, in the order of
/// `legal`.
pub fn mask_and_normalize(raw: &[f64], legal: &[Move]) -> Vec<f64> {
    let logits: Vec<f64> = legal
        .iter()
        .map(|&m| encode_move(m).map_or(f64::NEG_INFINITY, |i| raw[i.flat()]))
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return vec![1.0 / legal.len() as f64; legal.len()];
    }
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    #[test]
    fn double_pawn_push() {
        let p = Position::startpos();
        let i = encode_move(p.parse_uci("e2e4").unwrap()).unwrap();
        assert_eq!(i.plane, 1);
        assert_eq!(i.square, Square::parse("e2").unwrap());
        assert_eq!(decode_move(&p, i), p.parse_uci("e2e4").ok());
    }

    #[test]
    fn underpromotion_planes() {
        let p = pos("k7/3P4/8/8/8/8/8/4K3 w - - 0 1");
        let i = encode_move(p.parse_uci("d7d8n").unwrap()).unwrap();
        assert_eq!(i.plane, 64 + 3);
        assert_eq!(i.square, Square::parse("d7").unwrap());
        let q = encode_move(p.parse_uci("d7d8q").unwrap()).unwrap();
        assert_eq!(q.plane, 0);
        assert_eq!(decode_move(&p, q), p.parse_uci("d7d8q").ok());
        let b = pos("4k3/8/8/8/8/8/p7/1N2K3 b - - 0 1");
        let m = b.parse_uci("a2b1r").unwrap();
        let i = encode_move(m).unwrap();
        assert_eq!(i.plane, 64 + 2 * 3 + 2);
        assert_eq!(decode_move(&b, i), Some(m));
    }

    #[test]
    fn masking() {
        let p = Position::startpos();
        let legal = p.legal_moves();
        let uniform = mask_and_normalize(&vec![0.0; POLICY_SIZE], &legal);
        assert!(uniform.iter().all(|&x| (x - 0.05).abs() < 1e-12));
        let mut raw = vec![0.0; POLICY_SIZE];
        raw[PolicyIndex { plane: 0, square: Square::parse("e4").unwrap() }.flat()] = 1e9;
        let probs = mask_and_normalize(&raw, &legal);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(probs.iter().all(|&x| (x - 0.05).abs() < 1e-12));
    }
}
