//! Inference for a small HalfKP network with an incrementally updated first
//! layer.
//!
//! Features are (own king square, non-king piece, piece square) triples seen
//! from one side: `ksq * 640 + piece * 64 + sq`, where `piece` is
//! `kind * 2 + (piece is the opponent's)` and Black's squares are mirrored
//! vertically so both sides see the board from their own first rank.
//!
//! Fixed-point scheme:
//! - accumulator: i16, feature-transform weights and bias i16
//! - clipped ReLU to `0..=127` on every activation
//! - hidden weights i8, biases i32, each hidden sum shifted right by 6
//! - output divided by 16 to give centipawns for the side to move
//!
//! Weight file (little endian): `b"DMND"`, u32 version, u32 dims
//! `[features, accumulator, hidden1, hidden2]`, then ft bias, ft weights
//! (feature-major), l1 bias, l1 weights (output-major), l2 bias, l2 weights,
//! output bias, output weights, and a trailing u64 FNV-1a hash of every
//! preceding byte.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Score;
use crate::board::{Color, Move, Piece, PieceKind, Position, Square};

pub const NNUE_MAGIC: [u8; 4] = *b"DMND";
pub const NNUE_VERSION: u32 = 1;
pub const HALFKP_FEATURES: usize = 64 * 10 * 64;

const HEADER_BYTES: usize = 4 + 4 + 16;
const CHECKSUM_BYTES: usize = 8;
const ACTIVATION_MAX: i32 = 127;
const HIDDEN_SHIFT: u32 = 6;
const OUTPUT_DIVISOR: i32 = 16;
const MAX_ACCUMULATOR: usize = 2048;
const MAX_HIDDEN: usize = 512;
const EVAL_LIMIT: i32 = 30_000;

#[derive(Debug, Error)]
pub enum NnueError {
    #[error("bad magic {0:?}, expected \"DMND\"")]
    BadMagic([u8; 4]),
    #[error("unsupported weight file version {0}")]
    UnsupportedVersion(u32),
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("weight file is {actual} bytes, expected {expected}")]
    Size { expected: usize, actual: usize },
    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NnueDims {
    pub features: usize,
    pub accumulator: usize,
    pub hidden1: usize,
    pub hidden2: usize,
}

impl NnueDims {
    pub const DEFAULT: NnueDims =
        NnueDims { features: HALFKP_FEATURES, accumulator: 256, hidden1: 32, hidden2: 32 };

    pub fn validate(&self) -> Result<(), NnueError> {
        if self.features != HALFKP_FEATURES {
            return Err(NnueError::BadDimensions(format!(
                "{} input features, expected {HALFKP_FEATURES}",
                self.features
            )));
        }
        if !(1..=MAX_ACCUMULATOR).contains(&self.accumulator) {
            return Err(NnueError::BadDimensions(format!("accumulator width {}", self.accumulator)));
        }
        for (name, n) in [("hidden1", self.hidden1), ("hidden2", self.hidden2)] {
            if !(1..=MAX_HIDDEN).contains(&n) {
                return Err(NnueError::BadDimensions(format!("{name} width {n}")));
            }
        }
        Ok(())
    }

    /// Total file size, header and checksum included.
    pub fn file_size(&self) -> usize {
        let a = self.accumulator;
        HEADER_BYTES
            + 2 * a
            + 2 * self.features * a
            + 4 * self.hidden1
            + self.hidden1 * 2 * a
            + 4 * self.hidden2
            + self.hidden2 * self.hidden1
            + 4
            + self.hidden2
            + CHECKSUM_BYTES
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnueNetwork {
    dims: NnueDims,
    ft_bias: Vec<i16>,
    ft_weights: Vec<i16>,
    l1_bias: Vec<i32>,
    l1_weights: Vec<i8>,
    l2_bias: Vec<i32>,
    l2_weights: Vec<i8>,
    out_bias: i32,
    out_weights: Vec<i8>,
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out = self.bytes[self.at..self.at + N].try_into().unwrap();
        self.at += N;
        out
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    fn i32s(&mut self, n: usize) -> Vec<i32> {
        (0..n).map(|_| i32::from_le_bytes(self.take())).collect()
    }

    fn i16s(&mut self, n: usize) -> Vec<i16> {
        (0..n).map(|_| i16::from_le_bytes(self.take())).collect()
    }

    fn i8s(&mut self, n: usize) -> Vec<i8> {
        (0..n).map(|_| self.take::<1>()[0] as i8).collect()
    }
}

/// Parses and validates a weight file.
pub fn load_nnue(bytes: &[u8]) -> Result<NnueNetwork, NnueError> {
    if bytes.len() < HEADER_BYTES + CHECKSUM_BYTES {
        return Err(NnueError::Size { expected: HEADER_BYTES + CHECKSUM_BYTES, actual: bytes.len() });
    }
    let mut r = Reader { bytes, at: 0 };
    let magic = r.take::<4>();
    if magic != NNUE_MAGIC {
        return Err(NnueError::BadMagic(magic));
    }
    let version = r.u32();
    if version != NNUE_VERSION {
        return Err(NnueError::UnsupportedVersion(version));
    }
    let dims = NnueDims {
        features: r.u32() as usize,
        accumulator: r.u32() as usize,
        hidden1: r.u32() as usize,
        hidden2: r.u32() as usize,
    };
    dims.validate()?;
    let expected = dims.file_size();
    if bytes.len() != expected {
        return Err(NnueError::Size { expected, actual: bytes.len() });
    }
    let body = expected - CHECKSUM_BYTES;
    let stored = u64::from_le_bytes(bytes[body..].try_into().unwrap());
    let computed = fnv1a64(&bytes[..body]);
    if stored != computed {
        return Err(NnueError::Checksum { stored, computed });
    }
    let a = dims.accumulator;
    Ok(NnueNetwork {
        dims,
        ft_bias: r.i16s(a),
        ft_weights: r.i16s(dims.features * a),
        l1_bias: r.i32s(dims.hidden1),
        l1_weights: r.i8s(dims.hidden1 * 2 * a),
        l2_bias: r.i32s(dims.hidden2),
        l2_weights: r.i8s(dims.hidden2 * dims.hidden1),
        out_bias: r.i32s(1)[0],
        out_weights: r.i8s(dims.hidden2),
    })
}

impl NnueNetwork {
    /// A network whose every weight and bias is zero.
    pub fn zeroed(dims: NnueDims) -> Result<NnueNetwork, NnueError> {
        dims.validate()?;
        let a = dims.accumulator;
        Ok(NnueNetwork {
            dims,
            ft_bias: vec![0; a],
            ft_weights: vec![0; dims.features * a],
            l1_bias: vec![0; dims.hidden1],
            l1_weights: vec![0; dims.hidden1 * 2 * a],
            l2_bias: vec![0; dims.hidden2],
            l2_weights: vec![0; dims.hidden2 * dims.hidden1],
            out_bias: 0,
            out_weights: vec![0; dims.hidden2],
        })
    }

    /// Seeded random weights, small enough that no i16 accumulator can
    /// overflow and hidden activations stay mostly unsaturated.
    pub fn random(seed: u64, dims: NnueDims) -> Result<NnueNetwork, NnueError> {
        let mut net = NnueNetwork::zeroed(dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        net.ft_bias.iter_mut().for_each(|w| *w = rng.gen_range(-32..=32));
        net.ft_weights.iter_mut().for_each(|w| *w = rng.gen_range(-24..=24));
        net.l1_bias.iter_mut().for_each(|w| *w = rng.gen_range(-64..=64));
        net.l1_weights.iter_mut().for_each(|w| *w = rng.gen_range(-8..=8));
        net.l2_bias.iter_mut().for_each(|w| *w = rng.gen_range(-64..=64));
        net.l2_weights.iter_mut().for_each(|w| *w = rng.gen_range(-16..=16));
        net.out_bias = rng.gen_range(-64..=64);
        net.out_weights.iter_mut().for_each(|w| *w = rng.gen_range(-64..=64));
        Ok(net)
    }

    pub fn dims(&self) -> NnueDims {
        self.dims
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.dims.file_size());
        out.extend_from_slice(&NNUE_MAGIC);
        out.extend_from_slice(&NNUE_VERSION.to_le_bytes());
        for d in [self.dims.features, self.dims.accumulator, self.dims.hidden1, self.dims.hidden2] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        self.ft_bias.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        self.ft_weights.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        self.l1_bias.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        out.extend(self.l1_weights.iter().map(|&v| v as u8));
        self.l2_bias.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        out.extend(self.l2_weights.iter().map(|&v| v as u8));
        out.extend_from_slice(&self.out_bias.to_le_bytes());
        out.extend(self.out_weights.iter().map(|&v| v as u8));
        let sum = fnv1a64(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        out
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<NnueNetwork, NnueError> {
        load_nnue(&std::fs::read(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), NnueError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    fn column(&self, feature: usize) -> &[i16] {
        let a = self.dims.accumulator;
        &self.ft_weights[feature * a..(feature + 1) * a]
    }
}

/// Index of the feature for `piece` on `sq`, seen by `perspective` whose king
/// stands on `king`. `None` for kings.
pub fn feature_index(perspective: Color, king: Square, piece: Piece, sq: Square) -> Option<usize> {
    if piece.kind == PieceKind::King {
        return None;
    }
    let orient = |s: Square| match perspective {
        Color::White => s.index(),
        Color::Black => s.flip_rank().index(),
    };
    let piece_index = piece.kind.index() * 2 + usize::from(piece.color != perspective);
    Some(orient(king) * 640 + piece_index * 64 + orient(sq))
}

/// Active features of `pos` from one side's point of view.
pub fn active_features(pos: &Position, perspective: Color) -> Vec<usize> {
    let king = pos.king_square(perspective);
    pos.piece_squares()
        .filter_map(|(sq, piece)| feature_index(perspective, king, piece, sq))
        .collect()
}

/// First-layer sums for both perspectives, indexed by [`Color::index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnueAccumulator {
    values: [Vec<i16>; 2],
}

impl NnueAccumulator {
    pub fn perspective(&self, color: Color) -> &[i16] {
        &self.values[color.index()]
    }
}

/// Column updates made by one incremental step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NnueUpdate {
    /// Added plus removed columns, per perspective.
    pub columns: [usize; 2],
    /// Whether the perspective was rebuilt from scratch (own king moved).
    pub refreshed: [bool; 2],
}

fn add_column(acc: &mut [i16], col: &[i16]) {
    acc.iter_mut().zip(col).for_each(|(a, &w)| *a = a.wrapping_add(w));
}

fn sub_column(acc: &mut [i16], col: &[i16]) {
    acc.iter_mut().zip(col).for_each(|(a, &w)| *a = a.wrapping_sub(w));
}

fn refresh_side(pos: &Position, net: &NnueNetwork, perspective: Color) -> Vec<i16> {
    let mut acc = net.ft_bias.clone();
    for f in active_features(pos, perspective) {
        add_column(&mut acc, net.column(f));
    }
    acc
}

/// Accumulator built from scratch.
pub fn nnue_refresh(pos: &Position, net: &NnueNetwork) -> NnueAccumulator {
    NnueAccumulator {
        values: [refresh_side(pos, net, Color::White), refresh_side(pos, net, Color::Black)],
    }
}

/// Updates `acc` (valid for `pos`) to the position after the legal move `m`.
pub fn nnue_apply_in_place(
    acc: &mut NnueAccumulator,
    pos: &Position,
    m: Move,
    net: &NnueNetwork,
) -> NnueUpdate {
    let mover = pos.piece_at(m.from).expect("move starts on a piece");
    let us = mover.color;
    let mut removed: Vec<(Piece, Square)> = Vec::with_capacity(3);
    let mut added: Vec<(Piece, Square)> = Vec::with_capacity(2);

    removed.push((mover, m.from));
    let landed = m.promotion.map_or(mover, |k| Piece::new(us, k));
    added.push((landed, m.to));
    if pos.is_en_passant(m) {
        let victim = Square::from_coords(m.to.file(), m.from.rank()).unwrap();
        removed.push((Piece::new(!us, PieceKind::Pawn), victim));
    } else if let Some(captured) = pos.piece_at(m.to) {
        removed.push((captured, m.to));
    }
    if mover.kind == PieceKind::King && m.from.file().abs_diff(m.to.file()) == 2 {
        let rank = m.from.rank();
        let (rf, rt) = if m.to.file() == 6 { (7, 5) } else { (0, 3) };
        let rook = Piece::new(us, PieceKind::Rook);
        removed.push((rook, Square::from_coords(rf, rank).unwrap()));
        added.push((rook, Square::from_coords(rt, rank).unwrap()));
    }

    let mut update = NnueUpdate::default();
    let next = (mover.kind == PieceKind::King).then(|| pos.play_unchecked(m));
    for side in Color::ALL {
        if side == us {
            if let Some(next) = &next {
                acc.values[side.index()] = refresh_side(next, net, side);
                update.refreshed[side.index()] = true;
                continue;
            }
        }
        let king = pos.king_square(side);
        let values = &mut acc.values[side.index()];
        for &(piece, sq) in &removed {
            if let Some(f) = feature_index(side, king, piece, sq) {
                sub_column(values, net.column(f));
                update.columns[side.index()] += 1;
            }
        }
        for &(piece, sq) in &added {
            if let Some(f) = feature_index(side, king, piece, sq) {
                add_column(values, net.column(f));
                update.columns[side.index()] += 1;
            }
        }
    }
    update
}

/// Accumulator after `m`, with the column updates it took.
pub fn nnue_apply_counted(
    acc: &NnueAccumulator,
    pos: &Position,
    m: Move,
    net: &NnueNetwork,
) -> (NnueAccumulator, NnueUpdate) {
    let mut next = acc.clone();
    let update = nnue_apply_in_place(&mut next, pos, m, net);
    (next, update)
}

pub fn nnue_apply(acc: &NnueAccumulator, pos: &Position, m: Move, net: &NnueNetwork) -> NnueAccumulator {
    nnue_apply_counted(acc, pos, m, net).0
}

fn clipped(v: i32) -> i32 {
    v.clamp(0, ACTIVATION_MAX)
}

fn dense(input: &[i32], weights: &[i8], bias: &[i32]) -> Vec<i32> {
    let n = input.len();
    bias.iter()
        .enumerate()
        .map(|(j, &b)| {
            let row = &weights[j * n..(j + 1) * n];
            let sum = row.iter().zip(input).fold(b, |s, (&w, &x)| s + w as i32 * x);
            clipped(sum >> HIDDEN_SHIFT)
        })
        .collect()
}

/// Network output for `stm`. The side to move's half of the accumulator is
/// fed first, so swapping `stm` evaluates the other side's view of the same
/// board; for a trained network that is roughly the negation, for random
/// weights it is unrelated.
pub fn nnue_evaluate(acc: &NnueAccumulator, net: &NnueNetwork, stm: Color) -> Score {
    let input: Vec<i32> = acc.values[stm.index()]
        .iter()
        .chain(acc.values[(!stm).index()].iter())
        .map(|&v| clipped(v as i32))
        .collect();
    let h1 = dense(&input, &net.l1_weights, &net.l1_bias);
    let h2 = dense(&h1, &net.l2_weights, &net.l2_bias);
    let out = net
        .out_weights
        .iter()
        .zip(&h2)
        .fold(net.out_bias, |s, (&w, &x)| s + w as i32 * x);
    Score::cp((out / OUTPUT_DIVISOR).clamp(-EVAL_LIMIT, EVAL_LIMIT))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: NnueDims = NnueDims { features: HALFKP_FEATURES, accumulator: 8, hidden1: 4, hidden2: 4 };

    #[test]
    fn worked_feature_example() {
        // Black king g8 with Black queen d8: from Black's side both mirror to rank 1
        let pos = Position::from_fen("3q2k1/8/8/8/8/8/8/4K3 w - - 0 1").unwrap();
        let f = feature_index(Color::Black, Square::G8, Piece::new(Color::Black, PieceKind::Queen), Square::D8);
        assert_eq!(f, Some(Square::G1.index() * 640 + 8 * 64 + Square::D1.index()));
        assert!(active_features(&pos, Color::Black).contains(&f.unwrap()));
        let moved = Position::from_fen("4q1k1/8/8/8/8/8/8/4K3 w - - 0 1").unwrap();
        assert!(!active_features(&moved, Color::Black).contains(&f.unwrap()));
    }

    #[test]
    fn no_queen_features_without_queens() {
        let pos = Position::from_fen("4k3/pppp4/8/8/8/8/4PPPP/RNB1K3 w - - 0 1").unwrap();
        for side in Color::ALL {
            for f in active_features(&pos, side) {
                assert!(!(8..10).contains(&((f % 640) / 64)));
            }
        }
    }

    #[test]
    fn round_trip_and_errors() {
        let net = NnueNetwork::random(7, SMALL).unwrap();
        let bytes = net.to_bytes();
        assert_eq!(bytes.len(), SMALL.file_size());
        assert_eq!(load_nnue(&bytes).unwrap(), net);

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(load_nnue(&bad), Err(NnueError::BadMagic(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(load_nnue(&bad), Err(NnueError::UnsupportedVersion(9))));
        let mut bad = bytes.clone();
        bad[8] = 1;
        assert!(matches!(load_nnue(&bad), Err(NnueError::BadDimensions(_))));
        assert!(matches!(load_nnue(&bytes[..bytes.len() - 1]), Err(NnueError::Size { .. })));
        assert!(matches!(load_nnue(&bytes[..10]), Err(NnueError::Size { .. })));
        let mut bad = bytes.clone();
        bad[HEADER_BYTES + 3] ^= 1;
        assert!(matches!(load_nnue(&bad), Err(NnueError::Checksum { .. })));
    }

    #[test]
    fn zero_network_scores_zero() {
        let net = load_nnue(&NnueNetwork::zeroed(SMALL).unwrap().to_bytes()).unwrap();
        for fen in [crate::board::START_FEN, "4k3/8/8/8/8/8/8/3QK3 b - - 0 1"] {
            let pos = Position::from_fen(fen).unwrap();
            let acc = nnue_refresh(&pos, &net);
            assert_eq!(nnue_evaluate(&acc, &net, pos.side_to_move()), Score::cp(0));
        }
    }

    #[test]
    fn update_counts() {
        let net = NnueNetwork::random(1, SMALL).unwrap();
        let check = |fen: &str, uci: &str, cols: [usize; 2], refreshed: [bool; 2]| {
            let pos = Position::from_fen(fen).unwrap();
            let m = pos.parse_uci(uci).unwrap();
            let (acc, upd) = nnue_apply_counted(&nnue_refresh(&pos, &net), &pos, m, &net);
            assert_eq!(acc, nnue_refresh(&pos.play_unchecked(m), &net), "{fen} {uci}");
            assert_eq!(upd.columns, cols, "{fen} {uci}");
            assert_eq!(upd.refreshed, refreshed, "{fen} {uci}");
        };
        check(crate::board::START_FEN, "e2e4", [2, 2], [false, false]);
        check("4k3/8/8/3p4/4P3/8/8/4K3 w - - 0 1", "e4d5", [3, 3], [false, false]);
        check("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2", "e5d6", [3, 3], [false, false]);
        check("k7/3P4/8/8/8/8/8/4K3 w - - 0 1", "d7d8n", [2, 2], [false, false]);
        check("r3k3/8/8/8/8/8/8/4K2R w Kq - 0 1", "e1g1", [0, 2], [true, false]);
        check("r3k3/8/8/8/8/8/8/4K2R b Kq - 0 1", "e8c8", [2, 0], [false, true]);
        check("4k3/8/8/8/8/8/8/4K3 w - - 0 1", "e1d2", [0, 0], [true, false]);
    }
}
