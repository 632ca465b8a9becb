//! Zobrist keys.
//!
//! Keys come from SplitMix64 seeded with [`ZOBRIST_SEED`] and are built at
//! compile time, so hashes are identical across builds and platforms.
//! Draw order: 12 x 64 piece-square keys (piece index major), side to move,
//! 16 castling-right combinations, 8 en-passant files.

use super::types::{Color, Piece, Square};

pub const ZOBRIST_SEED: u64 = 0x4455_414C_4D49_4E44; // "DUALMIND"

const fn splitmix64(state: u64) -> (u64, u64) {
    let state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (state, z ^ (z >> 31))
}

pub(crate) struct Keys {
    pub pieces: [[u64; 64]; 12],
    pub side: u64,
    pub castling: [u64; 16],
    pub en_passant: [u64; 8],
}

const fn build() -> Keys {
    let mut keys = Keys { pieces: [[0; 64]; 12], side: 0, castling: [0; 16], en_passant: [0; 8] };
    let mut state = ZOBRIST_SEED;
    let mut p = 0;
    while p < 12 {
        let mut sq = 0;
        while sq < 64 {
            let (s, v) = splitmix64(state);
            state = s;
            keys.pieces[p][sq] = v;
            sq += 1;
        }
        p += 1;
    }
    let (s, v) = splitmix64(state);
    state = s;
    keys.side = v;
    let mut i = 0;
    while i < 16 {
        let (s, v) = splitmix64(state);
        state = s;
        keys.castling[i] = v;
        i += 1;
    }
    let mut f = 0;
    while f < 8 {
        let (s, v) = splitmix64(state);
        state = s;
        keys.en_passant[f] = v;
        f += 1;
    }
    keys
}

pub(crate) static KEYS: Keys = build();

#[inline]
pub(crate) fn piece_key(piece: Piece, sq: Square) -> u64 {
    KEYS.pieces[piece.index()][sq.index()]
}

#[inline]
pub(crate) fn side_key(color: Color) -> u64 {
    match color {
        Color::White => 0,
        Color::Black => KEYS.side,
    }
}

#[inline]
pub(crate) fn castling_key(rights: u8) -> u64 {
    KEYS.castling[rights as usize & 15]
}

#[inline]
pub(crate) fn en_passant_key(sq: Option<Square>) -> u64 {
    match sq {
        Some(sq) => KEYS.en_passant[sq.file() as usize],
        None => 0,
    }
}
