//! Fixed-size transposition table, one entry per slot, replace-by-depth
//! within a search generation.

use crate::board::{Move, PieceKind, Square};

use super::MATE_BOUND;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact,
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtEntry {
    pub key: u64,
    pub depth: i32,
    /// Mate scores are relative to this node, not the root.
    pub score: i32,
    pub bound: Bound,
    pub best_move: Option<Move>,
}

pub const DEFAULT_TT_MIB: usize = 64;

pub struct TranspositionTable {
    // [key, packed data]; a zero key marks an empty slot
    slots: Vec<[u64; 2]>,
    mask: usize,
    generation: u8,
}

fn encode_move(m: Option<Move>) -> u64 {
    match m {
        None => 0,
        Some(m) => {
            let promo = m.promotion.map_or(0, |k| k.index() as u64);
            1 | (m.from.index() as u64) << 1 | (m.to.index() as u64) << 7 | promo << 13
        }
    }
}

fn decode_move(bits: u64) -> Option<Move> {
    if bits & 1 == 0 {
        return None;
    }
    let from = Square::new(((bits >> 1) & 63) as u8)?;
    let to = Square::new(((bits >> 7) & 63) as u8)?;
    let promotion = match (bits >> 13) & 7 {
        0 => None,
        k => Some(PieceKind::ALL[k as usize]),
    };
    Some(Move { from, to, promotion })
}

/// Converts a root-relative mate score to node-relative for storage.
pub fn score_to_tt(score: i32, ply: usize) -> i32 {
    if score > MATE_BOUND {
        score + ply as i32
    } else if score < -MATE_BOUND {
        score - ply as i32
    } else {
        score
    }
}

pub fn score_from_tt(score: i32, ply: usize) -> i32 {
    if score > MATE_BOUND {
        score - ply as i32
    } else if score < -MATE_BOUND {
        score + ply as i32
    } else {
        score
    }
}

impl TranspositionTable {
    /// A table of at most `mib` mebibytes, rounded down to a power of two
    /// number of slots.
    pub fn new(mib: usize) -> TranspositionTable {
        let bytes = mib.max(1) * 1024 * 1024;
        let slots = 1usize << (usize::BITS - 1 - (bytes / 16).leading_zeros());
        TranspositionTable { slots: vec![[0; 2]; slots], mask: slots - 1, generation: 0 }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = [0; 2]);
        self.generation = 0;
    }

    /// Marks entries from earlier searches as replaceable.
    pub fn new_search(&mut self) {
        self.generation = self.generation.wrapping_add(1);
    }

    pub fn probe(&self, key: u64) -> Option<TtEntry> {
        let [k, data] = self.slots[key as usize & self.mask];
        if k != key || k == 0 {
            return None;
        }
        let bound = match (data >> 56) & 3 {
            0 => Bound::Exact,
            1 => Bound::Lower,
            _ => Bound::Upper,
        };
        Some(TtEntry {
            key,
            depth: ((data >> 48) & 0xFF) as i32,
            score: (data >> 16) as u16 as i16 as i32,
            bound,
            best_move: decode_move(data & 0xFFFF),
        })
    }

    pub fn store(&mut self, key: u64, depth: i32, score: i32, bound: Bound, best_move: Option<Move>) {
        let slot = &mut self.slots[key as usize & self.mask];
        let [old_key, old] = *slot;
        let old_depth = ((old >> 48) & 0xFF) as i32;
        let old_gen = (old >> 58) as u8;
        let generation = self.generation & 0x3F;
        if old_key != 0 && old_key != key && old_gen == generation && old_depth > depth {
            return;
        }
        let best_move = best_move.or_else(|| if old_key == key { decode_move(old & 0xFFFF) } else { None });
        let bound_bits = match bound {
            Bound::Exact => 0u64,
            Bound::Lower => 1,
            Bound::Upper => 2,
        };
        let data = encode_move(best_move)
            | ((score as i16 as u16 as u64) << 16)
            | ((depth.clamp(0, 255) as u64) << 48)
            | (bound_bits << 56)
            | ((generation as u64) << 58);
        *slot = [key, data];
    }

    /// Permille of slots used by the current generation.
    pub fn hashfull(&self) -> u32 {
        let sample = self.slots.len().min(1000);
        let used = self.slots[..sample]
            .iter()
            .filter(|[k, d]| *k != 0 && (d >> 58) as u8 == (self.generation & 0x3F))
            .count();
        (used * 1000 / sample) as u32
    }
}
