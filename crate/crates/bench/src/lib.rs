//! Positions shared by the benchmarks.

use dualmind_core::Position;

pub const MIDDLEGAME: &str = "r1bq1rk1/pp2bppp/2n1pn2/3p4/2PP4/2N1PN2/PP1B1PPP/R2QKB1R w KQ - 0 9";
pub const KIWIPETE: &str = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1";
pub const PLASKETT_H8: &str = "7n/3P3k/n2K3p/2p5/1b4N1/2p1p1P1/8/3B4 w - - 0 1";

pub fn position(fen: &str) -> Position {
    Position::from_fen(fen).expect("benchmark FEN")
}
