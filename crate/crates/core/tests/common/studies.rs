//! Reference positions, lines and evaluation cells.

#![allow(dead_code)]

use dualmind_core::Score;

/// (position, move, score, win percentage)
pub const STOCKFISH_CELLS: [(u8, &str, Score, f64); 15] = [
    (1, "d8=Q", Score::Centipawns(-284), 16.3),
    (1, "d8=R", Score::Centipawns(-292), 15.7),
    (1, "Nxe3", Score::Centipawns(-316), 14.0),
    (1, "Bc2+", Score::Centipawns(-419), 8.23),
    (1, "Bb3", Score::Centipawns(-440), 7.36),
    (2, "Nf6+", Score::Centipawns(399), 90.9),
    (2, "Nxe3", Score::Centipawns(-316), 14.0),
    (2, "Bc2+", Score::Centipawns(-449), 7.01),
    (2, "d8=Q", Score::Centipawns(-488), 5.68),
    (2, "d8=R", Score::Centipawns(-488), 5.68),
    (3, "Nf6+", Score::MateIn(15), 100.0),
    (3, "Nxe3", Score::Centipawns(-297), 15.3),
    (3, "d8=Q", Score::Centipawns(-347), 11.9),
    (3, "d8=R", Score::Centipawns(-347), 11.9),
    (3, "Kc6", Score::Centipawns(-415), 8.40),
];

pub const LEELA_CELLS: [(u8, &str, Score, f64); 5] = [
    (4, "d8=R", Score::Centipawns(-467), 5.9),
    (4, "Kc6", Score::Centipawns(-501), 5.5),
    (4, "d8=Q", Score::Centipawns(-548), 5.0),
    (4, "Nf6+", Score::Centipawns(-560), 4.9),
    (4, "Bc2+", Score::Centipawns(-647), 4.2),
];

pub const PLASKETT: &str = "8/3P3k/n2K3p/2p3n1/1b4N1/2p1p1P1/8/3B4 w - - 0 1";
pub const CORRECTED_H8: &str = "7n/3P3k/n2K3p/2p5/1b4N1/2p1p1P1/8/3B4 w - - 0 1";
pub const CORRECTED_E5: &str = "8/3P3k/n2K3p/2p1n3/1b4N1/2p1p1P1/8/3B4 w - - 0 1";

pub const MAINLINE: &str = "1.Nf6+ Kg7 2.Nh5+ Kg6 3.Bc2+! Kxh5 4.d8=Q Nf7+ 5. Ke6 Nxd8+ 6.Kf5 e2 \
    7.Be4 e1=N! 8.Bd5! c2 9.Bc4 c1=N! 10.Bb5 Nc7 11.Ba4! Ne2 12.Bd1 Nf3 13.Bxe2 Nce6 14.Bxf3#";
