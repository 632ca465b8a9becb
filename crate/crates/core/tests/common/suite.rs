use dualmind_core::board::{parse_epd, EpdOps};
use dualmind_core::Position;

pub const SUITE: &str = include_str!("../../data/suite.epd");

/// Suite entries with a mate distance of at most `max_dm`.
pub fn mate_suite(max_dm: u32) -> Vec<(Position, EpdOps)> {
    SUITE
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_epd(l).unwrap())
        .filter(|(_, ops)| ops.mate_distance.is_some_and(|d| d <= max_dm))
        .collect()
}
