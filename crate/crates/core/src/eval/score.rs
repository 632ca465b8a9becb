use std::cmp::Ordering;
use std::fmt;

/// Largest centipawn magnitude a [`Score`] may carry.
pub const MAX_CENTIPAWNS: i32 = 32_000;

/// An evaluation from the side to move's perspective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Score {
    Centipawns(i32),
    /// Full-move distance to mate; positive when the side to move mates.
    MateIn(i32),
}

impl Score {
    pub fn cp(value: i32) -> Score {
        debug_assert!(value.abs() <= MAX_CENTIPAWNS);
        Score::Centipawns(value.clamp(-MAX_CENTIPAWNS, MAX_CENTIPAWNS))
    }

    pub fn mate_in(moves: i32) -> Score {
        assert_ne!(moves, 0, "mate distance is never zero");
        Score::MateIn(moves)
    }

    pub fn is_mate(self) -> bool {
        matches!(self, Score::MateIn(_))
    }

    /// Pawn units for centipawn scores; `None` for mate scores.
    pub fn pawns(self) -> Option<f64> {
        match self {
            Score::Centipawns(c) => Some(c as f64 / 100.0),
            Score::MateIn(_) => None,
        }
    }

    /// The same score seen by the other side.
    pub fn negate(self) -> Score {
        match self {
            Score::Centipawns(c) => Score::Centipawns(-c),
            Score::MateIn(n) => Score::MateIn(-n),
        }
    }

    /// Total order key: being mated sooner is worst, mating sooner is best.
    fn rank(self) -> (i32, i32) {
        match self {
            Score::MateIn(n) if n < 0 => (-1, -n),
            Score::Centipawns(c) => (0, c),
            Score::MateIn(n) => (1, -n),
        }
    }

    /// Display in pawns (`+3.99`, `-2.84`) or mate notation (`#15`, `#-3`).
    pub fn display_pawns(self) -> String {
        self.to_string()
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Score::Centipawns(c) => {
                let sign = if c < 0 { "-" } else { "+" };
                write!(f, "{sign}{}.{:02}", c.abs() / 100, c.abs() % 100)
            }
            Score::MateIn(n) => write!(f, "#{n}"),
        }
    }
}

/// Centipawns to win probability with the base-10 logistic over 400 cp:
/// `1 / (1 + 10^(-cp/400))`. Mate scores map to 1 or 0.
pub fn cp_to_winprob(score: Score) -> f64 {
    WinProbModel::Logistic400.win_probability(score)
}

/// Inverse of [`cp_to_winprob`] for probabilities strictly inside (0, 1).
pub fn winprob_to_cp(p: f64) -> f64 {
    let p = p.clamp(1e-9, 1.0 - 1e-9);
    -400.0 * (1.0 / p - 1.0).log10()
}

/// The constant in Lc0's value-to-centipawn display mapping.
pub const LC0_TAN_SCALE: f64 = 1.563_754_189_7;

/// Lc0 display: centipawns from a value `q` in [-1, 1].
pub fn lc0_q_to_cp(q: f64) -> f64 {
    90.0 * (LC0_TAN_SCALE * q.clamp(-1.0, 1.0)).tan()
}

/// Lc0 display inverse: value in [-1, 1] from centipawns.
pub fn lc0_cp_to_q(cp: f64) -> f64 {
    (cp / 90.0).atan() / LC0_TAN_SCALE
}

/// How an engine family turns its score into a displayed win probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WinProbModel {
    /// Alpha-beta engines: logistic in centipawns, base 10, scale 400.
    Logistic400,
    /// Lc0-style engines: `q = atan(cp/90)/1.5637541897`, probability `(q+1)/2`.
    Lc0,
}

impl WinProbModel {
    pub fn win_probability(self, score: Score) -> f64 {
        match score {
            Score::MateIn(n) => {
                if n > 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Score::Centipawns(c) => self.cp_win_probability(c as f64),
        }
    }

    pub fn cp_win_probability(self, cp: f64) -> f64 {
        match self {
            WinProbModel::Logistic400 => 1.0 / (1.0 + 10f64.powf(-cp / 400.0)),
            WinProbModel::Lc0 => (lc0_cp_to_q(cp) + 1.0) / 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_reference_points() {
        assert!((cp_to_winprob(Score::cp(-284)) - 0.163).abs() < 5e-4);
        assert!((cp_to_winprob(Score::cp(399)) - 0.909).abs() < 5e-4);
        assert_eq!(cp_to_winprob(Score::cp(0)), 0.5);
        assert_eq!(cp_to_winprob(Score::mate_in(15)), 1.0);
        assert_eq!(cp_to_winprob(Score::mate_in(-2)), 0.0);
    }

    #[test]
    fn inverse_logistic() {
        for cp in [-900, -284, 0, 17, 399, 1500] {
            let p = cp_to_winprob(Score::cp(cp));
            assert!((winprob_to_cp(p) - cp as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn lc0_mapping_round_trips() {
        for q in [-0.9, -0.3, 0.0, 0.5, 0.95] {
            assert!((lc0_cp_to_q(lc0_q_to_cp(q)) - q).abs() < 1e-12);
        }
        assert!((WinProbModel::Lc0.cp_win_probability(-560.0) - 0.049).abs() < 5e-4);
    }

    #[test]
    fn ordering() {
        let mut v = vec![
            Score::mate_in(3),
            Score::cp(50),
            Score::mate_in(-1),
            Score::mate_in(1),
            Score::cp(-20),
            Score::mate_in(-6),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                Score::mate_in(-1),
                Score::mate_in(-6),
                Score::cp(-20),
                Score::cp(50),
                Score::mate_in(3),
                Score::mate_in(1)
            ]
        );
    }

    #[test]
    fn display() {
        assert_eq!(Score::cp(-284).to_string(), "-2.84");
        assert_eq!(Score::cp(399).to_string(), "+3.99");
        assert_eq!(Score::cp(-5).to_string(), "-0.05");
        assert_eq!(Score::mate_in(15).to_string(), "#15");
        assert_eq!(Score::mate_in(-3).to_string(), "#-3");
    }
}
