//! The `info` line of the UCI protocol, shared by the engine server and the
//! client that drives external engines.

use std::fmt;

use thiserror::Error;

use crate::board::Move;
use crate::eval::Score;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreBound {
    Exact,
    Lower,
    Upper,
}

/// The fields of an `info` line this crate models. Absent fields are
/// `None`; unknown tokens are skipped when parsing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InfoLine {
    pub depth: Option<u32>,
    pub seldepth: Option<u32>,
    pub multipv: Option<u32>,
    pub score: Option<Score>,
    pub bound: Option<ScoreBound>,
    pub nodes: Option<u64>,
    pub nps: Option<u64>,
    pub time_ms: Option<u64>,
    pub hashfull: Option<u32>,
    pub pv: Vec<Move>,
    pub string: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InfoError {
    #[error("not an info line")]
    NotInfo,
    #[error("field '{0}' has a missing or malformed value")]
    BadField(String),
}

fn value<T: std::str::FromStr>(tokens: &[&str], i: usize, name: &str) -> Result<T, InfoError> {
    tokens.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| InfoError::BadField(name.into()))
}

impl InfoLine {
    pub fn parse(line: &str) -> Result<InfoLine, InfoError> {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.first() != Some(&"info") {
            return Err(InfoError::NotInfo);
        }
        let mut info = InfoLine::default();
        let mut i = 1;
        while i < tokens.len() {
            match tokens[i] {
                "depth" => info.depth = Some(value(&tokens, i + 1, "depth")?),
                "seldepth" => info.seldepth = Some(value(&tokens, i + 1, "seldepth")?),
                "multipv" => info.multipv = Some(value(&tokens, i + 1, "multipv")?),
                "nodes" => info.nodes = Some(value(&tokens, i + 1, "nodes")?),
                "nps" => info.nps = Some(value(&tokens, i + 1, "nps")?),
                "time" => info.time_ms = Some(value(&tokens, i + 1, "time")?),
                "hashfull" => info.hashfull = Some(value(&tokens, i + 1, "hashfull")?),
                "score" => {
                    let n: i32 = value(&tokens, i + 2, "score")?;
                    info.score = Some(match tokens[i + 1] {
                        "cp" => Score::Centipawns(n),
                        "mate" if n != 0 => Score::MateIn(n),
                        _ => return Err(InfoError::BadField("score".into())),
                    });
                    i += 1;
                    info.bound = Some(match tokens.get(i + 2) {
                        Some(&"lowerbound") => {
                            i += 1;
                            ScoreBound::Lower
                        }
                        Some(&"upperbound") => {
                            i += 1;
                            ScoreBound::Upper
                        }
                        _ => ScoreBound::Exact,
                    });
                }
                "pv" => {
                    for t in &tokens[i + 1..] {
                        match Move::parse_uci_text(t) {
                            Some(m) => info.pv.push(m),
                            None => break,
                        }
                    }
                    i += info.pv.len();
                    i += 1;
                    continue;
                }
                "string" => {
                    info.string = Some(tokens[i + 1..].join(" "));
                    break;
                }
                _ => {
                    i += 1;
                    continue;
                }
            }
            i += 2;
        }
        Ok(info)
    }
}

impl fmt::Display for InfoLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "info")?;
        if let Some(d) = self.depth {
            write!(f, " depth {d}")?;
        }
        if let Some(d) = self.seldepth {
            write!(f, " seldepth {d}")?;
        }
        if let Some(k) = self.multipv {
            write!(f, " multipv {k}")?;
        }
        if let Some(s) = self.score {
            match s {
                Score::Centipawns(c) => write!(f, " score cp {c}")?,
                Score::MateIn(n) => write!(f, " score mate {n}")?,
            }
            match self.bound {
                Some(ScoreBound::Lower) => write!(f, " lowerbound")?,
                Some(ScoreBound::Upper) => write!(f, " upperbound")?,
                _ => {}
            }
        }
        if let Some(n) = self.nodes {
            write!(f, " nodes {n}")?;
        }
        if let Some(n) = self.nps {
            write!(f, " nps {n}")?;
        }
        if let Some(t) = self.time_ms {
            write!(f, " time {t}")?;
        }
        if let Some(h) = self.hashfull {
            write!(f, " hashfull {h}")?;
        }
        if !self.pv.is_empty() {
            write!(f, " pv")?;
            for m in &self.pv {
                write!(f, " {m}")?;
            }
        }
        if let Some(s) = &self.string {
            write!(f, " string {s}")?;
        }
        Ok(())
    }
}
