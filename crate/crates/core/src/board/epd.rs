//! Extended Position Description: four FEN fields followed by
//! semicolon-terminated opcodes (`bm Nf6+; dm 15; id "name";`).

use std::collections::BTreeMap;

use super::position::Position;
use super::types::Move;
use super::BoardError;

/// Opcodes of one EPD record. `bm`, `dm` and `id` are decoded; everything
/// else is kept verbatim in `other`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpdOps {
    pub best_moves: Vec<Move>,
    /// Mate distance in full moves.
    pub mate_distance: Option<u32>,
    pub id: Option<String>,
    pub other: BTreeMap<String, String>,
}

impl EpdOps {
    pub fn is_empty(&self) -> bool {
        self.best_moves.is_empty() && self.mate_distance.is_none() && self.id.is_none() && self.other.is_empty()
    }
}

/// Splits `rest` into opcode statements, honoring double-quoted strings.
fn split_statements(rest: &str) -> Result<Vec<String>, BoardError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for c in rest.chars() {
        match c {
            '"' => {
                in_quotes = !in_quotes;
                current.push(c);
            }
            ';' if !in_quotes => {
                out.push(std::mem::take(&mut current));
            }
            _ => current.push(c),
        }
    }
    if in_quotes {
        return Err(BoardError::Epd("unterminated string".into()));
    }
    if !current.trim().is_empty() {
        return Err(BoardError::Epd(format!("opcode '{}' is missing its ';'", current.trim())));
    }
    Ok(out)
}

fn unquote(operand: &str) -> String {
    let t = operand.trim();
    t.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(t).to_string()
}

/// Parses one EPD line.
pub fn parse_epd(line: &str) -> Result<(Position, EpdOps), BoardError> {
    let line = line.trim();
    let mut fields = Vec::with_capacity(4);
    let mut rest = line;
    for _ in 0..4 {
        rest = rest.trim_start();
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if end == 0 {
            return Err(BoardError::FenFieldCount(fields.len()));
        }
        fields.push(&rest[..end]);
        rest = &rest[end..];
    }
    let position = Position::from_fen_fields(&fields)?;

    let mut ops = EpdOps::default();
    for statement in split_statements(rest)? {
        let statement = statement.trim();
        if statement.is_empty() {
            return Err(BoardError::Epd("empty opcode".into()));
        }
        let (opcode, operand) = match statement.find(char::is_whitespace) {
            Some(i) => (&statement[..i], statement[i..].trim()),
            None => (statement, ""),
        };
        if !opcode.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            || !opcode.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(BoardError::Epd(format!("bad opcode name '{opcode}'")));
        }
        match opcode {
            "bm" => {
                if operand.is_empty() {
                    return Err(BoardError::Epd("bm without moves".into()));
                }
                for token in operand.split_whitespace() {
                    ops.best_moves.push(position.parse_san(token)?);
                }
            }
            "dm" => {
                let n = operand
                    .parse::<u32>()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| BoardError::Epd(format!("dm '{operand}' is not a positive integer")))?;
                ops.mate_distance = Some(n);
            }
            "id" => ops.id = Some(unquote(operand)),
            _ => {
                ops.other.insert(opcode.to_string(), operand.to_string());
            }
        }
    }
    Ok((position, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Square;

    #[test]
    fn corrected_plaskett_record() {
        let line = r#"7n/3P3k/n2K3p/2p5/1b4N1/2p1p1P1/8/3B4 w - - bm Nf6+; dm 15; id "plaskett-corrected";"#;
        let (pos, ops) = parse_epd(line).unwrap();
        assert_eq!(pos.to_fen(), "7n/3P3k/n2K3p/2p5/1b4N1/2p1p1P1/8/3B4 w - - 0 1");
        assert_eq!(
            ops.best_moves,
            vec![Move::new(Square::parse("g4").unwrap(), Square::parse("f6").unwrap())]
        );
        assert_eq!(ops.mate_distance, Some(15));
        assert_eq!(ops.id.as_deref(), Some("plaskett-corrected"));
    }

    #[test]
    fn bare_position() {
        let (_, ops) = parse_epd("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq -").unwrap();
        assert!(ops.is_empty());
    }

    #[test]
    fn multi_move_bm_and_unknown_opcodes() {
        let line = r#"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - id "x"; bm e4 d4; c0 "a; b"; acd 12;"#;
        let (_, ops) = parse_epd(line).unwrap();
        assert_eq!(ops.best_moves.len(), 2);
        assert_eq!(ops.other.get("c0").map(String::as_str), Some("\"a; b\""));
        assert_eq!(ops.other.get("acd").map(String::as_str), Some("12"));
    }

    #[test]
    fn malformed_opcodes() {
        let start = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq -";
        for bad in [" bm e4", " id \"x;", " dm 0;", " dm x;", " 9z 1;", " ;", " bm;"] {
            let err = parse_epd(&format!("{start}{bad}")).unwrap_err();
            assert!(matches!(err, BoardError::Epd(_)), "{bad}: {err:?}");
        }
        assert!(matches!(
            parse_epd(&format!("{start} bm e5;")),
            Err(BoardError::SanNoMatch(_))
        ));
        assert!(matches!(parse_epd("8/8/8 w"), Err(BoardError::FenFieldCount(_))));
    }
}
