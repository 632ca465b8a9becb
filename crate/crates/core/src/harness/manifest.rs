//! Engine manifests.
//!
//! ```text
//! # internal engines
//! ab = internal:ab
//! option MultiPV=5
//! lc = internal:mcts
//! option Simulations=20000
//! sf = /usr/local/bin/stockfish
//! workdir /tmp/sf
//! family ab
//! option Hash=256
//! me = target/release/dualmind
//! args serve-uci --engine mcts
//! family mcts
//! ```
//!
//! `option`, `args`, `workdir` and `family` lines apply to the engine declared
//! above them.

use std::path::PathBuf;

use super::{EngineFamily, HarnessError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Internal(String),
    External(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineSpec {
    pub id: String,
    pub kind: EngineKind,
    pub options: Vec<(String, String)>,
    /// Command-line arguments for an external engine.
    pub args: Vec<String>,
    pub workdir: Option<PathBuf>,
    pub family: EngineFamily,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub engines: Vec<EngineSpec>,
}

impl Manifest {
    pub fn get(&self, id: &str) -> Option<&EngineSpec> {
        self.engines.iter().find(|e| e.id == id)
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest, HarnessError> {
    let mut engines: Vec<EngineSpec> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| HarnessError::Manifest { line: i + 1, msg: msg.to_string() };
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match word {
            "option" | "args" | "workdir" | "family" if !rest.starts_with('=') => {
                let engine = engines.last_mut().ok_or_else(|| bad("directive before any engine"))?;
                match word {
                    "option" => {
                        let (name, value) = rest.split_once('=').ok_or_else(|| bad("option needs NAME=VALUE"))?;
                        if name.trim().is_empty() {
                            return Err(bad("option name is empty"));
                        }
                        engine.options.push((name.trim().to_string(), value.trim().to_string()));
                    }
                    "args" => engine.args.extend(rest.split_whitespace().map(str::to_string)),
                    "workdir" if !rest.is_empty() => engine.workdir = Some(PathBuf::from(rest)),
                    "workdir" => return Err(bad("workdir needs a path")),
                    _ => engine.family = rest.parse().map_err(|_| bad("family must be ab or mcts"))?,
                }
            }
            _ => {
                let (id, target) = line.split_once('=').ok_or_else(|| bad("expected 'id = path' or a directive"))?;
                let id = id.trim();
                let target = target.trim();
                if id.is_empty() || id.contains(char::is_whitespace) {
                    return Err(bad("engine id must be one word"));
                }
                if target.is_empty() {
                    return Err(bad("engine target is empty"));
                }
                if engines.iter().any(|e| e.id == id) {
                    return Err(bad("duplicate engine id"));
                }
                let (kind, family) = match target.strip_prefix("internal:") {
                    Some(name) => {
                        let family = name.parse().map_err(|_| bad("unknown internal engine"))?;
                        (EngineKind::Internal(name.to_string()), family)
                    }
                    None => (EngineKind::External(PathBuf::from(target)), EngineFamily::AlphaBeta),
                };
                engines.push(EngineSpec { id: id.to_string(), kind, options: Vec::new(), args: Vec::new(), workdir: None, family });
            }
        }
    }
    Ok(Manifest { engines })
}
