//! UCI server: exposes an internal engine on a line-oriented text stream.
//!
//! A reader thread feeds input lines into a queue; searches run on a
//! runner thread that owns the engine until the search ends and hands it
//! back, with the `bestmove` line, through the same queue.

use std::io::{BufRead, Write};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use dualmind_core::harness::{EngineFamily, Snapshot, TrialEngine};
use dualmind_core::search::{SearchLimits, MAX_DEPTH};
use dualmind_core::uci::InfoLine;
use dualmind_core::{Game, Position};
use log::{debug, warn};

type Engine = Box<dyn TrialEngine + Send>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionState {
    Boot,
    Idle,
    Searching,
}

enum Event {
    Line(String),
    Eof,
    Done(Engine, String),
}

/// Options advertised in reply to `uci`: (name, declaration).
fn option_declarations(family: EngineFamily) -> &'static [&'static str] {
    match family {
        EngineFamily::AlphaBeta => &[
            "option name MultiPV type spin default 1 min 1 max 64",
            "option name FutilityPruning type check default true",
            "option name LMR type check default true",
            "option name TTSizeMiB type spin default 64 min 1 max 4096",
            "option name EvalFile type string default <empty>",
        ],
        EngineFamily::Mcts => &[
            "option name MultiPV type spin default 1 min 1 max 64",
            "option name Simulations type spin default 10000 min 1 max 100000000",
            "option name CInit type string default 1.25",
            "option name CBase type string default 19652",
            "option name FPU type string default 0.2",
            "option name Seed type spin default 0 min 0 max 2147483647",
        ],
    }
}

/// One UCI session around one engine.
pub struct UciSession {
    engine: Option<Engine>,
    family: EngineFamily,
    name: String,
    state: SessionState,
    game: Game,
    stop: Option<Arc<AtomicBool>>,
}

/// Search limits from the arguments of a `go` command. A keyword with a
/// missing or non-numeric value is an error.
pub fn parse_go(args: &[&str], family: EngineFamily, white_to_move: bool) -> Result<SearchLimits, String> {
    let mut limits = SearchLimits { max_depth: None, max_nodes: None, max_time: None, multipv: 1 };
    let mut infinite = false;
    let mut clock: [Option<u64>; 4] = [None; 4];
    let mut i = 0;
    while i < args.len() {
        let number = || {
            args.get(i + 1)
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(|| format!("'{}' needs a number", args[i]))
        };
        let next = match args[i] {
            "depth" | "nodes" | "movetime" | "wtime" | "btime" | "winc" | "binc" => Some(number()?),
            _ => None,
        };
        match args[i] {
            "depth" => limits.max_depth = next.map(|d| d.clamp(1, MAX_DEPTH as u64) as u32),
            "nodes" => limits.max_nodes = next.filter(|&n| n > 0),
            "movetime" => limits.max_time = next.map(Duration::from_millis),
            "wtime" => clock[0] = next,
            "btime" => clock[1] = next,
            "winc" => clock[2] = next,
            "binc" => clock[3] = next,
            "infinite" => infinite = true,
            _ => {
                i += 1;
                continue;
            }
        }
        i += if args[i] == "infinite" { 1 } else { 2 };
    }
    let (left, inc) = if white_to_move { (clock[0], clock[2]) } else { (clock[1], clock[3]) };
    if limits.max_time.is_none() {
        if let Some(left) = left {
            limits.max_time = Some(Duration::from_millis((left / 30 + inc.unwrap_or(0) / 2).max(1)));
        }
    }
    let bounded = limits.max_depth.is_some() || limits.max_nodes.is_some() || limits.max_time.is_some();
    if infinite || !bounded {
        limits.max_time = if infinite { None } else { limits.max_time };
        match family {
            EngineFamily::AlphaBeta => limits.max_depth = Some(MAX_DEPTH),
            EngineFamily::Mcts if infinite => limits.max_nodes = Some(u32::MAX as u64),
            EngineFamily::Mcts => {}
        }
    } else if family == EngineFamily::Mcts && limits.max_nodes.is_none() && limits.max_time.is_some() {
        limits.max_nodes = Some(u32::MAX as u64);
    }
    Ok(limits)
}

/// `info` lines for every ranked move of a snapshot.
pub fn info_lines(snap: &Snapshot, family: EngineFamily) -> Vec<InfoLine> {
    let depth = match family {
        EngineFamily::AlphaBeta => snap.progress as u32,
        EngineFamily::Mcts => snap.seldepth.max(1),
    };
    let nps = snap.nodes * 1000 / snap.elapsed_ms.max(1);
    snap.lines
        .iter()
        .enumerate()
        .map(|(k, l)| InfoLine {
            depth: Some(depth),
            seldepth: Some(snap.seldepth),
            multipv: Some(k as u32 + 1),
            score: Some(l.score),
            nodes: Some(snap.nodes),
            nps: Some(nps),
            time_ms: Some(snap.elapsed_ms),
            hashfull: snap.hashfull,
            pv: l.pv.clone(),
            ..InfoLine::default()
        })
        .collect()
}

fn emit(out: &Mutex<Box<dyn Write + Send>>, text: &str) {
    let mut w = out.lock().unwrap_or_else(|e| e.into_inner());
    let _ = writeln!(w, "{text}");
    let _ = w.flush();
}

impl UciSession {
    pub fn new(engine: Engine, name: &str) -> UciSession {
        let family = engine.family();
        let stop = engine.stop_flag();
        UciSession {
            engine: Some(engine),
            family,
            name: name.to_string(),
            state: SessionState::Boot,
            game: Game::new(Position::startpos()),
            stop,
        }
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    /// Serves until `quit` or end of input; an in-flight search is stopped
    /// and its `bestmove` written before returning.
    pub fn run<R, W>(mut self, input: R, output: W)
    where
        R: BufRead + Send + 'static,
        W: Write + Send + 'static,
    {
        let out: Arc<Mutex<Box<dyn Write + Send>>> = Arc::new(Mutex::new(Box::new(output)));
        let (tx, rx) = mpsc::channel();
        let reader_tx = tx.clone();
        thread::spawn(move || {
            for line in input.lines() {
                let Ok(line) = line else { break };
                if reader_tx.send(Event::Line(line)).is_err() {
                    return;
                }
            }
            let _ = reader_tx.send(Event::Eof);
        });
        self.event_loop(&rx, &tx, &out);
    }

    fn event_loop(&mut self, rx: &Receiver<Event>, tx: &Sender<Event>, out: &Arc<Mutex<Box<dyn Write + Send>>>) {
        let mut quitting = false;
        while let Ok(event) = rx.recv() {
            match event {
                Event::Done(engine, bestmove) => {
                    self.engine = Some(engine);
                    self.state = SessionState::Idle;
                    emit(out, &bestmove);
                    if quitting {
                        return;
                    }
                }
                Event::Eof => {
                    if self.state != SessionState::Searching {
                        return;
                    }
                    self.signal_stop();
                    quitting = true;
                }
                Event::Line(line) => {
                    if !self.command(&line, tx, out) {
                        if self.state != SessionState::Searching {
                            return;
                        }
                        self.signal_stop();
                        quitting = true;
                    }
                }
            }
        }
    }

    fn signal_stop(&self) {
        if let Some(s) = &self.stop {
            s.store(true, Ordering::SeqCst);
        }
    }

    /// Handles one command line; false on `quit`.
    fn command(&mut self, line: &str, tx: &Sender<Event>, out: &Arc<Mutex<Box<dyn Write + Send>>>) -> bool {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some(&cmd) = tokens.first() else { return true };
        debug!("<< {line}");
        let searching = self.state == SessionState::Searching;
        match cmd {
            "quit" => return false,
            "isready" => emit(out, "readyok"),
            "stop" => {
                if searching {
                    self.signal_stop();
                }
            }
            _ if searching => warn!("ignoring '{cmd}' during a search"),
            "uci" => {
                emit(out, &format!("id name {}", self.name));
                emit(out, "id author dualmind");
                for decl in option_declarations(self.family) {
                    emit(out, decl);
                }
                emit(out, "uciok");
                self.state = SessionState::Idle;
            }
            "ucinewgame" => {
                self.touch();
                if let Some(e) = self.engine.as_mut() {
                    let _ = e.new_game();
                }
                self.game = Game::new(Position::startpos());
            }
            "setoption" => {
                self.touch();
                self.setoption(&tokens[1..]);
            }
            "position" => {
                self.touch();
                match parse_position(&tokens[1..]) {
                    Ok(game) => self.game = game,
                    Err(e) => warn!("bad position command: {e}"),
                }
            }
            "go" => {
                if self.state != SessionState::Idle {
                    warn!("'go' before 'uci'");
                    return true;
                }
                self.go(&tokens[1..], tx, out);
            }
            _ => warn!("unknown command '{cmd}'"),
        }
        true
    }

    fn touch(&mut self) {
        if self.state == SessionState::Boot {
            self.state = SessionState::Idle;
        }
    }

    fn setoption(&mut self, args: &[&str]) {
        let name_at = args.iter().position(|&t| t == "name");
        let value_at = args.iter().position(|&t| t == "value");
        let Some(n) = name_at else {
            warn!("setoption without a name");
            return;
        };
        let name = args[n + 1..value_at.unwrap_or(args.len())].join(" ");
        let value = value_at.map_or(String::new(), |v| args[v + 1..].join(" "));
        if let Some(e) = self.engine.as_mut() {
            if let Err(err) = e.set_option(&name, &value) {
                warn!("setoption {name}: {err}");
            }
        }
    }

    fn go(&mut self, args: &[&str], tx: &Sender<Event>, out: &Arc<Mutex<Box<dyn Write + Send>>>) {
        let Some(mut engine) = self.engine.take() else { return };
        let pos = self.game.position().clone();
        let history: Vec<u64> = self.game.history().to_vec();
        let white = pos.side_to_move() == dualmind_core::Color::White;
        let limits = match parse_go(args, self.family, white) {
            Ok(l) => l,
            Err(e) => {
                warn!("ignoring go: {e}");
                self.engine = Some(engine);
                return;
            }
        };
        if let Some(s) = &self.stop {
            s.store(false, Ordering::SeqCst);
        }
        self.state = SessionState::Searching;
        let family = self.family;
        let out = Arc::clone(out);
        let tx = tx.clone();
        thread::spawn(move || {
            let mut last: Option<u64> = None;
            let result = engine.analyze(&pos, &history, &limits, &mut |snap| {
                last = Some(snap.progress);
                for info in info_lines(snap, family) {
                    emit(&out, &info.to_string());
                }
                ControlFlow::Continue(())
            });
            let best = match result {
                Ok(snap) => {
                    if last != Some(snap.progress) {
                        for info in info_lines(&snap, family) {
                            emit(&out, &info.to_string());
                        }
                    }
                    snap.best().map(|l| l.mv.to_uci())
                }
                Err(e) => {
                    emit(&out, &format!("info string search failed: {e}"));
                    None
                }
            };
            let _ = tx.send(Event::Done(engine, format!("bestmove {}", best.unwrap_or_else(|| "0000".into()))));
        });
    }
}

/// `startpos|fen <fen> [moves m1 m2 ...]`.
pub fn parse_position(args: &[&str]) -> Result<Game, String> {
    let moves_at = args.iter().position(|&t| t == "moves").unwrap_or(args.len());
    let start = match args.first() {
        Some(&"startpos") => Position::startpos(),
        Some(&"fen") => Position::from_fen(&args[1..moves_at].join(" ")).map_err(|e| e.to_string())?,
        _ => return Err("expected 'startpos' or 'fen'".into()),
    };
    let mut game = Game::new(start);
    for m in args.iter().skip(moves_at + 1) {
        game.play_uci(m).map_err(|e| e.to_string())?;
    }
    Ok(game)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn go_arguments() {
        let l = parse_go(&["depth", "20"], EngineFamily::AlphaBeta, true).unwrap();
        assert_eq!(l.max_depth, Some(20));
        let l = parse_go(&["movetime", "100"], EngineFamily::AlphaBeta, true).unwrap();
        assert_eq!(l.max_time, Some(Duration::from_millis(100)));
        let l = parse_go(&["infinite"], EngineFamily::AlphaBeta, true).unwrap();
        assert_eq!(l.max_depth, Some(MAX_DEPTH));
        assert!(l.validate().is_ok());
        let l = parse_go(&["wtime", "3000", "btime", "60000", "binc", "1000"], EngineFamily::AlphaBeta, false).unwrap();
        assert_eq!(l.max_time, Some(Duration::from_millis(2500)));
        let l = parse_go(&["movetime", "50"], EngineFamily::Mcts, true).unwrap();
        assert_eq!(l.max_nodes, Some(u32::MAX as u64));
        let l = parse_go(&[], EngineFamily::Mcts, true).unwrap();
        assert_eq!(l.max_nodes, None);
        let l = parse_go(&["searchmoves", "e2e4", "nodes", "500"], EngineFamily::AlphaBeta, true).unwrap();
        assert_eq!(l.max_nodes, Some(500));
        assert!(parse_go(&["depth", "x"], EngineFamily::AlphaBeta, true).is_err());
        assert!(parse_go(&["movetime"], EngineFamily::Mcts, true).is_err());
    }

    #[test]
    fn position_command() {
        let g = parse_position(&["startpos", "moves", "e2e4", "e7e5"]).unwrap();
        assert_eq!(g.moves().len(), 2);
        let g = parse_position(&["fen", "8/8/8/8/8/8/8/K1k5", "w", "-", "-", "0", "1"]).unwrap();
        assert_eq!(g.position().to_fen(), "8/8/8/8/8/8/8/K1k5 w - - 0 1");
        assert!(parse_position(&["startpos", "moves", "e2e5"]).is_err());
        assert!(parse_position(&["nothing"]).is_err());
    }
}
