//! Driving an external UCI engine as a harness engine.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::ops::ControlFlow;
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use dualmind_core::eval::{Score, WinProbModel};
use dualmind_core::harness::{EngineFamily, HarnessError, NodeSource, Snapshot, TopLine, TrialEngine};
use dualmind_core::search::SearchLimits;
use dualmind_core::uci::InfoLine;
use dualmind_core::Position;
use log::{debug, warn};

pub const HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(10);
/// Grace period past a search's own time limit before the engine counts
/// as hung.
pub const SEARCH_GRACE: Duration = Duration::from_secs(30);

pub struct UciClient {
    id: String,
    family: EngineFamily,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    pub engine_name: Option<String>,
    pub multipv: usize,
    /// Wall-clock bound for searches without a time limit.
    pub search_timeout: Option<Duration>,
}

fn engine_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Engine(msg.into())
}

impl UciClient {
    /// Starts `path` with `args` (in `workdir` if given), completes the `uci`/`isready`
    /// handshake and applies `options`.
    pub fn spawn(
        id: &str,
        path: &Path,
        args: &[String],
        workdir: Option<&Path>,
        family: EngineFamily,
        options: &[(String, String)],
    ) -> Result<UciClient, HarnessError> {
        let mut cmd = Command::new(path);
        cmd.args(args);
        cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::null());
        if let Some(dir) = workdir {
            cmd.current_dir(dir);
        }
        let mut child = cmd.spawn().map_err(|e| engine_err(format!("cannot start {}: {e}", path.display())))?;
        let stdin = child.stdin.take().ok_or_else(|| engine_err("no stdin"))?;
        let stdout = child.stdout.take().ok_or_else(|| engine_err("no stdout"))?;
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut client = UciClient {
            id: id.to_string(),
            family,
            child,
            stdin,
            lines: rx,
            engine_name: None,
            multipv: 1,
            search_timeout: None,
        };
        client.send("uci")?;
        let deadline = Instant::now() + HANDSHAKE_TIMEOUT;
        loop {
            let line = client.recv_until(deadline, "uciok")?;
            if let Some(name) = line.strip_prefix("id name ") {
                client.engine_name = Some(name.trim().to_string());
            }
            if line.trim() == "uciok" {
                break;
            }
        }
        for (name, value) in options {
            client.set_option(name, value)?;
        }
        client.sync()?;
        Ok(client)
    }

    fn send(&mut self, cmd: &str) -> Result<(), HarnessError> {
        debug!("{} >> {cmd}", self.id);
        writeln!(self.stdin, "{cmd}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| engine_err(format!("engine {} closed its input: {e}", self.id)))
    }

    fn recv_until(&mut self, deadline: Instant, waiting_for: &str) -> Result<String, HarnessError> {
        let left = deadline.saturating_duration_since(Instant::now());
        match self.lines.recv_timeout(left) {
            Ok(line) => {
                debug!("{} << {line}", self.id);
                Ok(line)
            }
            Err(RecvTimeoutError::Timeout) => Err(engine_err(format!("timed out waiting for {waiting_for}"))),
            Err(RecvTimeoutError::Disconnected) => {
                let status = self.child.try_wait().ok().flatten();
                Err(engine_err(format!("engine exited while waiting for {waiting_for} ({status:?})")))
            }
        }
    }

    /// `isready` and wait for `readyok`.
    pub fn sync(&mut self) -> Result<(), HarnessError> {
        self.send("isready")?;
        let deadline = Instant::now() + HANDSHAKE_TIMEOUT;
        while self.recv_until(deadline, "readyok")?.trim() != "readyok" {}
        Ok(())
    }

    fn go_command(limits: &SearchLimits) -> String {
        let mut go = String::from("go");
        if let Some(d) = limits.max_depth {
            go += &format!(" depth {d}");
        }
        if let Some(n) = limits.max_nodes {
            go += &format!(" nodes {n}");
        }
        if let Some(t) = limits.max_time {
            go += &format!(" movetime {}", t.as_millis());
        }
        if go == "go" {
            go += " infinite";
        }
        go
    }

    fn snapshot(&self, pos: &Position, depth: u32, infos: &BTreeMap<u32, InfoLine>) -> Snapshot {
        let model = match self.family {
            EngineFamily::AlphaBeta => WinProbModel::Logistic400,
            EngineFamily::Mcts => WinProbModel::Lc0,
        };
        let mut lines: Vec<TopLine> = Vec::new();
        for info in infos.values() {
            let (Some(score), Some(&mv)) = (info.score, info.pv.first()) else { continue };
            if !pos.is_legal(mv) || lines.iter().any(|l| l.mv == mv) {
                continue;
            }
            lines.push(TopLine { mv, san: pos.to_san(mv), score, winprob: model.win_probability(score), pv: info.pv.clone() });
        }
        let last = infos.values().next_back();
        let first = infos.values().next();
        Snapshot {
            progress: depth as u64,
            seldepth: first.and_then(|i| i.seldepth).unwrap_or(depth),
            nodes: infos.values().filter_map(|i| i.nodes).max().unwrap_or(0),
            elapsed_ms: infos.values().filter_map(|i| i.time_ms).max().unwrap_or(0),
            hashfull: last.and_then(|i| i.hashfull),
            lines,
        }
    }
}

impl Drop for UciClient {
    fn drop(&mut self) {
        let _ = self.send("quit");
        let deadline = Instant::now() + Duration::from_millis(500);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl TrialEngine for UciClient {
    fn id(&self) -> &str {
        &self.id
    }

    fn family(&self) -> EngineFamily {
        self.family
    }

    fn node_source(&self) -> NodeSource {
        NodeSource::External
    }

    fn set_option(&mut self, name: &str, value: &str) -> Result<(), HarnessError> {
        if name.eq_ignore_ascii_case("multipv") {
            self.multipv = value.trim().parse().unwrap_or(1);
        }
        self.send(&format!("setoption name {name} value {value}"))
    }

    fn new_game(&mut self) -> Result<(), HarnessError> {
        self.send("ucinewgame")?;
        self.sync()
    }

    /// Snapshots are emitted when the engine moves on to a new depth and
    /// once more at `bestmove`. Breaking out sends `stop` and drains the
    /// output up to `bestmove`.
    fn analyze(
        &mut self,
        pos: &Position,
        history: &[u64],
        limits: &SearchLimits,
        on_snapshot: &mut dyn FnMut(&Snapshot) -> ControlFlow<()>,
    ) -> Result<Snapshot, HarnessError> {
        if !history.is_empty() {
            warn!("{}: game history is not forwarded to external engines", self.id);
        }
        let multipv = limits.multipv.max(self.multipv);
        self.send(&format!("setoption name MultiPV value {multipv}"))?;
        self.send(&format!("position fen {}", pos.to_fen()))?;
        self.send(&Self::go_command(limits))?;
        let budget = match (limits.max_time, self.search_timeout) {
            (Some(t), _) => Some(t + SEARCH_GRACE),
            (None, t) => t,
        };
        let deadline = budget.map(|b| Instant::now() + b);
        let mut stopped = false;
        let mut depth = 0;
        let mut infos: BTreeMap<u32, InfoLine> = BTreeMap::new();
        loop {
            let line = match deadline {
                Some(d) => self.recv_until(d, "bestmove")?,
                None => self
                    .lines
                    .recv()
                    .map_err(|_| engine_err(format!("engine {} exited during a search", self.id)))?,
            };
            let line = line.trim();
            if line.starts_with("bestmove") {
                let mut snap = self.snapshot(pos, depth, &infos);
                let best = line.split_whitespace().nth(1).and_then(|t| pos.parse_uci(t).ok());
                if let Some(m) = best {
                    if let Some(i) = snap.lines.iter().position(|l| l.mv == m) {
                        let l = snap.lines.remove(i);
                        snap.lines.insert(0, l);
                    } else {
                        let score = snap.lines.first().map_or(Score::Centipawns(0), |l| l.score);
                        snap.lines.insert(0, TopLine { mv: m, san: pos.to_san(m), score, winprob: 0.5, pv: vec![m] });
                    }
                }
                return Ok(snap);
            }
            let Ok(info) = InfoLine::parse(line) else { continue };
            let (Some(d), Some(_), false) = (info.depth, info.score, info.pv.is_empty()) else { continue };
            if d > depth && !infos.is_empty() && !stopped {
                let snap = self.snapshot(pos, depth, &infos);
                if on_snapshot(&snap).is_break() {
                    self.send("stop")?;
                    stopped = true;
                }
                infos.clear();
            }
            depth = depth.max(d);
            infos.insert(info.multipv.unwrap_or(1), info);
        }
    }
}
