use std::fmt::Write as _;
use std::io::{self, BufReader};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dualmind_core::board::{perft, perft_divide};
use dualmind_core::eval::{fnv1a64, NnueDims, NnueNetwork};
use dualmind_core::harness::{
    internal_engine, parse_manifest, parse_suite, render_report, render_table, run_concurrent, run_suite,
    EngineFamily, EngineKind, Manifest, MctsEngine, AbEngine, RatioInputs, ReportFormat, SolveRule, StudySuite,
    SuiteRecord, TrialEngine, BUILTIN_SUITE,
};
use dualmind_core::oracle::{solve_with, DEFAULT_NODE_BUDGET};
use dualmind_core::search::SearchLimits;
use dualmind_core::Position;

use crate::client::UciClient;
use crate::server::UciSession;

#[derive(Parser, Debug)]
#[command(name = "dualmind", version, about = "Alpha-beta and PUCT chess engines with a study benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Ab,
    Mcts,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Search a position and print its top moves with Q-values and win probabilities.
    Analyze {
        /// FEN, or `startpos`.
        fen: String,
        #[arg(long, value_enum, default_value_t = EngineChoice::Ab)]
        engine: EngineChoice,
        #[arg(long)]
        depth: Option<u32>,
        /// Simulations for the MCTS engine.
        #[arg(long)]
        sims: Option<u32>,
        #[arg(long)]
        nodes: Option<u64>,
        #[arg(long)]
        movetime: Option<u64>,
        #[arg(long, default_value_t = 1)]
        multipv: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// NNUE weight file for alpha-beta leaves.
        #[arg(long)]
        nnue: Option<PathBuf>,
    },
    /// Run a study suite on the engines of a manifest and print a report.
    Bench {
        /// EPD suite; the built-in suite when omitted.
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Engine manifest; a single internal alpha-beta engine when omitted.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "markdown")]
        report: ReportFormat,
        /// Alpha-beta depth limit.
        #[arg(long)]
        depth: Option<u32>,
        /// Alpha-beta node limit.
        #[arg(long)]
        nodes: Option<u64>,
        /// MCTS simulations per study.
        #[arg(long)]
        sims: Option<u32>,
        #[arg(long)]
        movetime: Option<u64>,
        #[arg(long, default_value_t = 1)]
        multipv: usize,
        /// Consecutive iterations with a best move first that count as solved.
        #[arg(long, default_value_t = 3)]
        stable: u32,
        /// Only these study ids.
        #[arg(long = "id")]
        ids: Vec<String>,
        /// Run each engine in its own thread.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Q-values of every legal move as CSV `move,q,resolved`.
    Oracle {
        fen: String,
        #[arg(long)]
        horizon: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Leela ratio from two engines' speeds and node counts.
    Ratio {
        #[arg(long)]
        sf_nps: f64,
        #[arg(long)]
        lc_nps: f64,
        #[arg(long)]
        sf_nodes: f64,
        #[arg(long)]
        lc_nodes: f64,
    },
    /// Count leaf nodes of the legal move tree.
    Perft {
        fen: String,
        depth: u32,
        /// Per-move counts.
        #[arg(long)]
        divide: bool,
    },
    /// Speak UCI on stdin/stdout.
    ServeUci {
        #[arg(long, value_enum, default_value_t = EngineChoice::Ab)]
        engine: EngineChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded random NNUE weight file.
    NnueGen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit code 1: an engine failed or a study went unsolved.
#[derive(Debug)]
pub struct Failure(pub String);

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failure {}

/// Exit code 2: bad input from the command line.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn parse_fen_arg(text: &str) -> Result<Position, Usage> {
    if text.trim() == "startpos" {
        return Ok(Position::startpos());
    }
    Position::from_fen(text).map_err(|e| Usage(format!("bad FEN '{text}': {e}")))
}

/// Parses `args` (without the program name) and runs the command,
/// writing its output to stdout.
pub fn main_with(args: impl IntoIterator<Item = String>) -> ExitCode {
    let cli = match Cli::try_parse_from(std::iter::once("dualmind".to_string()).chain(args)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Cmd::ServeUci { engine, seed } = cli.command {
        let engine = make_engine(engine, seed);
        let name = format!("dualmind {}", engine.family());
        UciSession::new(engine, &name).run(BufReader::new(io::stdin()), io::stdout());
        return ExitCode::SUCCESS;
    }
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => exit_for(&e),
    }
}

fn exit_for(e: &anyhow::Error) -> ExitCode {
    if let Some(f) = e.downcast_ref::<Failure>() {
        // the report is still useful when studies went unsolved
        print!("{}", f.0);
        return ExitCode::from(1);
    }
    eprintln!("error: {e:#}");
    if e.downcast_ref::<Usage>().is_some() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn make_engine(choice: EngineChoice, seed: u64) -> Box<dyn TrialEngine + Send> {
    match choice {
        EngineChoice::Ab => Box::new(AbEngine::new("ab")),
        EngineChoice::Mcts => {
            let mut e = MctsEngine::new("mcts");
            e.mcts.seed = seed;
            Box::new(e)
        }
    }
}

/// Runs every command except `serve-uci` and returns its stdout text.
pub fn run(cmd: Cmd) -> anyhow::Result<String> {
    match cmd {
        Cmd::Analyze { fen, engine, depth, sims, nodes, movetime, multipv, seed, nnue } => {
            let pos = parse_fen_arg(&fen)?;
            if pos.game_result().is_terminal() {
                return Err(Usage(format!("position is over ({:?})", pos.game_result())).into());
            }
            let mut e = make_engine(engine, seed);
            if let Some(path) = nnue {
                if engine != EngineChoice::Ab {
                    return Err(Usage("--nnue applies to the alpha-beta engine".into()).into());
                }
                e.set_option("EvalFile", &path.to_string_lossy())?;
            }
            let mut limits = SearchLimits {
                max_depth: depth,
                max_nodes: if engine == EngineChoice::Mcts { sims.map(u64::from).or(nodes) } else { nodes },
                max_time: movetime.map(Duration::from_millis),
                multipv: multipv.max(1),
            };
            if engine == EngineChoice::Ab && limits.validate().is_err() {
                limits.max_depth = Some(8);
            }
            let snap = e.analyze(&pos, &[], &limits, &mut |_| std::ops::ControlFlow::Continue(()))?;
            let mut out = format!("position: {}\nengine: {}\n\n", pos.to_fen(), e.family());
            out += &render_table(&snap.lines);
            let unit = if engine == EngineChoice::Ab { "depth" } else { "simulations" };
            let _ = writeln!(out, "nodes: {}, time: {} ms, {unit}: {}", snap.nodes, snap.elapsed_ms, snap.progress);
            if let Some(best) = snap.best() {
                let pv: Vec<String> = san_line(&pos, &best.pv);
                let _ = writeln!(out, "pv: {}", pv.join(" "));
            }
            Ok(out)
        }
        Cmd::Bench { suite, manifest, report, depth, nodes, sims, movetime, multipv, stable, ids, parallel, out } => {
            let text = match &suite {
                Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => BUILTIN_SUITE.to_string(),
            };
            let mut suite: StudySuite = parse_suite(&text).map_err(|e| Usage(e.to_string()))?;
            if !ids.is_empty() {
                if let Some(missing) = ids.iter().find(|id| suite.get(id).is_none()) {
                    return Err(Usage(format!("no study with id '{missing}'")).into());
                }
                suite.studies.retain(|s| ids.contains(&s.id));
            }
            let manifest = match &manifest {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    parse_manifest(&text).map_err(|e| Usage(e.to_string()))?
                }
                None => parse_manifest("ab = internal:ab").expect("default manifest"),
            };
            let time = movetime.map(Duration::from_millis);
            let ab_limits = SearchLimits {
                max_depth: depth.or(if nodes.is_none() && time.is_none() { Some(6) } else { None }),
                max_nodes: nodes,
                max_time: time,
                multipv: multipv.max(1),
            };
            let mcts_limits = SearchLimits { max_depth: None, max_nodes: sims.map(u64::from), max_time: time, multipv: multipv.max(1) };
            let mut engines = start_engines(&manifest)?
                .into_iter()
                .map(|e| {
                    let l = if e.family() == EngineFamily::Mcts { mcts_limits.clone() } else { ab_limits.clone() };
                    (e, l)
                })
                .collect::<Vec<_>>();
            let rule = SolveRule { stable_iterations: stable, accept_mate: true };
            let records: Vec<SuiteRecord> = if parallel {
                run_concurrent(&mut engines, &suite, rule)
            } else {
                engines.iter_mut().flat_map(|(e, l)| run_suite(e.as_mut(), &suite, l, rule)).collect()
            };
            let doc = render_report(&records, report);
            let text = match &out {
                Some(p) => {
                    std::fs::write(p, &doc).with_context(|| format!("writing {}", p.display()))?;
                    String::new()
                }
                None => doc,
            };
            let failed = records.iter().filter(|r| !r.solved || r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} trials unsolved or failed", records.len());
                return Err(Failure(text).into());
            }
            Ok(text)
        }
        Cmd::Oracle { fen, horizon, budget } => {
            let pos = parse_fen_arg(&fen)?;
            if pos.game_result().is_terminal() {
                return Err(Usage(format!("position is over ({:?})", pos.game_result())).into());
            }
            let sol = solve_with(&pos, horizon, &[], budget).map_err(|e| Failure(format!("{e}\n")))?;
            let mut rows: Vec<(usize, String, f64, bool)> = sol
                .q
                .iter()
                .zip(&sol.q_resolved)
                .enumerate()
                .map(|(i, (&(m, q), &r))| (i, pos.to_san(m), q, r))
                .collect();
            rows.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
            let mut out = String::from("move,q,resolved\n");
            for (_, san, q, r) in rows {
                let _ = writeln!(out, "{san},{q},{r}");
            }
            Ok(out)
        }
        Cmd::Ratio { sf_nps, lc_nps, sf_nodes, lc_nodes } => {
            let r = RatioInputs { sf_nps, lc_nps, sf_nodes, lc_nodes }.compute().map_err(|e| Usage(e.to_string()))?;
            Ok(format!("F = {:.2}\nR = {:.1}\n{}\n", r.factor, r.ratio, r.interpretation()))
        }
        Cmd::Perft { fen, depth, divide } => {
            let pos = parse_fen_arg(&fen)?;
            let mut out = String::new();
            if divide {
                let mut rows = perft_divide(&pos, depth);
                rows.sort_by_key(|(m, _)| m.to_uci());
                for (m, n) in rows {
                    let _ = writeln!(out, "{m}: {n}");
                }
            }
            let _ = writeln!(out, "{}", perft(&pos, depth));
            Ok(out)
        }
        Cmd::NnueGen { out, seed } => {
            let net = NnueNetwork::random(seed, NnueDims::DEFAULT)?;
            net.write_file(&out).with_context(|| format!("writing {}", out.display()))?;
            let bytes = net.to_bytes();
            Ok(format!("wrote {} ({} bytes, fnv1a64 {:016x})\n", out.display(), bytes.len(), fnv1a64(&bytes)))
        }
        Cmd::ServeUci { .. } => unreachable!("handled by main_with"),
    }
}

fn san_line(pos: &Position, moves: &[dualmind_core::Move]) -> Vec<String> {
    let mut p = pos.clone();
    let mut out = Vec::new();
    for &m in moves {
        if !p.is_legal(m) {
            break;
        }
        out.push(p.to_san(m));
        p = p.play_unchecked(m);
    }
    out
}

/// Engines of a manifest, started and configured.
pub fn start_engines(manifest: &Manifest) -> anyhow::Result<Vec<Box<dyn TrialEngine + Send>>> {
    let mut engines: Vec<Box<dyn TrialEngine + Send>> = Vec::new();
    for spec in &manifest.engines {
        let engine: Box<dyn TrialEngine + Send> = match &spec.kind {
            EngineKind::Internal(name) => {
                let mut e = internal_engine(&spec.id, name)?;
                for (k, v) in &spec.options {
                    e.set_option(k, v).map_err(|err| Usage(format!("engine {}: {err}", spec.id)))?;
                }
                e
            }
            EngineKind::External(path) => Box::new(
                UciClient::spawn(&spec.id, path, &spec.args, spec.workdir.as_deref(), spec.family, &spec.options)
                    .map_err(|e| Failure(format!("engine {}: {e}\n", spec.id)))?,
            ),
        };
        engines.push(engine);
    }
    Ok(engines)
}
