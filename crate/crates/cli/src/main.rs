use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use forcing_lab::arrays::search_array;
use forcing_lab::bruteforce::EnumerationBudget;
use forcing_lab::frame::{frame_bound_check, FrameBoundReport};
use forcing_lab::game::{
    run_game, DloPlayer, GameAbort, GameTranscript, MinPlayer, PassPlayer, PhpPlayer, Requirement,
    Strategy,
};
use forcing_lab::machines::{compile, OracleProgram};
use forcing_lab::variants::{
    dominating_set_check, DominationPlayer, PartialFnCondition, PartialFnFrame, SurjectionPlayer,
    TourPlayer, TournamentCondition, TournamentFrame,
};
use forcing_lab::verify::{content_digest, run_suite, FrameKind, RunConfig, Suite};
use forcing_lab::{Condition, Error, OrderFrame, Universe};

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 3;
const EXIT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "forcing-lab", version, about = "Verifiers, counts and game runs over finite order conditions")]
struct Cli {
    /// Node budget for exhaustive searches
    #[arg(long, global = true, env = "FORCING_LAB_BUDGET", default_value_t = EnumerationBudget::default().max_nodes)]
    budget_nodes: u64,

    /// Seed for generated test material
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the JSON output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Order,
    Tournament,
    Partialfn,
}

impl From<FrameArg> for FrameKind {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Order => FrameKind::Order,
            FrameArg::Tournament => FrameKind::Tournament,
            FrameArg::Partialfn => FrameKind::Partialfn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite and emit its report
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, value_enum)]
        frame: Option<FrameArg>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        length_cap: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        rounds: Option<usize>,
        /// Tree (tree-props) or array (uniformize) JSON to check instead of the grid
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Play the forcing game and write its transcript
    RunGame {
        #[arg(long, value_enum, default_value = "order")]
        frame: FrameArg,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long)]
        length_cap: Option<usize>,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        /// Player names in turn order; cycled
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<String>>,
        /// JSON list of requirements for the PHP player
        #[arg(long)]
        requirements: Option<PathBuf>,
        /// The set X for the DLO and DOM players
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<usize>>,
    },
    /// Uniform tree size, its formula and the exhaustive antichain maximum
    Counts {
        #[arg(long, value_enum, default_value = "order")]
        frame: FrameArg,
        /// Universe size (order frame)
        #[arg(long)]
        m: Option<usize>,
        /// Universe size (tournament and partial-function frames)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        o_len: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exhaustively search for a pigeonhole array
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        length_cap: Option<usize>,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        h: usize,
        /// Base condition, comma separated
        #[arg(long, value_delimiter = ',')]
        base: Vec<usize>,
        /// Longest member to try
        #[arg(long)]
        depth: usize,
    },
    /// Compile an oracle program into accepting and rejecting families
    Compile {
        /// JSON oracle program
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        length_cap: Option<usize>,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, value_delimiter = ',')]
        base: Vec<usize>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite {s:?}; expected one of {}", names.join(", "))
    })
}

/// Failure modes with their exit codes.
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe downstream is not our failure
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Io(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    write_out(out, &(text + "\n"))
}

fn universe(n: usize, cap: Option<usize>) -> Result<Universe, Failure> {
    Ok(Universe::new(n, cap.unwrap_or(n))?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { EXIT_BUDGET } else { EXIT_ERROR })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let out = cli.out.as_deref();
    let mut config = RunConfig::new("");
    config.budget_nodes = cli.budget_nodes;
    config.seed = cli.seed;
    config.out = cli.out.as_ref().map(|p| p.display().to_string());
    match cli.command {
        Command::Verify { suite, frame, n, length_cap, m, p, h, depth, rounds, input } => {
            config.command = format!("verify {suite}");
            config.frame = frame.map(Into::into);
            (config.n, config.length_cap, config.m) = (n, length_cap, m);
            (config.p, config.h, config.depth, config.rounds) = (p, h, depth, rounds);
            config.input = input.as_ref().map(|p| p.display().to_string());
            let input: Option<Value> = input.as_deref().map(read_json).transpose()?;
            let report = run_suite(suite, &config, input.as_ref())?;
            eprintln!(
                "{suite}: {} ({} instances, {} failed) digest {}",
                if report.passed { "pass" } else { "FAIL" },
                report.checked,
                report.failed,
                report.digest
            );
            emit(out, &report)?;
            Ok(report.passed)
        }
        Command::RunGame { frame, n, length_cap, rounds, schedule, requirements, x } => {
            config.command = "run-game".into();
            config.frame = Some(frame.into());
            (config.n, config.length_cap, config.rounds) = (Some(n), length_cap, Some(rounds));
            config.requirements = requirements.as_ref().map(|p| p.display().to_string());
            let reqs: Vec<Requirement> = match &requirements {
                Some(path) => read_json::<Vec<Requirement>>(path)?
                    .into_iter()
                    .map(|r| Requirement::new(r.label, r.program, r.p, r.h))
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            match frame {
                FrameArg::Order => {
                    let u = universe(n, length_cap)?;
                    let x: BTreeSet<usize> = x.map_or_else(|| (0..n).collect(), |v| v.into_iter().collect());
                    let schedule = schedule.unwrap_or_else(|| ["MIN", "PASS", "PHP"].map(String::from).to_vec());
                    config.schedule = Some(schedule.clone());
                    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
                    players.insert("MIN".into(), Box::new(MinPlayer::new(n)));
                    players.insert("PASS".into(), Box::new(PassPlayer));
                    players.insert("PHP".into(), Box::new(PhpPlayer::new(reqs, u.length_cap)));
                    players.insert("DLO".into(), Box::new(DloPlayer::new(x)));
                    let result = run_game(&OrderFrame::new(u), &schedule, &mut players, rounds);
                    finish_game(out, result, |c: &Condition| json!({"final_length": c.len()}))
                }
                FrameArg::Tournament => {
                    let f = TournamentFrame::new(n, length_cap.unwrap_or(n))?;
                    let x: BTreeSet<usize> = x.map_or_else(|| [0].into(), |v| v.into_iter().collect());
                    let schedule = schedule.unwrap_or_else(|| ["TOUR", "DOM"].map(String::from).to_vec());
                    config.schedule = Some(schedule.clone());
                    let mut players: BTreeMap<String, Box<dyn Strategy<TournamentFrame>>> = BTreeMap::new();
                    players.insert("TOUR".into(), Box::new(TourPlayer { queue: x.iter().copied().collect() }));
                    players.insert("DOM".into(), Box::new(DominationPlayer { x: x.clone() }));
                    players.insert("PASS".into(), Box::new(PassPlayer));
                    let result = run_game(&f, &schedule, &mut players, rounds);
                    finish_game(out, result, |t: &TournamentCondition| {
                        json!({
                            "final_vertices": t.vertices().len(),
                            "x_dominates": dominating_set_check(t, &x).ok(),
                        })
                    })
                }
                FrameArg::Partialfn => {
                    let f = PartialFnFrame::new(n, length_cap.unwrap_or(n))?;
                    let schedule = schedule.unwrap_or_else(|| vec!["SURJ".to_string()]);
                    config.schedule = Some(schedule.clone());
                    let mut players: BTreeMap<String, Box<dyn Strategy<PartialFnFrame>>> = BTreeMap::new();
                    players.insert("SURJ".into(), Box::new(SurjectionPlayer::new(n)));
                    players.insert("PASS".into(), Box::new(PassPlayer));
                    let result = run_game(&f, &schedule, &mut players, rounds);
                    finish_game(out, result, |g: &PartialFnCondition| {
                        json!({"final_pairs": g.pairs().len(), "range": g.range().len(), "holes": 2 * n})
                    })
                }
            }
        }
        Command::Counts { frame, m, n, o_len, depth, format } => {
            config.command = "counts".into();
            config.frame = Some(frame.into());
            (config.m, config.n, config.depth) = (m, n, Some(depth));
            let budget = config.budget();
            let report = match frame {
                FrameArg::Order => {
                    let m = m.or(n).ok_or_else(|| Failure::Io("counts for the order frame needs --m".into()))?;
                    let f = OrderFrame::new(Universe::full(m)?);
                    let base = Condition::new((0..o_len).collect())?;
                    frame_bound_check(&f, &base, depth, &budget)?
                }
                FrameArg::Tournament => {
                    let n = n.or(m).ok_or_else(|| Failure::Io("counts for tournaments needs --n".into()))?;
                    let f = TournamentFrame::new(n, n)?;
                    let base = TournamentCondition::new(0..o_len, (0..o_len).flat_map(|u| (u + 1..o_len).map(move |v| (u, v))))?;
                    frame_bound_check(&f, &base, depth, &budget)?
                }
                FrameArg::Partialfn => {
                    let n = n.or(m).ok_or_else(|| Failure::Io("counts for partial functions needs --n".into()))?;
                    let f = PartialFnFrame::new(n, n)?;
                    let base = PartialFnCondition::new((0..o_len).map(|x| (x, x)))?;
                    frame_bound_check(&f, &base, depth, &budget)?
                }
            };
            emit_counts(out, format, &config, &report)?;
            Ok(report.passed)
        }
        Command::Search { n, length_cap, p, h, base, depth } => {
            config.command = "search".into();
            (config.n, config.length_cap, config.p, config.h, config.depth) = (Some(n), length_cap, Some(p), Some(h), Some(depth));
            let u = universe(n, length_cap)?;
            let base = Condition::new(base)?;
            let verdict = search_array(&OrderFrame::new(u), &base, p, h, depth, &config.budget())?;
            eprintln!("({base}, {p}, {h})-array {}", if verdict.exists() { "exists" } else { "does not exist" });
            let body = json!({"config": config, "base": base, "result": verdict});
            emit(out, &json!({"report": body, "digest": content_digest(&body)}))?;
            Ok(true)
        }
        Command::Compile { program, n, length_cap, p, h, base } => {
            config.command = "compile".into();
            (config.n, config.length_cap, config.p, config.h) = (Some(n), length_cap, Some(p), Some(h));
            config.input = Some(program.display().to_string());
            let prog: OracleProgram = read_json(&program)?;
            let u = universe(n, length_cap)?;
            let family = compile(&prog, &u, &Condition::new(base)?, p, h)?;
            emit(out, &family)?;
            Ok(true)
        }
    }
}

fn finish_game<C: Serialize + Clone>(
    out: Option<&Path>,
    result: Result<GameTranscript<C>, GameAbort<C>>,
    describe: impl Fn(&C) -> Value,
) -> Result<bool, Failure> {
    match result {
        Ok(t) => {
            let mut summary = json!({"rounds": t.rounds.len(), "requirements_discharged": t.discharged()});
            if let (Value::Object(s), Value::Object(extra)) = (&mut summary, describe(&t.final_condition)) {
                s.extend(extra);
            }
            eprintln!("{summary}");
            emit(out, &t)?;
            Ok(true)
        }
        Err(abort) => {
            // keep whatever was played before the failure
            emit(out, &abort.transcript)?;
            eprintln!("game aborted after {} rounds", abort.transcript.rounds.len());
            Err(Failure::Lib(abort.error))
        }
    }
}

#[derive(Serialize)]
struct CountsRow {
    frame: String,
    base_size: usize,
    depth: usize,
    formula: String,
    antichain_formula: String,
    tree_size: usize,
    max_antichain: usize,
    candidates: usize,
    agrees: bool,
}

fn emit_counts(out: Option<&Path>, format: Format, config: &RunConfig, r: &FrameBoundReport) -> Result<(), Failure> {
    let row = CountsRow {
        frame: r.frame.clone(),
        base_size: r.base_size,
        depth: r.depth,
        formula: r.tree_formula.to_string(),
        antichain_formula: r.antichain_formula.to_string(),
        tree_size: r.tree_size,
        max_antichain: r.max_antichain,
        candidates: r.candidates,
        agrees: r.passed,
    };
    match format {
        Format::Json => {
            let body = json!({"config": config, "rows": [row]});
            emit(out, &json!({"report": body, "digest": content_digest(&body)}))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&row).map_err(|e| Failure::Io(e.to_string()))?;
            let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
            write_out(out, &String::from_utf8(bytes).expect("utf-8"))
        }
    }
}
