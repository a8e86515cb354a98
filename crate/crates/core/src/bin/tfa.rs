use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tfa_estimate::differential::{differential_check, DifferentialConfig};
use tfa_estimate::estimate::{estimate, BeliefState, EstimateError};
use tfa_estimate::observer::{default_horizon, OfflineObserver};
use tfa_estimate::oracle::{brute_consistent_states, GridConfig};
use tfa_estimate::random::RandomModelConfig;
use tfa_estimate::reach::t_reachable;
use tfa_estimate::zones::build_zones;
use tfa_estimate::{Label, TimePoint, TimedObservation, Tfa, ZoneAutomaton};

const OK: u8 = 0;
const EMPTY: u8 = 1;
const INVALID: u8 = 2;
const USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "tfa", version, about = "State estimation for partially observed one-clock timed automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document
    Validate {
        model: PathBuf,
        #[arg(long)]
        require_ro: bool,
    },
    /// List the zones of each state
    Zones {
        model: PathBuf,
        #[arg(long)]
        state: Option<String>,
    },
    /// Summarize the zone automaton, optionally writing Graphviz
    Za {
        model: PathBuf,
        /// `-` for stdout
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Can `to` be occupied exactly `duration` after `from`?
    Reach {
        model: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        duration: TimePoint,
    },
    /// States consistent with a timed observation
    Estimate {
        model: PathBuf,
        /// `e@t` pairs separated by commas
        #[arg(long, default_value = "")]
        obs: String,
        #[arg(long)]
        time: TimePoint,
        #[arg(long)]
        json: bool,
    },
    /// Read `obs <e> <t>`, `query <t>` and `quit` lines from stdin
    Watch {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Precompute the offline observer and write it as JSON
    Observer {
        model: PathBuf,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Consistent states by brute force on a time grid
    Oracle {
        model: PathBuf,
        #[arg(long, default_value = "0.5")]
        grid: TimePoint,
        #[arg(long, default_value = "")]
        obs: String,
        #[arg(long)]
        time: TimePoint,
    },
    /// Differential check of the estimator against the oracle on random models
    Fuzz {
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "0.5")]
        grid: TimePoint,
        #[arg(long, default_value = "5")]
        horizon: TimePoint,
        /// Report file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure(u8, String);

type Outcome = Result<u8, Failure>;

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(INVALID, e.to_string())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure(USAGE, e.to_string())
}

fn load(path: &Path) -> Result<Tfa, Failure> {
    Tfa::load(path).map_err(invalid)
}

fn load_with_za(path: &Path) -> Result<(Tfa, ZoneAutomaton), Failure> {
    let model = load(path)?;
    let za = ZoneAutomaton::build(&model).map_err(invalid)?;
    Ok((model, za))
}

fn estimate_error(e: EstimateError) -> Failure {
    match e {
        EstimateError::NotRo(_) => invalid(e),
        _ => usage(e),
    }
}

fn state(model: &Tfa, name: &str) -> Result<tfa_estimate::StateId, Failure> {
    model.state_id(name).ok_or_else(|| usage(format!("unknown state `{name}`")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { model, require_ro } => {
            let text = fs::read_to_string(&model).map_err(|e| invalid(format!("cannot read model: {e}")))?;
            let doc = serde_json::from_str(&text).map_err(|e| invalid(format!("malformed model document: {e}")))?;
            let diags = match Tfa::from_document(&doc) {
                Ok(m) => m.validate(require_ro),
                Err(tfa_estimate::ModelError::Invalid(d)) => d,
                Err(e) => return Err(invalid(e)),
            };
            if diags.is_empty() {
                println!("ok");
                Ok(OK)
            } else {
                for d in &diags {
                    println!("{d}");
                }
                Ok(INVALID)
            }
        }
        Command::Zones { model, state: only } => {
            let model = load(&model)?;
            let states: Vec<_> = match only {
                Some(name) => vec![state(&model, &name)?],
                None => model.states().collect(),
            };
            for x in states {
                let zones: Vec<String> = build_zones(&model, x).iter().map(|z| z.to_string()).collect();
                println!("{}: {}", model.state_name(x), zones.join(" "));
            }
            Ok(OK)
        }
        Command::Za { model, dot } => {
            let (model, za) = load_with_za(&model)?;
            let taus = za.edges().iter().filter(|e| e.label == Label::Tau).count();
            println!("{} extended states", za.node_count());
            println!("{} edges ({} tau, {} event)", za.edges().len(), taus, za.edges().len() - taus);
            let initial: Vec<String> = za.initial().iter().map(|&v| za.display(&model, v).to_string()).collect();
            println!("initial: {}", initial.join(" "));
            match dot {
                Some(p) if p.as_os_str() == "-" => print!("{}", za.to_dot(&model)),
                Some(p) => fs::write(&p, za.to_dot(&model)).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => {}
            }
            Ok(OK)
        }
        Command::Reach { model, from, to, duration } => {
            let (model, za) = load_with_za(&model)?;
            let (x, y) = (state(&model, &from)?, state(&model, &to)?);
            match t_reachable(&za, &model, x, y, duration) {
                Some(r) => {
                    println!("yes");
                    println!("witness: {}", r.witness.display(&model));
                    println!("zone path duration range: {}", r.path.duration_range(&za));
                }
                None => println!("no"),
            }
            Ok(OK)
        }
        Command::Estimate { model, obs, time, json } => {
            let (model, za) = load_with_za(&model)?;
            let obs = TimedObservation::parse(&model, &obs, time).map_err(usage)?;
            let est = estimate(&za, &model, &obs).map_err(estimate_error)?;
            if json {
                println!("{}", est.to_json(&za, &model));
            } else {
                println!("{}", est.render(&model));
            }
            Ok(if est.is_empty() { EMPTY } else { OK })
        }
        Command::Watch { model, json } => {
            let (model, za) = load_with_za(&model)?;
            watch(&model, &za, json)
        }
        Command::Observer { model, horizon, out } => {
            let (model, za) = load_with_za(&model)?;
            let horizon = horizon.unwrap_or_else(|| default_horizon(&za, &model));
            let obs = OfflineObserver::build(&za, &model, horizon).map_err(invalid)?;
            let text = serde_json::to_string_pretty(&obs.to_json(&za, &model)).expect("json values serialize");
            fs::write(&out, text + "\n").map_err(|e| usage(format!("{}: {e}", out.display())))?;
            println!("{} observer states, horizon {}", obs.state_count(), obs.horizon());
            Ok(OK)
        }
        Command::Oracle { model, grid, obs, time } => {
            let model = load(&model)?;
            let obs = TimedObservation::parse(&model, &obs, time).map_err(usage)?;
            let grid = GridConfig::new(grid, time, usize::MAX).map_err(usage)?;
            let states = brute_consistent_states(&model, &grid, &obs).map_err(usage)?;
            let mut names: Vec<&str> = states.iter().map(|&x| model.state_name(x)).collect();
            names.sort_unstable();
            println!("{}", if names.is_empty() { "(none)".to_string() } else { names.join(" ") });
            Ok(if names.is_empty() { EMPTY } else { OK })
        }
        Command::Fuzz { states, trials, seed, grid, horizon, out } => {
            let config = DifferentialConfig {
                model: RandomModelConfig { state_count: states, seed, ..Default::default() },
                grid: GridConfig::new(grid, horizon, 6).map_err(usage)?,
                trials,
                ..Default::default()
            };
            let report = differential_check(&config);
            match out {
                Some(p) => fs::write(&p, report.to_jsonl()).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => print!("{}", report.to_jsonl()),
            }
            eprintln!(
                "{} models, {} runs, {} checks, {} mismatches, {} soundness violations",
                report.models,
                report.runs,
                report.entries.len(),
                report.mismatches(),
                report.soundness_violations()
            );
            Ok(if report.mismatches() == 0 { OK } else { EMPTY })
        }
    }
}

fn watch(model: &Tfa, za: &ZoneAutomaton, json: bool) -> Outcome {
    let mut belief = BeliefState::init(za, model).map_err(estimate_error)?;
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    for line in stdin.lock().lines() {
        let line = line.map_err(usage)?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let result = match words.as_slice() {
            [] => Ok(None),
            ["quit"] => break,
            ["obs", e, t] => {
                let e = model.event_id(e).ok_or_else(|| format!("unknown event `{e}`"));
                let t = t.parse::<TimePoint>().map_err(|err| err.to_string());
                e.and_then(|e| t.map(|t| (e, t)))
                    .and_then(|(e, t)| belief.advance(za, model, e, t).map_err(|err| err.to_string()))
                    .map(|b| {
                        belief = b;
                        None
                    })
            }
            ["query", t] => t
                .parse::<TimePoint>()
                .map_err(|err| err.to_string())
                .and_then(|t| belief.query(za, model, t).map_err(|err| err.to_string()))
                .map(|est| Some(if json { est.to_json(za, model).to_string() } else { est.render(model) })),
            _ => Err(format!("cannot parse `{line}` (expected `obs <e> <t>`, `query <t>` or `quit`)")),
        };
        match result {
            Ok(Some(text)) => {
                let _ = writeln!(stdout, "{text}");
            }
            Ok(None) => {}
            Err(msg) => eprintln!("error: {msg}"),
        }
        let _ = stdout.flush();
    }
    Ok(OK)
}
