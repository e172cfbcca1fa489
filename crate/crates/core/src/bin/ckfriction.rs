use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ckfriction::random;
use ckfriction::scenario::{
    self, AlgorithmChoice, FrameDoc, Model, ProbFrameDoc, QueryDoc, RunOptions, Scenario, Source,
};

#[derive(Parser)]
#[command(name = "ckfriction", version, about = "Check knowledge queries on finite frames and attack games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the queries of a scenario file and compare them with their expectations.
    Check {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmChoice::Both)]
        algorithm: AlgorithmChoice,
        /// Largest number of histories or strategy profiles to enumerate.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u128,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// 0 silent, 1 summary on stderr, 2 summary plus failing results.
        #[arg(long, default_value_t = 1)]
        verbosity: u8,
    },
    /// Write random scenarios, one file per seed offset, or a JSON array to stdout.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = GenKind::Frame)]
        kind: GenKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the built-in fixtures and shipped scenarios into a directory.
    Examples {
        #[arg(long, default_value = "examples")]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Frame,
    ProbFrame,
    Bdtf,
    Game,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("ckfriction: {msg}");
    ExitCode::from(code)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text)
}

fn check(path: &Path, opts: RunOptions, out: Option<PathBuf>, verbosity: u8) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(3, format!("{}: {e}", path.display())),
    };
    let report = match scenario::parse_scenario(&text).and_then(|s| scenario::run_scenario(&s, &opts)) {
        Ok(r) => r,
        Err(e) => return fail(e.exit_code() as u8, e),
    };
    let written = match &out {
        Some(p) => write_json(p, &report),
        None => {
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(3, e);
    }
    if verbosity >= 1 {
        eprint!("{}", report.summary());
    }
    if verbosity >= 2 {
        for q in report.queries.iter().filter(|q| q.matched == Some(false)) {
            eprintln!("{} returned {}", q.op, q.result);
        }
    }
    if report.all_matched() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn generated(kind: GenKind, seed: u64) -> Scenario {
    let mut r = random::rng(seed);
    let q = |op: &str, args: serde_json::Value| QueryDoc { op: op.into(), args, expect: None };
    let (model, queries) = match kind {
        GenKind::Frame => {
            let f = random::random_frame(&mut r, random::FrameBounds::default());
            let everyone = f.player_labels().to_vec();
            let model = Model::Frame { frame: Source::Inline(FrameDoc::from_frame(&f)) };
            let first = &everyone[0];
            (
                model,
                vec![
                    q("knows", serde_json::json!({"player": first, "event": {"ref": "target"}})),
                    q("ck_traditional", serde_json::json!({"players": everyone, "event": {"ref": "target"}})),
                ],
            )
        }
        GenKind::ProbFrame => {
            let pf = random::random_prob_frame(&mut r);
            let first = pf.frame().player_labels()[0].clone();
            let history = pf.frame().history_labels()[0].clone();
            (
                Model::Agreement { prob_frame: Source::Inline(ProbFrameDoc::from_prob_frame(&pf)) },
                vec![q(
                    "posterior",
                    serde_json::json!({"player": first, "event": {"histories": [history.clone()]},
                                       "history": history, "time": 0}),
                )],
            )
        }
        GenKind::Bdtf => {
            let spec = random::random_single_dim_spec(&mut r, 4, 5, 24, true);
            (Model::Bdtf { spec: Source::Inline(spec) }, Vec::new())
        }
        GenKind::Game => {
            let game = random::random_tiny_game(&mut r);
            (
                Model::AttackGame { game: Source::Inline(game) },
                vec![q("sck", serde_json::Value::Null), q("frontier", serde_json::Value::Null)],
            )
        }
    };
    let mut events = BTreeMap::new();
    if matches!(kind, GenKind::Frame) {
        events.insert("target".into(), scenario::EventExpr::Times { from: 1, to: None });
    }
    Scenario { model, events, queries }
}

fn generate(seed: u64, count: usize, kind: GenKind, out: Option<PathBuf>) -> ExitCode {
    let all: Vec<Scenario> = (0..count as u64).map(|k| generated(kind, seed + k)).collect();
    let result = match out {
        Some(dir) => fs::create_dir_all(&dir).and_then(|_| {
            all.iter()
                .enumerate()
                .try_for_each(|(k, s)| write_json(&dir.join(format!("generated_{}.json", seed + k as u64)), s))
        }),
        None => {
            println!("{}", serde_json::to_string_pretty(&all).expect("serializable"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(3, e),
    }
}

fn examples(dir: &Path) -> ExitCode {
    let fixtures = match scenario::fixture_scenarios() {
        Ok(f) => f,
        Err(e) => return fail(3, e),
    };
    let result = fs::create_dir_all(dir).and_then(|_| {
        for (name, s) in &fixtures {
            write_json(&dir.join(format!("{name}.json")), s)?;
        }
        for (name, text) in scenario::SHIPPED {
            fs::write(dir.join(format!("{name}.json")), text)?;
        }
        Ok(())
    });
    match result {
        Ok(()) => {
            eprintln!("wrote {} files to {}", fixtures.len() + scenario::SHIPPED.len(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(3, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { scenario, algorithm, cap, out, verbosity } => {
            check(&scenario, RunOptions { algorithm, cap }, out, verbosity)
        }
        Command::Generate { seed, count, kind, out } => generate(seed, count, kind, out),
        Command::Examples { dir } => examples(&dir),
    }
}
