use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use squarebraid::hnn::{s_graph, verify_theorem};
use squarebraid::presentation::{raw_presentation, Presentation, Stage};
use squarebraid::report::{self, GRID_SET};
use squarebraid::tietze::{reorganize_q3, replay, run_pipeline, MoveLog};
use squarebraid::Result;

#[derive(Parser)]
#[command(name = "squarebraid", version, about = "Hard-square configuration spaces on grids and their braid groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Raw,
    S1,
    S2,
    S3,
    Final,
    Q3,
    Abcd,
}

#[derive(Subcommand)]
enum Command {
    /// f-vector of the configuration complex, optionally with its cells.
    Complex {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cells: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Integer homology of the configuration complex.
    Homology {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        /// Defaults to pq - 2.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Critical cell census of the discrete gradient field at pq - 2 squares.
    Morse {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Prints a presentation in the plain-text format.
    Present {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "final")]
        stage: StageArg,
        /// Write the Tietze move log here.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replays a move log, checking every digest, and prints the result.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The HNN extension over the right-angled Artin group on S_{p-3}.
    Hnn {
        #[arg(long)]
        p: u32,
        #[command(subcommand)]
        action: HnnAction,
    },
    /// Every check for one grid, or for the standard grid set.
    Report {
        #[arg(long, required_unless_present = "all")]
        p: Option<u32>,
        #[arg(long, required_unless_present = "all")]
        q: Option<u32>,
        #[arg(long, conflicts_with_all = ["p", "q"])]
        all: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HnnAction {
    /// Runs the isomorphism certificate.
    Verify {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Prints the vertex graph as an edge list.
    Graph {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| squarebraid::Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => report::to_json_string(v),
        Format::Text => {
            let mut out = String::new();
            if let Value::Object(map) = v {
                for (k, val) in map {
                    out.push_str(&format!("{k}: {val}\n"));
                }
            }
            out
        }
    }
}

fn stage_of(s: StageArg) -> Option<Stage> {
    match s {
        StageArg::Raw => Some(Stage::Raw),
        StageArg::S1 => Some(Stage::S1),
        StageArg::S2 => Some(Stage::S2),
        StageArg::S3 => Some(Stage::S3),
        StageArg::Final => Some(Stage::Final),
        StageArg::Q3 => Some(Stage::Q3),
        StageArg::Abcd => None,
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| squarebraid::Error::Domain(format!("cannot read {}: {e}", path.display())))
}

fn present(p: u32, q: u32, stage: StageArg, log: Option<&PathBuf>, out: Option<&PathBuf>) -> Result<bool> {
    let needs_run = log.is_some() || !matches!(stage, StageArg::Raw | StageArg::Abcd);
    let run = if needs_run { Some(run_pipeline(p, q)?) } else { None };
    if let (Some(path), Some(run)) = (log, &run) {
        emit(&run.log.render(), Some(path))?;
    }
    let pres: Presentation = match stage_of(stage) {
        Some(Stage::Raw) => raw_presentation(p, q)?,
        Some(s) => run
            .as_ref()
            .and_then(|r| r.stage(s).cloned())
            .ok_or_else(|| squarebraid::Error::Domain(format!("stage {s} is not produced for p={p}, q={q}")))?,
        None => {
            if q != 3 {
                return Err(squarebraid::Error::Domain("the abcd presentation exists only for q = 3".into()));
            }
            reorganize_q3(p)?
        }
    };
    emit(&pres.render(), out)?;
    Ok(run.is_none_or(|r| r.all_checks_pass()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Complex { p, q, n, cells, format } => {
            emit(&render(&report::complex_json(p, q, n, cells)?, format), None)?;
            Ok(true)
        }
        Command::Homology { p, q, n, format } => {
            let n = n.unwrap_or((p * q).saturating_sub(2) as usize);
            let v = report::homology_json(p, q, n)?;
            emit(&render(&v, format), None)?;
            Ok(v["match"] != json!(false))
        }
        Command::Morse { p, q, format } => {
            let v = report::morse_json(p, q)?;
            emit(&render(&v, format), None)?;
            Ok(v["match"] == json!(true) && v["acyclic"] == json!(true))
        }
        Command::Present { p, q, stage, log, out } => present(p, q, stage, log.as_ref(), out.as_ref()),
        Command::Replay { log, out } => {
            let parsed = MoveLog::parse(&read(&log)?)?;
            let rep = replay(&parsed)?;
            for s in &rep.stages {
                eprintln!("stage {} digest {}", s.stage, s.digest());
            }
            emit(&rep.presentation.render(), out.as_ref())?;
            Ok(true)
        }
        Command::Hnn { p, action } => match action {
            HnnAction::Verify { format } => {
                let cert = verify_theorem(p)?;
                let text = match format {
                    Format::Json => report::to_json_string(&cert.to_json()),
                    Format::Text => cert.to_text(),
                };
                emit(&text, None)?;
                Ok(cert.pass)
            }
            HnnAction::Graph { out } => {
                let m = p
                    .checked_sub(3)
                    .ok_or_else(|| squarebraid::Error::Domain(format!("p must be at least 3, got {p}")))?;
                emit(&s_graph(m)?.graph.to_edge_list(), out.as_ref())?;
                Ok(true)
            }
        },
        Command::Report { p, q, all, format, out } => {
            let (text, pass) = if all {
                let r = report::report_many(&GRID_SET)?;
                let text = match format {
                    Format::Json => report::to_json_string(&r),
                    Format::Text => r.to_text(),
                };
                (text, r.pass)
            } else {
                let (p, q) = (p.unwrap_or_default(), q.unwrap_or_default());
                let r = report::report_all(p, q)?;
                let text = match format {
                    Format::Json => report::to_json_string(&r),
                    Format::Text => r.to_text(),
                };
                (text, r.pass)
            };
            emit(&text, out.as_ref())?;
            Ok(pass)
        }
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var("SQUAREBRAID_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: could not size thread pool: {e}");
            }
        }
        Err(_) => eprintln!("warning: ignoring SQUAREBRAID_THREADS={raw:?}"),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
