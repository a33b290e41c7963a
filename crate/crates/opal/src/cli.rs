//! The `opal` command line. Each command parses its arguments, reads its
//! files, calls into the engine and writes the result.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use opal_core::analyzer::analyze_source;
use opal_core::config::{BackendKind, PlannerKind};
use opal_core::db::diff;
use opal_core::engine::task_mock;
use opal_core::eval::{score_instance, TaskInstance};
use opal_core::feedback::{render_feedback, Feedback};
use opal_core::observer::analyze_schema;
use opal_core::plan::{parse, typecheck};
use opal_core::planner::{infer_task_type, SessionEvent};
use opal_core::Database;

use crate::bench::run_bench;
use crate::config::{resolve, Layer, Settings};
use crate::format::{from_jsonl, load_database, save_diff};
use crate::instance::{load_instance, read, InstanceMeta};
use crate::run::{run_loaded, Artifacts};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
/// The planner found no acceptable plan, or the analyzer rejected one.
pub const EXIT_REJECTED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "opal",
    version,
    about = "Update relational databases from text documents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_backend(s: &str) -> Result<BackendKind, String> {
    BackendKind::parse(s)
        .ok_or_else(|| format!("unknown backend `{s}` (expected mock, rules or remote)"))
}

fn parse_planner(s: &str) -> Result<PlannerKind, String> {
    match s {
        "template" => Ok(PlannerKind::Template),
        "llm" => Ok(PlannerKind::Llm),
        _ => Err(format!("unknown planner `{s}` (expected template or llm)")),
    }
}

#[derive(Args, Debug, Default)]
struct EngineFlags {
    /// Extraction backend: mock, rules or remote.
    #[arg(long, value_parser = parse_backend)]
    backend: Option<BackendKind>,
    /// Plan source: template or llm.
    #[arg(long, value_parser = parse_planner)]
    planner: Option<PlannerKind>,
    /// Fixture map (.json) or recorded trace (.jsonl) for the mock backend.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[arg(long)]
    max_revisions: Option<u32>,
    #[arg(long)]
    max_restarts: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instances run at once by `bench`.
    #[arg(long)]
    parallel: Option<usize>,
    /// Wall-clock budget per execution, in seconds.
    #[arg(long)]
    timeout: Option<u64>,
}

impl EngineFlags {
    fn layer(&self) -> Layer {
        Layer {
            backend: self.backend,
            planner: self.planner,
            fixtures_path: self.fixtures.as_ref().map(|p| p.display().to_string()),
            max_revisions: self.max_revisions,
            max_restarts: self.max_restarts,
            seed: self.seed,
            parallelism: self.parallel,
            exec_timeout_s: self.timeout,
            ..Layer::default()
        }
    }

    fn settings(&self, env: &dyn Fn(&str) -> Option<String>) -> Result<Settings, String> {
        let file = self
            .config
            .as_deref()
            .map(Layer::from_file)
            .transpose()
            .map_err(|e| e.to_string())?;
        resolve(Layer::from_env(env), file, self.layer())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one instance directory and write after.json, diff.json,
    /// session.jsonl and trace.jsonl.
    Run {
        instance: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
        #[arg(long, default_value = "opal-out")]
        out_dir: PathBuf,
        /// Answer planner prompts from a recorded session.jsonl.
        #[arg(long)]
        replay_session: Option<PathBuf>,
    },
    /// Score a predicted database against a gold one.
    Eval {
        pred: PathBuf,
        gold: PathBuf,
        before: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the cells `b` adds to `a`.
    Diff { a: PathBuf, b: PathBuf },
    /// Print the observer's summary of a database.
    Observe {
        db: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Check a plan against a database; with an instruction, also run it
    /// on a mock of the task.
    Analyze {
        plan: PathBuf,
        db: PathBuf,
        #[arg(long)]
        instruction: Option<String>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Run every instance of a manifest and write the report.
    Bench {
        manifest: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
        #[arg(long, default_value = "opal-out")]
        out_dir: PathBuf,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "opal: {message}");
        code
    }
}

fn load_db(path: &Path) -> Result<Database, String> {
    let bytes = read(path).map_err(|e| e.to_string())?;
    load_database(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the command line `args` (program name first). `env` reads
/// environment variables. Returns the exit status.
pub fn run_cli(
    args: impl IntoIterator<Item = String>,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_REJECTED
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                io.err.write_all(text.as_bytes())
            } else {
                io.out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run {
            instance,
            engine,
            out_dir,
            replay_session,
        } => cmd_run(
            &mut io,
            &instance,
            &engine,
            &out_dir,
            replay_session.as_deref(),
            env,
        ),
        Command::Eval {
            pred,
            gold,
            before,
            json,
        } => cmd_eval(&mut io, &pred, &gold, &before, json),
        Command::Diff { a, b } => cmd_diff(&mut io, &a, &b),
        Command::Observe { db, json, engine } => cmd_observe(&mut io, &db, json, &engine, env),
        Command::Analyze {
            plan,
            db,
            instruction,
            json,
            engine,
        } => cmd_analyze(
            &mut io,
            &plan,
            &db,
            instruction.as_deref(),
            json,
            &engine,
            env,
        ),
        Command::Bench {
            manifest,
            engine,
            out_dir,
        } => cmd_bench(&mut io, &manifest, &engine, &out_dir, env),
    };
    match result {
        Ok(code) => code,
        Err(message) => io.fail(EXIT_IO, message),
    }
}

fn cmd_run(
    io: &mut Io,
    dir: &Path,
    flags: &EngineFlags,
    out_dir: &Path,
    replay: Option<&Path>,
    env: &dyn Fn(&str) -> Option<String>,
) -> Result<i32, String> {
    let settings = flags.settings(env)?;
    let li = load_instance(dir, InstanceMeta::default()).map_err(|e| e.to_string())?;
    let replay = match replay {
        Some(p) => {
            let bytes = read(p).map_err(|e| e.to_string())?;
            let text = String::from_utf8_lossy(&bytes);
            Some(from_jsonl::<SessionEvent>(&text).map_err(|e| format!("{}: {e}", p.display()))?)
        }
        None => None,
    };
    let run = run_loaded(&li, &settings, replay.as_deref())?;
    Artifacts::of(&run)
        .write(out_dir)
        .map_err(|e| format!("{}: {e}", out_dir.display()))?;
    match &run.result {
        Ok(o) => {
            let _ = writeln!(
                io.out,
                "{}: {} change(s) after {} generation(s); artifacts in {}",
                li.instance.id,
                o.diff.len(),
                o.generations,
                out_dir.display()
            );
            Ok(EXIT_OK)
        }
        Err(report) => {
            let mut msg = report.message();
            if !report.last_feedback.is_empty() {
                msg.push('\n');
                msg.push_str(render_feedback(&report.last_feedback).trim_end());
            }
            Ok(io.fail(EXIT_REJECTED, msg))
        }
    }
}

fn cmd_eval(
    io: &mut Io,
    pred: &Path,
    gold: &Path,
    before: &Path,
    json: bool,
) -> Result<i32, String> {
    let before = load_db(before)?;
    let predicted =
        diff(&before, &load_db(pred)?).map_err(|e| format!("{}: {e}", pred.display()))?;
    let gold_diff =
        diff(&before, &load_db(gold)?).map_err(|e| format!("{}: {e}", gold.display()))?;
    let s = score_instance(&predicted, &gold_diff);
    if json {
        let _ = writeln!(
            io.out,
            "{}",
            serde_json::to_string(&s).map_err(|e| e.to_string())?
        );
    } else {
        let _ = writeln!(
            io.out,
            "precision {:.4}  recall {:.4}  F1 {:.4}  ({} matched, {} predicted, {} gold)",
            s.precision, s.recall, s.f1, s.matched, s.predicted, s.gold
        );
    }
    Ok(EXIT_OK)
}

fn cmd_diff(io: &mut Io, a: &Path, b: &Path) -> Result<i32, String> {
    let d = diff(&load_db(a)?, &load_db(b)?).map_err(|e| format!("{}: {e}", b.display()))?;
    let _ = io.out.write_all(save_diff(&d).as_bytes());
    Ok(EXIT_OK)
}

fn cmd_observe(
    io: &mut Io,
    db: &Path,
    json: bool,
    flags: &EngineFlags,
    env: &dyn Fn(&str) -> Option<String>,
) -> Result<i32, String> {
    let settings = flags.settings(env)?;
    let obs = analyze_schema(&load_db(db)?, settings.engine.categorical_k);
    if json {
        let _ = writeln!(
            io.out,
            "{}",
            serde_json::to_string_pretty(&obs).map_err(|e| e.to_string())?
        );
    } else {
        let _ = writeln!(io.out, "{obs}");
    }
    Ok(EXIT_OK)
}

fn cmd_analyze(
    io: &mut Io,
    plan: &Path,
    db_path: &Path,
    instruction: Option<&str>,
    json: bool,
    flags: &EngineFlags,
    env: &dyn Fn(&str) -> Option<String>,
) -> Result<i32, String> {
    let settings = flags.settings(env)?;
    let db = load_db(db_path)?;
    let source = String::from_utf8(read(plan).map_err(|e| e.to_string())?)
        .map_err(|_| format!("{}: not UTF-8", plan.display()))?;
    let obs = analyze_schema(&db, settings.engine.categorical_k);
    let mock = instruction.and_then(|i| {
        let inst = TaskInstance {
            id: "analyze".into(),
            instruction: i.into(),
            documents: Vec::new(),
            db_before: db.clone(),
            db_gold: None,
            task_type: infer_task_type(i),
            domain: String::new(),
        };
        task_mock(&inst, &settings.engine)
    });
    let findings: Vec<Feedback> = match &mock {
        Some(m) => analyze_source(&source, &db, &obs, m, &settings.engine).1,
        None => match parse(&source) {
            Ok(p) => typecheck(&p, &db)
                .iter()
                .filter(|d| d.is_error())
                .map(Feedback::from_diagnostic)
                .collect(),
            Err(diags) => diags.iter().map(Feedback::from_diagnostic).collect(),
        },
    };
    if json {
        let _ = writeln!(
            io.out,
            "{}",
            serde_json::to_string_pretty(&findings).map_err(|e| e.to_string())?
        );
    } else if findings.is_empty() {
        let _ = writeln!(io.out, "no findings");
    } else {
        let _ = io.out.write_all(render_feedback(&findings).as_bytes());
    }
    Ok(if findings.is_empty() {
        EXIT_OK
    } else {
        EXIT_REJECTED
    })
}

fn cmd_bench(
    io: &mut Io,
    manifest: &Path,
    flags: &EngineFlags,
    out_dir: &Path,
    env: &dyn Fn(&str) -> Option<String>,
) -> Result<i32, String> {
    let settings = flags.settings(env)?;
    let outcome = run_bench(manifest, &settings, Some(out_dir))?;
    let _ = writeln!(io.out, "{}", outcome.report);
    for r in outcome.report.failures() {
        let _ = writeln!(
            io.err,
            "opal: {}: {}",
            r.id,
            r.error.as_deref().unwrap_or_default()
        );
    }
    for e in &outcome.load_errors {
        let _ = writeln!(io.err, "opal: {e}");
    }
    Ok(if outcome.load_errors.is_empty() {
        EXIT_OK
    } else {
        EXIT_IO
    })
}
