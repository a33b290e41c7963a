//! One instance through the engine, with its artifacts.

use std::io;
use std::path::Path;

use opal_core::config::{BackendKind, PlannerKind};
use opal_core::engine::{run_instance, EngineRun};
use opal_core::planner::{CompletionClient, ReplayClient, SessionEvent};
use opal_core::tools::{
    Clock, ExtractionBackend, FixtureSet, FrozenClock, MockBackend, RuleBackend,
};

use crate::config::Settings;
use crate::format::{load_fixtures_or_trace, save_database, save_diff, to_jsonl};
use crate::instance::{read, LoadedInstance};
use crate::remote::{HttpCompletionClient, RemoteBackend};
use crate::{write_atomic, SystemClock};

/// The configured extraction backend. The mock backend reads the
/// configured fixtures file (a fixture map or a recorded trace), else
/// the fixtures stored with the instance.
pub fn make_backend(
    settings: &Settings,
    instance_fixtures: Option<&FixtureSet>,
) -> Result<Box<dyn ExtractionBackend>, String> {
    match settings.engine.backend {
        BackendKind::Rules => Ok(Box::new(RuleBackend)),
        BackendKind::Remote => Ok(Box::new(RemoteBackend::new(&settings.remote)?)),
        BackendKind::Mock => {
            let fixtures = match &settings.engine.fixtures_path {
                Some(p) => {
                    let path = Path::new(p);
                    let bytes = read(path).map_err(|e| e.to_string())?;
                    load_fixtures_or_trace(path, &bytes).map_err(|e| format!("{p}: {e}"))?
                }
                None => instance_fixtures.cloned().ok_or(
                    "the mock backend needs fixtures: pass --fixtures or add fixtures.json",
                )?,
            };
            Ok(Box::new(MockBackend::new(fixtures)))
        }
    }
}

/// Local backends answer instantly, so their runs use a frozen clock and
/// their traces stay byte-identical across runs.
pub fn clock_for(settings: &Settings) -> &'static dyn Clock {
    match settings.engine.backend {
        BackendKind::Remote => &SystemClock,
        BackendKind::Mock | BackendKind::Rules => &FrozenClock,
    }
}

/// The planner's completion client: replies from a recorded session when
/// one is given, else the remote endpoint.
pub fn completion_client(
    settings: &Settings,
    replay: Option<&[SessionEvent]>,
) -> Result<Box<dyn CompletionClient>, String> {
    match replay {
        Some(events) => Ok(Box::new(ReplayClient::from_session(events))),
        None => Ok(Box::new(HttpCompletionClient::new(&settings.remote)?)),
    }
}

/// Runs one loaded instance. Setup problems (no fixtures, no endpoint) are
/// errors; planning failures are part of the returned run.
pub fn run_loaded(
    li: &LoadedInstance,
    settings: &Settings,
    replay: Option<&[SessionEvent]>,
) -> Result<EngineRun, String> {
    let backend = make_backend(settings, li.fixtures.as_ref())?;
    let mut client = match settings.engine.planner {
        PlannerKind::Llm => Some(completion_client(settings, replay)?),
        PlannerKind::Template => None,
    };
    let client = client
        .as_deref_mut()
        .map(|c| c as &mut dyn CompletionClient);
    Ok(run_instance(
        &li.instance,
        &settings.engine,
        backend.as_ref(),
        clock_for(settings),
        client,
    ))
}

/// File contents of a run: `after.json` and `diff.json` exist only when
/// the run produced a database.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub after: Option<String>,
    pub diff: Option<String>,
    pub session: String,
    pub trace: String,
}

impl Artifacts {
    pub fn of(run: &EngineRun) -> Self {
        let (after, diff) = match &run.result {
            Ok(o) => (Some(save_database(&o.database)), Some(save_diff(&o.diff))),
            Err(_) => (None, None),
        };
        Self {
            after,
            diff,
            session: to_jsonl(&run.session),
            trace: to_jsonl(&run.trace.events),
        }
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        if let Some(a) = &self.after {
            write_atomic(&dir.join("after.json"), a.as_bytes())?;
        }
        if let Some(d) = &self.diff {
            write_atomic(&dir.join("diff.json"), d.as_bytes())?;
        }
        write_atomic(&dir.join("session.jsonl"), self.session.as_bytes())?;
        write_atomic(&dir.join("trace.jsonl"), self.trace.as_bytes())
    }
}
