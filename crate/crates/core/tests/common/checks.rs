//! Whole-pipeline measurements shared by the pipeline tests and the
//! acceptance target.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use opal_core::analyzer::analyze_source;
use opal_core::config::PlannerKind;
use opal_core::engine::{run_instance, task_mock, EngineRun};
use opal_core::eval::{evaluate, BenchmarkReport, TaskInstance};
use opal_core::observer::analyze_schema;
use opal_core::planner::{infer_intent, template_source, CompletionClient, CompletionError};
use opal_core::tools::{
    Args, ExtractionBackend, FrozenClock, MockBackend, Tool, ToolContext, ToolError, Value,
};
use opal_core::EngineConfig;
use rand::Rng;

use super::faults::{fault_corpus, FaultClass};
use super::gen::rng;
use super::golden::{golden_suite, Golden};

pub fn run_golden(g: &Golden, backend: &dyn ExtractionBackend) -> EngineRun {
    run_instance(
        &g.instance,
        &EngineConfig::default(),
        backend,
        &FrozenClock,
        None,
    )
}

/// Macro-F1 of the golden suite through the template planner and mock
/// backend, and the wall time it took.
pub fn golden_macro_f1() -> (f64, usize, Duration) {
    let start = Instant::now();
    let suite = golden_suite();
    let results = suite
        .iter()
        .map(|g| {
            evaluate(
                &g.instance,
                run_golden(g, &MockBackend::new(g.fixtures.clone())).diff(),
            )
        })
        .collect();
    let report = BenchmarkReport::from_results(results);
    (
        report.overall().unwrap_or(0.0),
        suite.len(),
        start.elapsed(),
    )
}

#[derive(Debug, Default)]
pub struct FaultStats {
    /// (reported, total) per planted class
    pub syntax: (usize, usize),
    pub logic: (usize, usize),
    pub integrity: (usize, usize),
    /// clean plans and the findings raised on them
    pub clean: (usize, usize),
}

pub fn fault_detection() -> FaultStats {
    let cfg = EngineConfig::default();
    let mut s = FaultStats::default();
    for p in fault_corpus() {
        let db = &p.instance.db_before;
        let mock = task_mock(&p.instance, &cfg).expect("mock for a golden instance");
        let (_, findings) = analyze_source(
            &p.source,
            db,
            &analyze_schema(db, cfg.categorical_k),
            &mock,
            &cfg,
        );
        let slot = match p.class {
            FaultClass::Syntax => &mut s.syntax,
            FaultClass::Logic => &mut s.logic,
            FaultClass::Integrity => &mut s.integrity,
            FaultClass::Clean => {
                s.clean.0 += 1;
                s.clean.1 += findings.len();
                continue;
            }
        };
        slot.1 += 1;
        slot.0 += usize::from(!findings.is_empty());
    }
    s
}

/// Replies with `bad` for the first `bad_replies` prompts and `good`
/// afterwards, counting prompts.
pub struct StubClient {
    pub calls: u32,
    pub bad_replies: u32,
    pub good: String,
}

pub const BAD_REPLY: &str = "```plan\nlet x = NER(text=\n```";

impl CompletionClient for StubClient {
    fn complete(&mut self, _prompt: &str) -> Result<String, CompletionError> {
        self.calls += 1;
        Ok(if self.calls <= self.bad_replies {
            BAD_REPLY.into()
        } else {
            format!("```plan\n{}\n```", self.good)
        })
    }
}

pub fn template_for(inst: &TaskInstance) -> String {
    template_source(
        &infer_intent(&inst.instruction, &inst.db_before).unwrap(),
        &inst.db_before,
    )
    .unwrap()
}

/// Prompts sent and the run, for a stub that fails `bad_replies` times.
pub fn budget_run(bad_replies: u32) -> (u32, EngineRun) {
    let g = &golden_suite()[0];
    let cfg = EngineConfig {
        planner: PlannerKind::Llm,
        ..EngineConfig::default()
    };
    let mut stub = StubClient {
        calls: 0,
        bad_replies,
        good: template_for(&g.instance),
    };
    let run = run_instance(
        &g.instance,
        &cfg,
        &MockBackend::new(g.fixtures.clone()),
        &FrozenClock,
        Some(&mut stub),
    );
    (stub.calls, run)
}

/// Wraps a backend and fails extraction calls from the `fail_at`-th on
/// (counting from 0), or only that one call when `once`.
pub struct FaultyBackend<'a> {
    pub inner: &'a dyn ExtractionBackend,
    pub fail_at: usize,
    pub once: bool,
    pub calls: AtomicUsize,
}

impl<'a> FaultyBackend<'a> {
    pub fn new(inner: &'a dyn ExtractionBackend, fail_at: usize, once: bool) -> Self {
        Self {
            inner,
            fail_at,
            once,
            calls: AtomicUsize::new(0),
        }
    }
}

impl ExtractionBackend for FaultyBackend<'_> {
    fn name(&self) -> &str {
        "faulty"
    }

    fn extract(&self, tool: Tool, args: &Args, ctx: &ToolContext) -> Result<Value, ToolError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n == self.fail_at || (!self.once && n > self.fail_at) {
            return Err(ToolError::BackendUnavailable(format!(
                "injected failure at call {n}"
            )));
        }
        self.inner.extract(tool, args, ctx)
    }
}

#[derive(Debug, Default)]
pub struct AtomicityStats {
    pub runs: usize,
    /// runs whose failed execution left a database differing from the input
    pub leaked: Vec<String>,
}

/// Runs golden instances with a backend failure injected at a random
/// extraction call. A single-attempt run must fail and leave the input
/// untouched; a run that retries must end exactly where an uninterrupted
/// run ends.
pub fn atomicity(runs: usize, seed: u64) -> AtomicityStats {
    let suite = golden_suite();
    let mut r = rng(seed);
    let mut stats = AtomicityStats::default();
    for i in 0..runs {
        let g = &suite[r.random_range(0..suite.len())];
        let mock = MockBackend::new(g.fixtures.clone());
        let counter = FaultyBackend::new(&mock, usize::MAX, true);
        let clean = run_golden(g, &counter).result.expect("golden run");
        let total = counter.calls.load(Ordering::SeqCst);
        let fail_at = r.random_range(0..total);
        let snapshot = format!("{:?}", g.instance.db_before);
        stats.runs += 1;
        if i % 2 == 0 {
            let faulty = FaultyBackend::new(&mock, fail_at, false);
            let run = run_golden(g, &faulty);
            let out = match &run.result {
                Ok(o) => format!("{:?}", o.database),
                Err(_) => format!("{:?}", g.instance.db_before),
            };
            if run.result.is_ok() || out != snapshot {
                stats
                    .leaked
                    .push(format!("{} failing from call {fail_at}", g.instance.id));
            }
        } else {
            let faulty = FaultyBackend::new(&mock, fail_at, true);
            let cfg = EngineConfig {
                planner: PlannerKind::Llm,
                ..EngineConfig::default()
            };
            let mut stub = StubClient {
                calls: 0,
                bad_replies: 0,
                good: template_for(&g.instance),
            };
            let run = run_instance(&g.instance, &cfg, &faulty, &FrozenClock, Some(&mut stub));
            match run.result {
                Ok(o)
                    if format!("{:?}", o.database) == format!("{:?}", clean.database)
                        && o.diff == clean.diff => {}
                other => stats.leaked.push(format!(
                    "{} with call {fail_at} failing once: {:?}",
                    g.instance.id,
                    other.map(|o| o.diff)
                )),
            }
        }
        if format!("{:?}", g.instance.db_before) != snapshot {
            stats
                .leaked
                .push(format!("{}: input database changed", g.instance.id));
        }
    }
    stats
}
