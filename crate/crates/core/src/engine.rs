//! One instance end to end: observe the database, plan, analyze each plan
//! on a mock of the task, execute the first plan that passes.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::analyzer::analyze;
use crate::config::{EngineConfig, PlannerKind};
use crate::db::{Database, DiffTuple};
use crate::eval::TaskInstance;
use crate::executor::{execute, ExecutionTrace};
use crate::feedback::Feedback;
use crate::observer::{
    analyze_schema, column_demonstrations, generate_mock_instance, MockInstance,
};
use crate::plan::typecheck;
use crate::planner::{
    infer_intent, revise_loop, CompletionClient, FailureReport, Limits, LlmPlanner, PlanGenerator,
    PlannerContext, PlannerError, SessionEvent, TemplatePlanner,
};
use crate::tools::{Clock, ExtractionBackend, ToolContext, ToolHub};

/// The database an instance run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub database: Database,
    pub diff: BTreeSet<DiffTuple>,
    pub plan: String,
    pub generations: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineRun {
    pub result: Result<Outcome, FailureReport>,
    pub session: Vec<SessionEvent>,
    /// Every real execution, including the failed ones.
    pub trace: ExecutionTrace,
}

impl EngineRun {
    pub fn diff(&self) -> Result<BTreeSet<DiffTuple>, String> {
        match &self.result {
            Ok(o) => Ok(o.diff.clone()),
            Err(r) => Err(r.message()),
        }
    }
}

/// The mock the analyzer runs plans against, when the instruction is
/// clear enough to build one.
pub fn task_mock(inst: &TaskInstance, config: &EngineConfig) -> Option<MockInstance> {
    let intent = infer_intent(&inst.instruction, &inst.db_before).ok()?;
    generate_mock_instance(
        &inst.db_before,
        intent.task_type,
        &intent.mock_scope(),
        config.seed,
        config.link_threshold,
        config.categorical_k,
    )
    .ok()
}

/// Runs `inst` with extraction answered by `backend`. The template
/// planner gets a single attempt since it ignores feedback; the LLM
/// planner works within the configured revisions and restarts.
pub fn run_instance(
    inst: &TaskInstance,
    config: &EngineConfig,
    backend: &dyn ExtractionBackend,
    clock: &dyn Clock,
    client: Option<&mut dyn CompletionClient>,
) -> EngineRun {
    let db = &inst.db_before;
    let obs = analyze_schema(db, config.categorical_k);
    let mock = task_mock(inst, config);
    let hub = ToolHub::new(backend, config.link_threshold, clock);
    let ctx = ToolContext {
        demonstrations: column_demonstrations(db, config.demo_k, config.seed),
        documents: inst.documents.clone(),
    };
    let mut pctx = PlannerContext::new(inst.instruction.clone(), obs.clone());
    if config.prompt_documents {
        pctx.documents = inst.documents.clone();
    }
    let mut session = Vec::new();
    let mut trace = ExecutionTrace::default();

    let mut template;
    let mut llm;
    let (generator, limits): (&mut dyn PlanGenerator, Limits) = match (config.planner, client) {
        (PlannerKind::Llm, Some(c)) => {
            llm = LlmPlanner::new(c);
            (
                &mut llm,
                Limits {
                    max_revisions: config.max_revisions,
                    max_restarts: config.max_restarts,
                },
            )
        }
        (PlannerKind::Llm, None) => {
            let report = FailureReport {
                error: Some(PlannerError::BackendUnavailable(
                    "no completion client configured".into(),
                )),
                generations: 0,
                last_feedback: Vec::new(),
            };
            return EngineRun {
                result: Err(report),
                session,
                trace,
            };
        }
        (PlannerKind::Template, _) => {
            template = TemplatePlanner::new(&inst.instruction, db, &obs);
            (
                &mut template,
                Limits {
                    max_revisions: 0,
                    max_restarts: 0,
                },
            )
        }
    };

    let budget_ms = config.exec_timeout_s.saturating_mul(1000);
    let result = revise_loop(
        &mut pctx,
        generator,
        |plan| match &mock {
            Some(m) => analyze(plan, db, &obs, m, config),
            None => typecheck(plan, db)
                .iter()
                .filter(|d| d.is_error())
                .map(Feedback::from_diagnostic)
                .collect(),
        },
        |plan| match execute(plan, db, &hub, &ctx, Some(budget_ms)) {
            Ok(e) => {
                trace.extend(e.trace);
                Ok((e.database, e.diff))
            }
            Err(f) => {
                trace.extend(f.trace);
                Err(alloc::vec![f.error.to_feedback()])
            }
        },
        limits,
        &mut session,
    );
    let result = result.map(|s| Outcome {
        database: s.outcome.0,
        diff: s.outcome.1,
        plan: s.source,
        generations: s.generations,
    });
    EngineRun {
        result,
        session,
        trace,
    }
}
