//! Plan generation and the plan → analyze → execute revision loop.

mod intent;
mod llm;
mod prompt;
mod template;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::feedback::Feedback;
use crate::observer::Observation;
use crate::plan::{parse, PlanProgram};

pub use intent::{infer_intent, infer_task_type, Intent};
pub use llm::{plan_llm, CompletionClient, CompletionError, LlmPlanner, ReplayClient};
pub use prompt::{extract_plan, render_prompt, system_prompt, DEMONSTRATIONS};
pub use template::{plan_template, template_source, TemplatePlanner};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PlannerError {
    #[error("no target table can be identified from the instruction")]
    NoTargetTable,
    #[error("the instruction names no new column to add")]
    NoNewColumn,
    #[error("rows of table `{0}` cannot be identified by name")]
    UnnamedRows(String),
    #[error("planner backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("the plan does not parse")]
    Unparsable(Vec<Feedback>),
}

/// Everything a planner sees when producing a plan.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannerContext {
    pub system_prompt: String,
    pub instruction: String,
    pub observation: Observation,
    /// Shown to the planner only when non-empty; tools always see the
    /// full documents.
    pub documents: Vec<String>,
    /// Earlier plans of the current run with what was wrong with them.
    pub feedback_history: Vec<(String, Vec<Feedback>)>,
    pub revision_index: u32,
    pub restart_index: u32,
}

impl PlannerContext {
    pub fn new(instruction: impl Into<String>, observation: Observation) -> Self {
        Self {
            system_prompt: system_prompt(),
            instruction: instruction.into(),
            observation,
            documents: Vec::new(),
            feedback_history: Vec::new(),
            revision_index: 0,
            restart_index: 0,
        }
    }
}

/// One planner output.
#[derive(Clone, Debug, PartialEq)]
pub struct Generation {
    pub prompt: Option<String>,
    pub reply: String,
    /// The plan text taken from the reply.
    pub source: String,
}

pub trait PlanGenerator {
    fn name(&self) -> &str;
    /// Errors end the loop; a reply that is not a valid plan does not.
    fn generate(&mut self, ctx: &PlannerContext) -> Result<Generation, PlannerError>;
}

/// Which stage turned a plan down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Parse,
    Analyze,
    Execute,
}

/// A session log line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Start {
        instruction: String,
        planner: String,
        max_revisions: u32,
        max_restarts: u32,
    },
    Generation {
        restart: u32,
        revision: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prompt: Option<String>,
        reply: String,
    },
    Findings {
        restart: u32,
        revision: u32,
        stage: Stage,
        feedback: Vec<Feedback>,
    },
    Cleared {
        restart: u32,
        revision: u32,
    },
    Restart {
        restart: u32,
    },
    Finish {
        success: bool,
        generations: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_revisions: u32,
    pub max_restarts: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopSuccess<T> {
    pub outcome: T,
    pub plan: PlanProgram,
    pub source: String,
    pub generations: u32,
    pub revision_index: u32,
    pub restart_index: u32,
}

/// Why the loop gave up, with the findings on the last plan.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureReport {
    pub error: Option<PlannerError>,
    pub generations: u32,
    pub last_feedback: Vec<Feedback>,
}

impl FailureReport {
    pub fn message(&self) -> String {
        match &self.error {
            Some(e) => alloc::format!(
                "planner failed after {} generation(s): {e}",
                self.generations
            ),
            None => alloc::format!(
                "no acceptable plan within {} generation(s)",
                self.generations
            ),
        }
    }
}

/// Generates plans until one passes `analyze` and `execute`. Each run
/// allows one plan plus `max_revisions` revisions, each informed by the
/// findings so far; a failed run starts over with an empty history, up to
/// `max_restarts` times.
pub fn revise_loop<T>(
    ctx: &mut PlannerContext,
    generator: &mut dyn PlanGenerator,
    mut analyze: impl FnMut(&PlanProgram) -> Vec<Feedback>,
    mut execute: impl FnMut(&PlanProgram) -> Result<T, Vec<Feedback>>,
    limits: Limits,
    log: &mut Vec<SessionEvent>,
) -> Result<LoopSuccess<T>, FailureReport> {
    log.push(SessionEvent::Start {
        instruction: ctx.instruction.clone(),
        planner: generator.name().into(),
        max_revisions: limits.max_revisions,
        max_restarts: limits.max_restarts,
    });
    let mut generations = 0;
    let mut last_feedback = Vec::new();
    for restart in 0..=limits.max_restarts {
        if restart > 0 {
            log.push(SessionEvent::Restart { restart });
        }
        ctx.restart_index = restart;
        ctx.feedback_history.clear();
        for revision in 0..=limits.max_revisions {
            ctx.revision_index = revision;
            generations += 1;
            let g = match generator.generate(ctx) {
                Ok(g) => g,
                Err(e) => {
                    log.push(SessionEvent::Finish {
                        success: false,
                        generations,
                    });
                    return Err(FailureReport {
                        error: Some(e),
                        generations,
                        last_feedback,
                    });
                }
            };
            log.push(SessionEvent::Generation {
                restart,
                revision,
                prompt: g.prompt,
                reply: g.reply,
            });
            let (stage, feedback) = match parse(&g.source) {
                Err(diags) => (
                    Stage::Parse,
                    diags.iter().map(Feedback::from_diagnostic).collect(),
                ),
                Ok(plan) => {
                    let fb = analyze(&plan);
                    if fb.is_empty() {
                        log.push(SessionEvent::Cleared { restart, revision });
                        match execute(&plan) {
                            Ok(outcome) => {
                                log.push(SessionEvent::Finish {
                                    success: true,
                                    generations,
                                });
                                return Ok(LoopSuccess {
                                    outcome,
                                    plan,
                                    source: g.source,
                                    generations,
                                    revision_index: revision,
                                    restart_index: restart,
                                });
                            }
                            Err(fb) => (Stage::Execute, fb),
                        }
                    } else {
                        (Stage::Analyze, fb)
                    }
                }
            };
            log.push(SessionEvent::Findings {
                restart,
                revision,
                stage,
                feedback: feedback.clone(),
            });
            ctx.feedback_history.push((g.source, feedback.clone()));
            last_feedback = feedback;
        }
    }
    log.push(SessionEvent::Finish {
        success: false,
        generations,
    });
    Err(FailureReport {
        error: None,
        generations,
        last_feedback,
    })
}

#[cfg(test)]
mod tests;
