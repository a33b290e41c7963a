//! Chat-model planning through a [`CompletionClient`].

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{
    extract_plan, render_prompt, Generation, PlanGenerator, PlannerContext, PlannerError,
    SessionEvent,
};
use crate::feedback::Feedback;
use crate::plan::{parse, PlanProgram};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CompletionError {
    #[error("completion endpoint unavailable: {0}")]
    Unavailable(String),
    #[error("no recorded reply for this prompt")]
    NotRecorded,
}

/// Turns a prompt into a model reply.
pub trait CompletionClient {
    fn complete(&mut self, prompt: &str) -> Result<String, CompletionError>;
}

/// Answers prompts with replies recorded in a session log. A prompt seen
/// several times gets its replies in recorded order.
#[derive(Clone, Debug, Default)]
pub struct ReplayClient {
    replies: BTreeMap<String, VecDeque<String>>,
}

impl ReplayClient {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        let mut replies: BTreeMap<String, VecDeque<String>> = BTreeMap::new();
        for (p, r) in pairs {
            replies.entry(p).or_default().push_back(r);
        }
        Self { replies }
    }

    pub fn from_session(events: &[SessionEvent]) -> Self {
        Self::new(events.iter().filter_map(|e| match e {
            SessionEvent::Generation {
                prompt: Some(p),
                reply,
                ..
            } => Some((p.clone(), reply.clone())),
            _ => None,
        }))
    }
}

impl CompletionClient for ReplayClient {
    fn complete(&mut self, prompt: &str) -> Result<String, CompletionError> {
        self.replies
            .get_mut(prompt)
            .and_then(VecDeque::pop_front)
            .ok_or(CompletionError::NotRecorded)
    }
}

pub struct LlmPlanner<'a> {
    client: &'a mut dyn CompletionClient,
}

impl<'a> LlmPlanner<'a> {
    pub fn new(client: &'a mut dyn CompletionClient) -> Self {
        Self { client }
    }
}

impl PlanGenerator for LlmPlanner<'_> {
    fn name(&self) -> &str {
        "llm"
    }

    fn generate(&mut self, ctx: &PlannerContext) -> Result<Generation, PlannerError> {
        let prompt = render_prompt(ctx);
        let reply = self
            .client
            .complete(&prompt)
            .map_err(|e| PlannerError::BackendUnavailable(e.to_string()))?;
        let source = extract_plan(&reply);
        Ok(Generation {
            prompt: Some(prompt),
            reply,
            source,
        })
    }
}

/// One plan from the model for `ctx`.
pub fn plan_llm(
    ctx: &PlannerContext,
    client: &mut dyn CompletionClient,
) -> Result<PlanProgram, PlannerError> {
    let g = LlmPlanner::new(client).generate(ctx)?;
    parse(&g.source).map_err(|diags| {
        PlannerError::Unparsable(
            diags
                .iter()
                .map(Feedback::from_diagnostic)
                .collect::<Vec<_>>(),
        )
    })
}
