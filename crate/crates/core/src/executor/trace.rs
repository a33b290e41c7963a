use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::tools::{FixtureSet, Invocation, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Invocation(Invocation),
    Bind {
        name: String,
        value: Value,
    },
    Proposal {
        id: u32,
        proposal: Value,
    },
    Commit {
        ok: bool,
        cells: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        message: Option<String>,
    },
}

/// Everything a run did, in order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
}

impl ExecutionTrace {
    pub fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }

    pub fn invocations(&self) -> impl Iterator<Item = &Invocation> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Invocation(i) => Some(i),
            _ => None,
        })
    }

    /// Fixtures answering every successful extraction call of the trace,
    /// so the run can be replayed through the mock backend.
    pub fn to_fixtures(&self) -> FixtureSet {
        let mut fx = FixtureSet::default();
        for inv in self.invocations() {
            if let (true, Some(r)) = (inv.tool.is_extraction(), &inv.result) {
                fx.insert(inv.tool, &inv.args, r.clone());
            }
        }
        fx
    }

    pub fn extend(&mut self, other: ExecutionTrace) {
        self.events.extend(other.events);
    }
}
