use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::{Args, ExtractionBackend, Tool, ToolContext, ToolError, Value};

/// Canonical fixture key of a call: the tool name followed by the
/// canonical JSON of its arguments, e.g. `NER{"text":"...","type":"Movie"}`.
/// AE attribute lists and Classify label lists are sets, so they are
/// sorted first.
pub fn fixture_key(tool: Tool, args: &Args) -> String {
    let set_arg = match tool {
        Tool::Ae => Some("attribute_list"),
        Tool::Classify => Some("label_list"),
        _ => None,
    };
    let mut args = args.clone();
    if let Some(Value::List(items)) = set_arg.and_then(|a| args.get_mut(a)) {
        items.sort_by_key(|a| a.canonical_json());
        items.dedup();
    }
    let mut key = String::from(tool.name());
    key.push_str(&Value::Record(args).canonical_json());
    key
}

/// Recorded tool outputs keyed by [`fixture_key`]. Serializes as a JSON
/// object from key to result.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FixtureSet {
    entries: BTreeMap<String, Value>,
}

impl FixtureSet {
    pub fn insert(&mut self, tool: Tool, args: &Args, result: Value) -> Option<Value> {
        self.entries.insert(fixture_key(tool, args), result)
    }

    pub fn get(&self, tool: Tool, args: &Args) -> Option<&Value> {
        self.entries.get(&fixture_key(tool, args))
    }

    pub fn extend(&mut self, other: FixtureSet) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Answers extraction calls from a [`FixtureSet`]. An AE call with no
/// exact fixture is answered attribute by attribute when every single
/// attribute has one.
#[derive(Clone, Debug, Default)]
pub struct MockBackend {
    fixtures: FixtureSet,
}

impl MockBackend {
    pub fn new(fixtures: FixtureSet) -> Self {
        Self { fixtures }
    }

    pub fn fixtures(&self) -> &FixtureSet {
        &self.fixtures
    }
}

impl ExtractionBackend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn extract(&self, tool: Tool, args: &Args, _ctx: &ToolContext) -> Result<Value, ToolError> {
        if let Some(v) = self.fixtures.get(tool, args) {
            return Ok(v.clone());
        }
        if tool == Tool::Ae {
            if let Some(Value::List(attrs)) = args.get("attribute_list") {
                let mut out = BTreeMap::new();
                for a in attrs {
                    let Value::Text(name) = a else { break };
                    let mut single = args.clone();
                    single.insert("attribute_list".into(), Value::List(alloc::vec![a.clone()]));
                    match self.fixtures.get(tool, &single) {
                        Some(Value::Record(m)) => {
                            out.insert(name.clone(), m.get(name).cloned().unwrap_or(Value::Null));
                        }
                        _ => {
                            return Err(ToolError::UnboundFixture {
                                key: abbreviate(&fixture_key(tool, args)),
                            })
                        }
                    }
                }
                if out.len() == attrs.len() {
                    return Ok(Value::Record(out));
                }
            }
        }
        Err(ToolError::UnboundFixture {
            key: abbreviate(&fixture_key(tool, args)),
        })
    }
}

fn abbreviate(key: &str) -> String {
    const MAX: usize = 160;
    if key.chars().count() <= MAX {
        return key.into();
    }
    let head: String = key.chars().take(MAX).collect();
    format!("{head}...")
}
