use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{macro_f1, score_instance, Difficulty, InstanceScore, TaskInstance, TaskType};
use crate::db::DiffTuple;

/// How one instance went.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: String,
    pub task_type: TaskType,
    pub domain: String,
    pub difficulty: Difficulty,
    pub score: InstanceScore,
    /// Why the system produced no database, if it did not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Where the run's trace was written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

/// Scores the system's changes on `inst`; a failed run scores 0.
pub fn evaluate(
    inst: &TaskInstance,
    outcome: Result<BTreeSet<DiffTuple>, String>,
) -> InstanceResult {
    let gold = match inst.gold_diff() {
        Some(Ok(g)) => g,
        Some(Err(e)) => {
            return result(
                inst,
                InstanceScore::zero(0),
                Some(alloc::format!("invalid gold database: {e}")),
            )
        }
        None => BTreeSet::new(),
    };
    match outcome {
        Ok(predicted) => result(inst, score_instance(&predicted, &gold), None),
        Err(e) => result(inst, InstanceScore::zero(gold.len()), Some(e)),
    }
}

fn result(inst: &TaskInstance, score: InstanceScore, error: Option<String>) -> InstanceResult {
    InstanceResult {
        id: inst.id.clone(),
        task_type: inst.task_type,
        domain: inst.domain.clone(),
        difficulty: inst.difficulty(),
        score,
        error,
        trace: None,
    }
}

/// Macro-F1 over the instances sharing one value of one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    /// `difficulty`, `task_type`, `domain` or `overall`.
    pub dimension: String,
    pub key: String,
    pub instances: usize,
    pub macro_f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    /// Sorted by id.
    pub instances: Vec<InstanceResult>,
    pub slices: Vec<Slice>,
}

impl BenchmarkReport {
    pub fn from_results(mut instances: Vec<InstanceResult>) -> Self {
        instances.sort_by(|a, b| a.id.cmp(&b.id));
        let mut slices = Vec::new();
        let mut push = |dimension: &str, key: String, members: Vec<&InstanceResult>| {
            let scores: Vec<InstanceScore> = members.iter().map(|r| r.score).collect();
            if let Ok(f) = macro_f1(&scores) {
                slices.push(Slice {
                    dimension: dimension.into(),
                    key,
                    instances: scores.len(),
                    macro_f1: f,
                });
            }
        };
        for d in Difficulty::ALL {
            push(
                "difficulty",
                d.to_string(),
                instances.iter().filter(|r| r.difficulty == d).collect(),
            );
        }
        for t in TaskType::ALL {
            push(
                "task_type",
                t.to_string(),
                instances.iter().filter(|r| r.task_type == t).collect(),
            );
        }
        let mut domains: BTreeMap<&str, Vec<&InstanceResult>> = BTreeMap::new();
        for r in &instances {
            domains.entry(&r.domain).or_default().push(r);
        }
        for (d, members) in domains {
            push("domain", d.to_string(), members);
        }
        push("overall", "Overall".into(), instances.iter().collect());
        Self { instances, slices }
    }

    pub fn overall(&self) -> Option<f64> {
        self.slices
            .iter()
            .find(|s| s.dimension == "overall")
            .map(|s| s.macro_f1)
    }

    pub fn slice(&self, dimension: &str, key: &str) -> Option<&Slice> {
        self.slices
            .iter()
            .find(|s| s.dimension == dimension && s.key == key)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceResult> {
        self.instances.iter().filter(|r| r.error.is_some())
    }
}

/// Slices as columns, macro-F1 in percent.
impl fmt::Display for BenchmarkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<usize> = self
            .slices
            .iter()
            .map(|s| s.key.chars().count().max(7))
            .collect();
        let mut header = String::from("          ");
        let mut value = String::from("macro-F1  ");
        let mut count = String::from("n         ");
        let mut last_dim = "";
        for (s, w) in self.slices.iter().zip(&widths) {
            let sep = if !last_dim.is_empty() && last_dim != s.dimension {
                " |"
            } else {
                ""
            };
            last_dim = &s.dimension;
            header.push_str(&alloc::format!("{sep} {:>w$}", s.key));
            value.push_str(&alloc::format!("{sep} {:>w$.2}", s.macro_f1 * 100.0));
            count.push_str(&alloc::format!("{sep} {:>w$}", s.instances));
        }
        writeln!(f, "{}", header.trim_end())?;
        writeln!(f, "{value}")?;
        write!(f, "{count}")
    }
}

/// Runs `system` on every instance and scores the outcomes. A failing
/// instance scores 0 and does not stop the run.
pub fn run_benchmark(
    instances: &[TaskInstance],
    mut system: impl FnMut(&TaskInstance) -> Result<BTreeSet<DiffTuple>, String>,
) -> BenchmarkReport {
    BenchmarkReport::from_results(instances.iter().map(|i| evaluate(i, system(i))).collect())
}
