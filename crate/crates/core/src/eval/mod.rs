//! Benchmark scoring: exact-match F1 over changed cells, difficulty
//! levels and sliced reports.

mod difficulty;
mod report;
mod score;
mod task;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::db::{check_integrity, diff, Database, DbError, DiffTuple};
use crate::text::word_count;

pub use difficulty::{classify_difficulty, Difficulty};
pub use report::{evaluate, run_benchmark, BenchmarkReport, InstanceResult, Slice};
pub use score::{macro_f1, score_instance, EmptyScores, InstanceScore};
pub use task::TaskType;

/// One benchmark task: an instruction, the documents to read and the
/// database before and after the intended update.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskInstance {
    pub id: String,
    pub instruction: String,
    pub documents: Vec<String>,
    pub db_before: Database,
    pub db_gold: Option<Database>,
    pub task_type: TaskType,
    pub domain: String,
}

impl TaskInstance {
    pub fn gold_diff(&self) -> Option<Result<BTreeSet<DiffTuple>, DbError>> {
        self.db_gold.as_ref().map(|g| diff(&self.db_before, g))
    }

    /// A gold database must change something and satisfy every constraint.
    pub fn validate(&self) -> Result<(), String> {
        let Some(gold) = &self.db_gold else {
            return Ok(());
        };
        let d = diff(&self.db_before, gold)
            .map_err(|e| alloc::format!("{}: gold database: {e}", self.id))?;
        if d.is_empty() {
            return Err(alloc::format!(
                "{}: gold database equals the database before",
                self.id
            ));
        }
        if let Some(v) = check_integrity(gold).first() {
            return Err(alloc::format!(
                "{}: gold database breaks a constraint: {v}",
                self.id
            ));
        }
        Ok(())
    }

    pub fn average_document_words(&self) -> usize {
        if self.documents.is_empty() {
            return 0;
        }
        self.documents.iter().map(|d| word_count(d)).sum::<usize>() / self.documents.len()
    }

    /// Level from the tables and values the gold update touches and the
    /// document length. Without a gold database only the length counts.
    pub fn difficulty(&self) -> Difficulty {
        let (tables, delta) = match self.gold_diff() {
            Some(Ok(d)) => (
                d.iter()
                    .map(|t| t.table.as_str())
                    .collect::<BTreeSet<_>>()
                    .len(),
                d.len(),
            ),
            _ => (1, 0),
        };
        classify_difficulty(tables, delta, self.average_document_words())
    }
}
