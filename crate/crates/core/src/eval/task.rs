use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// The three update operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskType {
    /// Data infilling: fill NULL cells of existing rows.
    #[serde(rename = "DI")]
    Di,
    /// Row population: insert new rows.
    #[serde(rename = "RP")]
    Rp,
    /// Column addition: add columns and fill them.
    #[serde(rename = "CA")]
    Ca,
}

impl TaskType {
    pub const ALL: [TaskType; 3] = [TaskType::Di, TaskType::Rp, TaskType::Ca];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskType::Di => "DI",
            TaskType::Rp => "RP",
            TaskType::Ca => "CA",
        }
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DI" => Ok(TaskType::Di),
            "RP" | "PR" => Ok(TaskType::Rp),
            "CA" | "AC" => Ok(TaskType::Ca),
            _ => Err(()),
        }
    }
}
