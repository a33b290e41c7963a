use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "Easy",
            Difficulty::Medium => "Medium",
            Difficulty::Hard => "Hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Difficulty from the number of tables touched, the number of changed
/// values and the average document length in words. Any hard criterion
/// makes an instance hard; easy needs both easy bounds; the rest is
/// medium.
pub fn classify_difficulty(
    n_tables: usize,
    delta_values: usize,
    avg_doc_words: usize,
) -> Difficulty {
    if n_tables > 1 || delta_values > 20 || avg_doc_words > 2000 {
        Difficulty::Hard
    } else if delta_values <= 10 && avg_doc_words <= 1000 {
        Difficulty::Easy
    } else {
        Difficulty::Medium
    }
}
