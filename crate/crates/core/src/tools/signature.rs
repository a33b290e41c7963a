use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// Value kinds checked by the plan typechecker and at tool boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Text,
    Integer,
    Real,
    List,
    Record,
    DatabaseHandle,
    Null,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Text => "text",
            Kind::Integer => "integer",
            Kind::Real => "real",
            Kind::List => "list",
            Kind::Record => "record",
            Kind::DatabaseHandle => "database",
            Kind::Null => "null",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The registered tools.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tool {
    #[serde(rename = "NER")]
    Ner,
    #[serde(rename = "RE")]
    Re,
    #[serde(rename = "AE")]
    Ae,
    Classify,
    Link,
    Norm,
    #[serde(rename = "DI")]
    Di,
    #[serde(rename = "PR")]
    Pr,
    #[serde(rename = "AC")]
    Ac,
}

impl Tool {
    pub const ALL: [Tool; 9] = [
        Tool::Ner,
        Tool::Re,
        Tool::Ae,
        Tool::Classify,
        Tool::Link,
        Tool::Norm,
        Tool::Di,
        Tool::Pr,
        Tool::Ac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tool::Ner => "NER",
            Tool::Re => "RE",
            Tool::Ae => "AE",
            Tool::Classify => "Classify",
            Tool::Link => "Link",
            Tool::Norm => "Norm",
            Tool::Di => "DI",
            Tool::Pr => "PR",
            Tool::Ac => "AC",
        }
    }

    pub fn signature(self) -> &'static ToolSignature {
        &SIGNATURES[self as usize]
    }

    /// Tools answered by an extraction backend (mock, rules or remote).
    /// The rest are computed locally from the database.
    pub fn is_extraction(self) -> bool {
        matches!(self, Tool::Ner | Tool::Re | Tool::Ae | Tool::Classify)
    }

    /// Tools whose result is an update proposal.
    pub fn is_update(self) -> bool {
        matches!(self, Tool::Di | Tool::Pr | Tool::Ac)
    }

    pub fn description(self) -> &'static str {
        match self {
            Tool::Ner => "Named entity recognition: mentions of entities of the given type.",
            Tool::Re => "Relation extraction: tail entities related to `head_e` by `relation`.",
            Tool::Ae => "Attribute extraction: a record mapping each requested attribute to its value for `entity` (null when absent).",
            Tool::Classify => "Text classification: the label from `label_list` that best fits the text.",
            Tool::Link => "Entity linking: for each entry a record {entry, pk, score}; pk is null when no row matches.",
            Tool::Norm => "Data normalization: entries (records keyed by column) reformatted to the column types and formats of the table.",
            Tool::Di => "Data infilling: fills missing values of existing rows; each entry carries the primary key or the entity name plus the values.",
            Tool::Pr => "Row population: adds new rows; omitted integer keys are assigned, omitted columns take their defaults.",
            Tool::Ac => "Column addition: adds `new_columns` (names or {name, dtype, default} records) and fills values for the linked rows.",
        }
    }
}

impl fmt::Display for Tool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tool {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Tool::ALL.into_iter().find(|t| t.name() == s).ok_or(())
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
}

#[derive(Debug, PartialEq, Eq)]
pub struct ToolSignature {
    pub tool: Tool,
    pub params: &'static [Param],
    pub returns: Kind,
}

impl ToolSignature {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for ToolSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.tool.name())?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", p.name, p.kind)?;
        }
        write!(f, ") -> {}", self.returns)
    }
}

const fn p(name: &'static str, kind: Kind) -> Param {
    Param { name, kind }
}

static SIGNATURES: [ToolSignature; 9] = [
    ToolSignature {
        tool: Tool::Ner,
        params: &[p("text", Kind::Text), p("type", Kind::Text)],
        returns: Kind::List,
    },
    ToolSignature {
        tool: Tool::Re,
        params: &[
            p("text", Kind::Text),
            p("head_e", Kind::Text),
            p("relation", Kind::Text),
        ],
        returns: Kind::List,
    },
    ToolSignature {
        tool: Tool::Ae,
        params: &[
            p("text", Kind::Text),
            p("entity", Kind::Text),
            p("attribute_list", Kind::List),
        ],
        returns: Kind::Record,
    },
    ToolSignature {
        tool: Tool::Classify,
        params: &[p("text", Kind::Text), p("label_list", Kind::List)],
        returns: Kind::Text,
    },
    ToolSignature {
        tool: Tool::Link,
        params: &[
            p("data_entries", Kind::List),
            p("database", Kind::DatabaseHandle),
            p("table_name", Kind::Text),
        ],
        returns: Kind::List,
    },
    ToolSignature {
        tool: Tool::Norm,
        params: &[
            p("data_entries", Kind::List),
            p("database", Kind::DatabaseHandle),
            p("table_name", Kind::Text),
        ],
        returns: Kind::List,
    },
    ToolSignature {
        tool: Tool::Di,
        params: &[
            p("data_entry", Kind::List),
            p("database", Kind::DatabaseHandle),
            p("table_name", Kind::Text),
        ],
        returns: Kind::Record,
    },
    ToolSignature {
        tool: Tool::Pr,
        params: &[
            p("data_entries", Kind::List),
            p("database", Kind::DatabaseHandle),
            p("table_name", Kind::Text),
        ],
        returns: Kind::Record,
    },
    ToolSignature {
        tool: Tool::Ac,
        params: &[
            p("data_entry", Kind::List),
            p("database", Kind::DatabaseHandle),
            p("table_name", Kind::Text),
            p("new_columns", Kind::List),
        ],
        returns: Kind::Record,
    },
];
