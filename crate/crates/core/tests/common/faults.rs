//! Plans with one planted fault each, made by editing the template plans
//! of golden instances, plus the unedited plans as controls.

use opal_core::eval::TaskInstance;
use opal_core::planner::{infer_intent, template_source};

use super::golden::golden_suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultClass {
    Syntax,
    Logic,
    Integrity,
    Clean,
}

pub struct SeededPlan {
    pub name: &'static str,
    pub class: FaultClass,
    pub instance: TaskInstance,
    pub source: String,
}

/// (name, class, golden instance, text to replace, replacement)
const EDITS: [(&str, FaultClass, &str, &str, &str); 30] = [
    (
        "unknown tool",
        FaultClass::Syntax,
        "g01",
        "NER(text=doc",
        "NERX(text=doc",
    ),
    (
        "missing argument",
        FaultClass::Syntax,
        "g01",
        ", type=\"Movie\")",
        ")",
    ),
    (
        "text for a list",
        FaultClass::Syntax,
        "g01",
        "attribute_list=[\"Budget\"]",
        "attribute_list=\"Budget\"",
    ),
    (
        "unclosed block",
        FaultClass::Syntax,
        "g04",
        "    }\n}\n",
        "    }\n",
    ),
    (
        "unbound variable",
        FaultClass::Syntax,
        "g07",
        "entity=e1",
        "entity=e9",
    ),
    (
        "unknown argument",
        FaultClass::Syntax,
        "g11",
        "DI(data_entry=",
        "DI(data_entries=",
    ),
    (
        "misspelled argument",
        FaultClass::Syntax,
        "g13",
        "head_e=e1",
        "head=e1",
    ),
    (
        "emit of an extraction",
        FaultClass::Syntax,
        "g10",
        "emit new6 = PR(",
        "emit new6 = AE(",
    ),
    (
        "unterminated string",
        FaultClass::Syntax,
        "g05",
        "type=\"Character\")",
        "type=\"Character)",
    ),
    (
        "bad binding name",
        FaultClass::Syntax,
        "g12",
        "let info2 = AE",
        "let 2info = AE",
    ),
    (
        "wrong entity type",
        FaultClass::Logic,
        "g01",
        "type=\"Movie\"",
        "type=\"Actor\"",
    ),
    (
        "title as budget",
        FaultClass::Logic,
        "g01",
        "Budget: info2.Budget",
        "Budget: e1",
    ),
    (
        "wrong relation",
        FaultClass::Logic,
        "g03",
        "relation=\"Actor\")",
        "relation=\"Movie\")",
    ),
    (
        "link by the wrong name",
        FaultClass::Logic,
        "g03",
        "Link(data_entries=[p2]",
        "Link(data_entries=[e1]",
    ),
    (
        "title as director",
        FaultClass::Logic,
        "g07",
        "Director: info2.Director",
        "Director: e1",
    ),
    (
        "dropped attribute",
        FaultClass::Logic,
        "g04",
        ", Genre: info2.Genre",
        "",
    ),
    (
        "link in the wrong table",
        FaultClass::Logic,
        "g06",
        "table_name=\"Movie\") {",
        "table_name=\"Actor\") {",
    ),
    (
        "crossed attributes",
        FaultClass::Logic,
        "g10",
        "Position: info2.Position",
        "Position: info4.City",
    ),
    (
        "rows found by the wrong field",
        FaultClass::Logic,
        "g11",
        "{Name: e1,",
        "{Name: info2.Population,",
    ),
    (
        "constant reference",
        FaultClass::Logic,
        "g13",
        "CountryID: l4.pk",
        "CountryID: 1",
    ),
    (
        "reused key",
        FaultClass::Integrity,
        "g04",
        "{Title: e1,",
        "{ID: 1, Title: e1,",
    ),
    (
        "dangling actor",
        FaultClass::Integrity,
        "g06",
        "ActorID: l5.pk",
        "ActorID: 999",
    ),
    (
        "dangling infill",
        FaultClass::Integrity,
        "g03",
        "ActorID: l3.pk",
        "ActorID: 999",
    ),
    (
        "missing required title",
        FaultClass::Integrity,
        "g04",
        "{Title: e1, ",
        "{",
    ),
    (
        "text in a date column",
        FaultClass::Integrity,
        "g02",
        "Release: info2.Release",
        "Release: e1",
    ),
    (
        "dangling country",
        FaultClass::Integrity,
        "g13",
        "CountryID: l4.pk",
        "CountryID: 42",
    ),
    (
        "names in a number column",
        FaultClass::Integrity,
        "g12",
        "dtype: \"text\"",
        "dtype: \"integer\"",
    ),
    (
        "reused text key",
        FaultClass::Integrity,
        "g10",
        "{Name: e1, Height",
        "{Name: \"LeBron James\", Height",
    ),
    (
        "dangling team",
        FaultClass::Integrity,
        "g10",
        "TeamID: new6.key",
        "TeamID: 77",
    ),
    (
        "text in a number column",
        FaultClass::Integrity,
        "g11",
        "Population: info2.Population",
        "Population: e1",
    ),
];

const CLEAN: [&str; 10] = [
    "g01", "g02", "g03", "g04", "g05", "g06", "g07", "g08", "g10", "g13",
];

/// Thirty faulty plans (ten of each class) and ten clean ones.
pub fn fault_corpus() -> Vec<SeededPlan> {
    let suite = golden_suite();
    let find = |id: &str| {
        let g = suite
            .iter()
            .find(|g| g.instance.id.starts_with(id))
            .expect("golden id");
        let intent = infer_intent(&g.instance.instruction, &g.instance.db_before).unwrap();
        (
            g.instance.clone(),
            template_source(&intent, &g.instance.db_before).unwrap(),
        )
    };
    let mut out = Vec::new();
    for (name, class, id, from, to) in EDITS {
        let (instance, clean) = find(id);
        assert!(clean.contains(from), "{name}: `{from}` not in\n{clean}");
        out.push(SeededPlan {
            name,
            class,
            instance,
            source: clean.replacen(from, to, 1),
        });
    }
    for id in CLEAN {
        let (instance, source) = find(id);
        out.push(SeededPlan {
            name: id,
            class: FaultClass::Clean,
            instance,
            source,
        });
    }
    out
}
