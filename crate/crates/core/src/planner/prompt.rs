//! Planner prompt layout: tool reference, language rules, one worked
//! example per task type, then the database, the instruction and the
//! findings on earlier attempts.

use alloc::string::{String, ToString};

use core::fmt::Write;

use super::PlannerContext;
use crate::tools::Tool;

/// Longest document excerpt shown to the planner, in characters.
const DOCUMENT_EXCERPT: usize = 2000;

/// Worked examples, by task type, over a Movie(ID, Title, Genre, Budget,
/// Release), Actor(ActorID, Name) and Character(CharID, Name, MovieID,
/// ActorID) schema.
pub const DEMONSTRATIONS: [(&str, &str); 3] = [
    (
        "Fill in the missing budgets and release dates of the movies.",
        r#"for doc in docs {
    for m in NER(text=doc, type="Movie") {
        let info = AE(text=doc, entity=m, attribute_list=["Budget", "Release"])
        let rows = Norm(data_entries=[{Title: m, Budget: info.Budget, Release: info.Release}], database=db, table_name="Movie")
        emit DI(data_entry=rows, database=db, table_name="Movie")
    }
}"#,
    ),
    (
        "Add the characters from the reviews, with the actors who play them.",
        r#"for doc in docs {
    for c in NER(text=doc, type="Character") {
        for a in RE(text=doc, head_e=c, relation="Actor") {
            # the actor is new: its row key is pending until commit
            emit actor = PR(data_entries=[{Name: a}], database=db, table_name="Actor")
            for m in RE(text=doc, head_e=c, relation="Movie") {
                # the movie already exists: look its key up by title
                for link in Link(data_entries=[m], database=db, table_name="Movie") {
                    emit PR(data_entries=[{Name: c, ActorID: actor.key, MovieID: link.pk}], database=db, table_name="Character")
                }
            }
        }
    }
}"#,
    ),
    (
        "Add a column \"Director\" to the movie table.",
        r#"for doc in docs {
    for m in NER(text=doc, type="Movie") {
        let info = AE(text=doc, entity=m, attribute_list=["Director"])
        emit AC(data_entry=[{Title: m, Director: info.Director}], database=db, table_name="Movie", new_columns=[{name: "Director", dtype: "text"}])
    }
}"#,
    ),
];

const LANGUAGE: &str = "\
Plans are programs in a small language:
- `let name = <expr>` binds a value; `for x in <list> { ... }` loops over a list.
- Expressions are strings, numbers, lists `[...]`, records `{Key: value}`, variables, field reads `r.Key` and tool calls `Tool(arg=value, ...)` with named arguments.
- `emit [name =] DI(...) | PR(...) | AC(...)` proposes a database update. Nothing is written until the whole plan has run; then all proposals are applied together or not at all.
- `emit x = PR(...)` binds `x.key` to the key of the first new row (`x.keys` lists all), so child rows can refer to parents added in the same plan.
- Predefined: `db` (the database) and `docs` (the list of document texts). Lines starting with `#` are comments.
";

/// The fixed part of every prompt.
pub fn system_prompt() -> String {
    let mut s = String::from(
        "You write plans that update a relational database from text documents.\n\n## Tools\n",
    );
    for t in Tool::ALL {
        let _ = writeln!(s, "- {}\n  {}", t.signature(), t.description());
    }
    s.push_str("\n## Language\n");
    s.push_str(LANGUAGE);
    s.push_str("\n## Examples\n");
    for (instruction, plan) in DEMONSTRATIONS {
        let _ = write!(s, "Instruction: {instruction}\n```plan\n{plan}\n```\n\n");
    }
    s
}

fn excerpt(doc: &str) -> &str {
    match doc.char_indices().nth(DOCUMENT_EXCERPT) {
        Some((i, _)) => &doc[..i],
        None => doc,
    }
}

/// The full prompt for the next generation.
pub fn render_prompt(ctx: &PlannerContext) -> String {
    let mut s = ctx.system_prompt.clone();
    let _ = write!(s, "## Database\n{}\n", ctx.observation);
    for (i, d) in ctx.documents.iter().enumerate() {
        let _ = write!(s, "## Document {}\n{}\n\n", i + 1, excerpt(d));
    }
    let _ = write!(s, "## Instruction\n{}\n\n", ctx.instruction);
    if !ctx.feedback_history.is_empty() {
        s.push_str("## Earlier attempts\n");
        for (i, (plan, findings)) in ctx.feedback_history.iter().enumerate() {
            let _ = write!(s, "Attempt {}:\n```plan\n{}\n```\n", i + 1, plan.trim_end());
            for f in findings {
                let _ = writeln!(s, "{f}");
            }
            s.push('\n');
        }
        s.push_str("Fix the problems above.\n");
    }
    s.push_str("Reply with the plan in a single ```plan block.\n");
    s
}

/// The plan in a model reply: the first fenced block, or the whole reply
/// when there is none.
pub fn extract_plan(reply: &str) -> String {
    if let Some(open) = reply.find("```") {
        let after = &reply[open + 3..];
        // skip the info string
        let body = after.find('\n').map_or("", |nl| &after[nl + 1..]);
        let end = body.find("```").unwrap_or(body.len());
        return String::from(body[..end].trim_end());
    }
    reply.trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::testing::movie_db;
    use crate::plan::{parse, typecheck};

    #[test]
    fn demonstrations_are_valid_plans() {
        let db = movie_db();
        for (_, plan) in DEMONSTRATIONS {
            let p = parse(plan).unwrap();
            assert_eq!(typecheck(&p, &db), alloc::vec![]);
        }
    }

    #[test]
    fn extracts_fenced_plans() {
        assert_eq!(
            extract_plan("Here:\n```plan\nlet x = 1\n```\nDone."),
            "let x = 1"
        );
        assert_eq!(extract_plan("```\nlet x = 1\n"), "let x = 1");
        assert_eq!(extract_plan("  let x = 1 \n"), "let x = 1");
    }
}
