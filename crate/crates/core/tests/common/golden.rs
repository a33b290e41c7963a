//! Hand-built instances over four small databases. Each document comes
//! with what an extractor would find in it; the fixtures answer every NER,
//! AE and RE question about the document, so they do not depend on the
//! plan that asks.

use std::collections::BTreeSet;

use opal_core::db::{ColumnDef, DataType, Database, Date, Literal, Row, Table};
use opal_core::eval::{TaskInstance, TaskType};
use opal_core::tools::{Args, FixtureSet, Tool, Value};

pub struct Golden {
    pub instance: TaskInstance,
    pub fixtures: FixtureSet,
}

struct Doc {
    text: &'static str,
    ner: Vec<(&'static str, Vec<&'static str>)>,
    ae: Vec<(&'static str, &'static str, &'static str)>,
    re: Vec<(&'static str, &'static str, Vec<&'static str>)>,
}

impl Doc {
    fn new(text: &'static str) -> Self {
        Doc {
            text,
            ner: vec![],
            ae: vec![],
            re: vec![],
        }
    }

    fn ner(mut self, ty: &'static str, found: &[&'static str]) -> Self {
        self.ner.push((ty, found.to_vec()));
        self
    }

    fn ae(mut self, entity: &'static str, attr: &'static str, value: &'static str) -> Self {
        self.ae.push((entity, attr, value));
        self
    }

    fn re(mut self, head: &'static str, relation: &'static str, found: &[&'static str]) -> Self {
        self.re.push((head, relation, found.to_vec()));
        self
    }
}

fn args(pairs: &[(&str, Value)]) -> Args {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Answers to every question about each document: NER for each table,
/// AE for each entity and attribute, RE for each entity and table.
fn world_fixtures(db: &Database, new_columns: &[&str], docs: &[Doc]) -> FixtureSet {
    let tables: Vec<&str> = db.table_names().collect();
    let mut attrs: BTreeSet<&str> = db
        .tables()
        .flat_map(|t| t.columns().iter().map(|c| c.name.as_str()))
        .collect();
    attrs.extend(new_columns);
    let mut fx = FixtureSet::default();
    for d in docs {
        let text = Value::text(d.text);
        let mut entities: BTreeSet<&str> = BTreeSet::new();
        for t in &tables {
            let found = d
                .ner
                .iter()
                .find(|(ty, _)| ty == t)
                .map(|(_, f)| f.clone())
                .unwrap_or_default();
            entities.extend(&found);
            fx.insert(
                Tool::Ner,
                &args(&[("text", text.clone()), ("type", Value::text(*t))]),
                Value::texts(found),
            );
        }
        for (_, _, found) in &d.re {
            entities.extend(found);
        }
        for e in &entities {
            for t in &tables {
                let found =
                    d.re.iter()
                        .find(|(h, r, _)| h == e && r == t)
                        .map(|(_, _, f)| f.clone())
                        .unwrap_or_default();
                let a = args(&[
                    ("text", text.clone()),
                    ("head_e", Value::text(*e)),
                    ("relation", Value::text(*t)),
                ]);
                fx.insert(Tool::Re, &a, Value::texts(found));
            }
            for attr in &attrs {
                let v =
                    d.ae.iter()
                        .find(|(en, at, _)| en == e && at == attr)
                        .map_or(Value::Null, |(_, _, v)| Value::text(*v));
                let a = args(&[
                    ("text", text.clone()),
                    ("entity", Value::text(*e)),
                    ("attribute_list", Value::texts([*attr])),
                ]);
                fx.insert(Tool::Ae, &a, Value::record([(*attr, v)]));
            }
        }
    }
    fx
}

fn t(s: &str) -> Option<Literal> {
    Some(Literal::text(s))
}

fn i(v: i64) -> Option<Literal> {
    Some(Literal::Integer(v))
}

fn r(v: f64) -> Option<Literal> {
    Literal::real(v)
}

fn d(y: u16, m: u8, day: u8) -> Option<Literal> {
    Some(Literal::Date(Date::new(y, m, day).unwrap()))
}

/// Sets one cell, found by scanning for the key.
fn set(db: &Database, table: &str, pk: Literal, column: &str, v: Option<Literal>) -> Database {
    let tb = db.table(table).unwrap();
    let ri = tb
        .rows()
        .iter()
        .position(|row| row[tb.pk_index()] == Some(pk.clone()))
        .unwrap();
    db.with_cell_unchecked(table, ri, tb.column_index(column).unwrap(), v)
}

fn push(db: &Database, table: &str, row: Row) -> Database {
    db.with_row_unchecked(table, row)
}

pub fn film_db() -> Database {
    let movie = Table::new(
        "Movie",
        vec![
            ColumnDef::new("ID", DataType::Integer).primary_key(),
            ColumnDef::new("Title", DataType::Text).not_null(),
            ColumnDef::new("Genre", DataType::Text),
            ColumnDef::new("Budget", DataType::Text),
            ColumnDef::new("Release", DataType::Date),
        ],
        vec![
            vec![i(1), t("Heat"), t("Crime"), None, None],
            vec![i(2), t("Clue"), t("Comedy"), t("15M"), d(1985, 12, 13)],
            vec![i(3), t("Alien"), t("Horror"), t("11M"), d(1979, 5, 25)],
            vec![i(4), t("Se7en"), t("Thriller"), None, None],
        ],
    )
    .unwrap();
    let actor = Table::new(
        "Actor",
        vec![
            ColumnDef::new("ActorID", DataType::Integer).primary_key(),
            ColumnDef::new("Name", DataType::Text),
            ColumnDef::new("PlaceOfBirth", DataType::Text).with_default(Literal::text("Unknown")),
        ],
        vec![
            vec![i(10), t("Al Pacino"), t("New York")],
            vec![i(11), t("Robert De Niro"), t("New York")],
            vec![i(12), t("Val Kilmer"), t("Los Angeles")],
        ],
    )
    .unwrap();
    let character = Table::new(
        "Character",
        vec![
            ColumnDef::new("CharID", DataType::Integer).primary_key(),
            ColumnDef::new("Name", DataType::Text),
            ColumnDef::new("MovieID", DataType::Integer).references("Movie", "ID"),
            ColumnDef::new("ActorID", DataType::Integer).references("Actor", "ActorID"),
        ],
        vec![
            vec![i(100), t("Vincent Hanna"), i(1), i(10)],
            vec![i(101), t("Neil McCauley"), i(1), None],
        ],
    )
    .unwrap();
    Database::validated(vec![movie, actor, character]).unwrap()
}

pub fn sports_db() -> Database {
    let team = Table::new(
        "Team",
        vec![
            ColumnDef::new("TeamID", DataType::Integer).primary_key(),
            ColumnDef::new("Name", DataType::Text).not_null(),
            ColumnDef::new("City", DataType::Text),
        ],
        vec![
            vec![i(1), t("Lakers"), t("Los Angeles")],
            vec![i(2), t("Celtics"), t("Boston")],
        ],
    )
    .unwrap();
    let player = Table::new(
        "Player",
        vec![
            ColumnDef::new("Name", DataType::Text).primary_key(),
            ColumnDef::new("Height", DataType::Real),
            ColumnDef::new("Position", DataType::Text),
            ColumnDef::new("TeamID", DataType::Integer).references("Team", "TeamID"),
        ],
        vec![
            vec![t("LeBron James"), None, t("Forward"), i(1)],
            vec![t("Jayson Tatum"), r(2.03), None, i(2)],
            vec![t("Anthony Davis"), None, None, i(1)],
        ],
    )
    .unwrap();
    Database::validated(vec![team, player]).unwrap()
}

pub fn geo_db() -> Database {
    let country = Table::new(
        "Country",
        vec![
            ColumnDef::new("CountryID", DataType::Integer).primary_key(),
            ColumnDef::new("Name", DataType::Text).not_null(),
            ColumnDef::new("Continent", DataType::Text),
        ],
        vec![
            vec![i(1), t("France"), t("Europe")],
            vec![i(2), t("Japan"), t("Asia")],
        ],
    )
    .unwrap();
    let city = Table::new(
        "City",
        vec![
            ColumnDef::new("CityID", DataType::Integer).primary_key(),
            ColumnDef::new("Name", DataType::Text).not_null(),
            ColumnDef::new("Population", DataType::Integer),
            ColumnDef::new("CountryID", DataType::Integer)
                .references("Country", "CountryID")
                .not_null(),
        ],
        vec![
            vec![i(1), t("Paris"), None, i(1)],
            vec![i(2), t("Lyon"), i(513_275), i(1)],
            vec![i(3), t("Osaka"), None, i(2)],
        ],
    )
    .unwrap();
    Database::validated(vec![country, city]).unwrap()
}

pub fn book_db() -> Database {
    let book = Table::new(
        "Book",
        vec![
            ColumnDef::new("BookID", DataType::Integer).primary_key(),
            ColumnDef::new("Title", DataType::Text).not_null(),
            ColumnDef::new("Author", DataType::Text),
            ColumnDef::new("Year", DataType::Integer),
        ],
        vec![
            vec![i(1), t("Dune"), t("Frank Herbert"), i(1965)],
            vec![i(2), t("Emma"), t("Jane Austen"), i(1815)],
            vec![i(3), t("Ulysses"), t("James Joyce"), i(1922)],
        ],
    )
    .unwrap();
    Database::validated(vec![book]).unwrap()
}

struct Case {
    id: &'static str,
    domain: &'static str,
    task_type: TaskType,
    instruction: &'static str,
    before: Database,
    new_columns: Vec<&'static str>,
    docs: Vec<Doc>,
    gold: Database,
}

fn build(s: Case) -> Golden {
    let fixtures = world_fixtures(&s.before, &s.new_columns, &s.docs);
    let instance = TaskInstance {
        id: s.id.into(),
        instruction: s.instruction.into(),
        documents: s.docs.iter().map(|d| d.text.to_string()).collect(),
        db_before: s.before,
        db_gold: Some(s.gold),
        task_type: s.task_type,
        domain: s.domain.into(),
    };
    instance.validate().unwrap();
    Golden { instance, fixtures }
}

/// Thirteen instances: DI, RP (including a three-table insert with a
/// shared parent) and CA over film, sports, geography and book data.
pub fn golden_suite() -> Vec<Golden> {
    let film = film_db();
    let sports = sports_db();
    let geo = geo_db();
    let books = book_db();
    let mut out = Vec::new();

    out.push(build(Case {
        id: "g01-film-budgets",
        domain: "film",
        task_type: TaskType::Di,
        instruction: "Fill in the missing budgets of the movies.",
        before: film.clone(),
        new_columns: vec![],
        docs: vec![
            Doc::new("Heat, Michael Mann's crime epic, was made on a budget of $60 million.")
                .ner("Movie", &["Heat"])
                .ae("Heat", "Budget", "$60 million"),
            Doc::new("Se7en cost $33 million to make, well under the $55 million spent on Ronin.")
                .ner("Movie", &["Se7en", "Ronin"])
                .ae("Se7en", "Budget", "$33 million")
                .ae("Ronin", "Budget", "$55 million"),
        ],
        gold: set(
            &set(&film, "Movie", 1.into(), "Budget", t("60M")),
            "Movie",
            4.into(),
            "Budget",
            t("33M"),
        ),
    }));

    out.push(build(Case {
        id: "g02-film-release",
        domain: "film",
        task_type: TaskType::Di,
        instruction: "Fill in the missing release dates of the movies.",
        before: film.clone(),
        new_columns: vec![],
        docs: vec![
            Doc::new("Heat was released in the United States on December 15, 1995.")
                .ner("Movie", &["Heat"])
                .ae("Heat", "Release", "December 15, 1995"),
            Doc::new("Se7en opened on 22 September 1995, sixteen years after Alien premiered on May 25, 1979.")
                .ner("Movie", &["Se7en", "Alien"])
                .ae("Se7en", "Release", "22 September 1995")
                .ae("Alien", "Release", "May 25, 1979"),
        ],
        gold: set(&set(&film, "Movie", 1.into(), "Release", d(1995, 12, 15)), "Movie", 4.into(), "Release", d(1995, 9, 22)),
    }));

    out.push(build(Case {
        id: "g03-film-character-actor",
        domain: "film",
        task_type: TaskType::Di,
        instruction: "Fill in the missing actor of each character.",
        before: film.clone(),
        new_columns: vec![],
        docs: vec![Doc::new("In Heat, Neil McCauley is played by Robert De Niro, opposite Al Pacino as Vincent Hanna.")
            .ner("Character", &["Neil McCauley", "Vincent Hanna"])
            .ner("Actor", &["Robert De Niro", "Al Pacino"])
            .ner("Movie", &["Heat"])
            .re("Neil McCauley", "Actor", &["Robert De Niro"])
            .re("Vincent Hanna", "Actor", &["Al Pacino"])
            .re("Neil McCauley", "Movie", &["Heat"])
            .re("Vincent Hanna", "Movie", &["Heat"])],
        gold: set(&film, "Character", 101.into(), "ActorID", i(11)),
    }));

    out.push(build(Case {
        id: "g04-film-new-movies",
        domain: "film",
        task_type: TaskType::Rp,
        instruction: "Add the new movies described in the articles.",
        before: film.clone(),
        new_columns: vec![],
        docs: vec![
            Doc::new(
                "Oppenheimer, a thriller released on July 21, 2023, was made for $100 million.",
            )
            .ner("Movie", &["Oppenheimer"])
            .ae("Oppenheimer", "Genre", "thriller")
            .ae("Oppenheimer", "Release", "July 21, 2023")
            .ae("Oppenheimer", "Budget", "$100 million"),
            Doc::new("Barbie is a comedy that reached theaters on 21 July 2023.")
                .ner("Movie", &["Barbie"])
                .ae("Barbie", "Genre", "comedy")
                .ae("Barbie", "Release", "21 July 2023"),
        ],
        gold: push(
            &push(
                &film,
                "Movie",
                vec![
                    i(5),
                    t("Oppenheimer"),
                    t("Thriller"),
                    t("100M"),
                    d(2023, 7, 21),
                ],
            ),
            "Movie",
            vec![i(6), t("Barbie"), t("Comedy"), None, d(2023, 7, 21)],
        ),
    }));

    let mut g05 = push(
        &film,
        "Movie",
        vec![
            i(5),
            t("Oppenheimer"),
            t("Thriller"),
            t("100M"),
            d(2023, 7, 21),
        ],
    );
    g05 = push(&g05, "Actor", vec![i(13), t("Cillian Murphy"), t("Cork")]);
    g05 = push(
        &g05,
        "Actor",
        vec![i(14), t("Robert Downey Jr."), t("Manhattan")],
    );
    g05 = push(
        &g05,
        "Character",
        vec![i(102), t("J. Robert Oppenheimer"), i(5), i(13)],
    );
    g05 = push(
        &g05,
        "Character",
        vec![i(103), t("Lewis Strauss"), i(5), i(14)],
    );
    out.push(build(Case {
        id: "g05-film-three-tables",
        domain: "film",
        task_type: TaskType::Rp,
        instruction: "Add the characters together with their movies and the actors who play them.",
        before: film.clone(),
        new_columns: vec![],
        docs: vec![Doc::new(
            "In Oppenheimer, J. Robert Oppenheimer is played by Cillian Murphy and Lewis Strauss by Robert \
             Downey Jr. The thriller was released on July 21, 2023 on a budget of $100 million. Murphy was \
             born in Cork, Downey in Manhattan.",
        )
        .ner("Character", &["J. Robert Oppenheimer", "Lewis Strauss"])
        .ner("Movie", &["Oppenheimer"])
        .ner("Actor", &["Cillian Murphy", "Robert Downey Jr."])
        .re("J. Robert Oppenheimer", "Movie", &["Oppenheimer"])
        .re("Lewis Strauss", "Movie", &["Oppenheimer"])
        .re("J. Robert Oppenheimer", "Actor", &["Cillian Murphy"])
        .re("Lewis Strauss", "Actor", &["Robert Downey Jr."])
        .ae("Oppenheimer", "Genre", "thriller")
        .ae("Oppenheimer", "Release", "July 21, 2023")
        .ae("Oppenheimer", "Budget", "$100 million")
        .ae("Cillian Murphy", "PlaceOfBirth", "Cork")
        .ae("Robert Downey Jr.", "PlaceOfBirth", "Manhattan")],
        gold: g05,
    }));

    out.push(build(Case {
        id: "g06-film-linked-character",
        domain: "film",
        task_type: TaskType::Rp,
        instruction: "Add the new characters mentioned in the reviews.",
        before: film.clone(),
        new_columns: vec![],
        docs: vec![Doc::new(
            "Chris Shiherlis, a member of the crew in Heat, is played by Val Kilmer.",
        )
        .ner("Character", &["Chris Shiherlis"])
        .ner("Movie", &["Heat"])
        .ner("Actor", &["Val Kilmer"])
        .re("Chris Shiherlis", "Movie", &["Heat"])
        .re("Chris Shiherlis", "Actor", &["Val Kilmer"])],
        gold: push(
            &film,
            "Character",
            vec![i(102), t("Chris Shiherlis"), i(1), i(12)],
        ),
    }));

    let director = ColumnDef::new("Director", DataType::Text);
    let mut g07 = film.with_column_unchecked("Movie", director, None);
    g07 = set(&g07, "Movie", 1.into(), "Director", t("Michael Mann"));
    g07 = set(&g07, "Movie", 3.into(), "Director", t("Ridley Scott"));
    out.push(build(Case {
        id: "g07-film-director",
        domain: "film",
        task_type: TaskType::Ca,
        instruction: "Add a new column \"Director\" to the movie table.",
        before: film.clone(),
        new_columns: vec!["Director"],
        docs: vec![
            Doc::new("Heat was written and directed by Michael Mann.")
                .ner("Movie", &["Heat"])
                .ae("Heat", "Director", "Michael Mann"),
            Doc::new("Ridley Scott directed Alien.")
                .ner("Movie", &["Alien"])
                .ae("Alien", "Director", "Ridley Scott"),
        ],
        gold: g07,
    }));

    let mut g08 =
        film.with_column_unchecked("Movie", ColumnDef::new("Premiere", DataType::Date), None);
    g08 = g08.with_column_unchecked("Movie", ColumnDef::new("Runtime", DataType::Integer), None);
    g08 = set(&g08, "Movie", 1.into(), "Premiere", d(1995, 12, 6));
    g08 = set(&g08, "Movie", 1.into(), "Runtime", i(170));
    g08 = set(&g08, "Movie", 2.into(), "Premiere", d(1985, 12, 13));
    g08 = set(&g08, "Movie", 2.into(), "Runtime", i(94));
    out.push(build(Case {
        id: "g08-film-premiere-runtime",
        domain: "film",
        task_type: TaskType::Ca,
        instruction:
            "Add new columns \"Premiere\" (date) and \"Runtime\" (integer) to the movie table.",
        before: film.clone(),
        new_columns: vec!["Premiere", "Runtime"],
        docs: vec![
            Doc::new("Heat premiered in Los Angeles on December 6, 1995 and runs 170 minutes.")
                .ner("Movie", &["Heat"])
                .ae("Heat", "Premiere", "December 6, 1995")
                .ae("Heat", "Runtime", "170"),
            Doc::new("Clue, which runs 94 minutes, premiered on December 13, 1985.")
                .ner("Movie", &["Clue"])
                .ae("Clue", "Premiere", "December 13, 1985")
                .ae("Clue", "Runtime", "94"),
        ],
        gold: g08,
    }));

    let mut g09 = set(
        &sports,
        "Player",
        Literal::text("LeBron James"),
        "Height",
        r(2.06),
    );
    g09 = set(
        &g09,
        "Player",
        Literal::text("Anthony Davis"),
        "Height",
        r(2.08),
    );
    g09 = set(
        &g09,
        "Player",
        Literal::text("Anthony Davis"),
        "Position",
        t("Center"),
    );
    g09 = set(
        &g09,
        "Player",
        Literal::text("Jayson Tatum"),
        "Position",
        t("Forward"),
    );
    out.push(build(Case {
        id: "g09-sports-heights",
        domain: "sports",
        task_type: TaskType::Di,
        instruction: "Fill in the missing heights and positions of the players.",
        before: sports.clone(),
        new_columns: vec![],
        docs: vec![
            Doc::new("LeBron James stands 2.06 m. His teammate Anthony Davis, a center, measures 2.08 m.")
                .ner("Player", &["LeBron James", "Anthony Davis"])
                .ae("LeBron James", "Height", "2.06")
                .ae("LeBron James", "Position", "Forward")
                .ae("Anthony Davis", "Height", "2.08")
                .ae("Anthony Davis", "Position", "Center"),
            Doc::new("Jayson Tatum, 2.03 m, plays forward for the Celtics.")
                .ner("Player", &["Jayson Tatum"])
                .ner("Team", &["Celtics"])
                .ae("Jayson Tatum", "Height", "2.03")
                .ae("Jayson Tatum", "Position", "forward")
                .re("Jayson Tatum", "Team", &["Celtics"]),
        ],
        gold: g09,
    }));

    let g10 = push(
        &sports,
        "Team",
        vec![i(3), t("Warriors"), t("San Francisco")],
    );
    let g10 = push(
        &g10,
        "Player",
        vec![t("Stephen Curry"), r(1.88), t("Guard"), i(3)],
    );
    out.push(build(Case {
        id: "g10-sports-new-player",
        domain: "sports",
        task_type: TaskType::Rp,
        instruction: "Add the players and the teams they play for.",
        before: sports.clone(),
        new_columns: vec![],
        docs: vec![Doc::new(
            "Stephen Curry, a guard listed at 1.88 m, plays for the Warriors of San Francisco.",
        )
        .ner("Player", &["Stephen Curry"])
        .ner("Team", &["Warriors"])
        .ae("Stephen Curry", "Height", "1.88")
        .ae("Stephen Curry", "Position", "Guard")
        .re("Stephen Curry", "Team", &["Warriors"])
        .ae("Warriors", "City", "San Francisco")],
        gold: g10,
    }));

    let g11 = set(
        &set(&geo, "City", 1.into(), "Population", i(2_161_000)),
        "City",
        3.into(),
        "Population",
        i(2_700_000),
    );
    out.push(build(Case {
        id: "g11-geo-population",
        domain: "geography",
        task_type: TaskType::Di,
        instruction: "Fill in the missing population of each city.",
        before: geo.clone(),
        new_columns: vec![],
        docs: vec![
            Doc::new("Paris has a population of 2,161,000 within its city limits.")
                .ner("City", &["Paris"])
                .ner("Country", &["France"])
                .ae("Paris", "Population", "2,161,000")
                .re("Paris", "Country", &["France"]),
            Doc::new(
                "Osaka is home to about 2.7 million people, far more than Lyon with its 513,275.",
            )
            .ner("City", &["Osaka", "Lyon"])
            .ae("Osaka", "Population", "2.7 million")
            .ae("Lyon", "Population", "513,275"),
        ],
        gold: g11,
    }));

    let g12 =
        books.with_column_unchecked("Book", ColumnDef::new("Publisher", DataType::Text), None);
    let g12 = set(&g12, "Book", 1.into(), "Publisher", t("Chilton Books"));
    let g12 = set(&g12, "Book", 2.into(), "Publisher", t("John Murray"));
    let g12 = set(
        &g12,
        "Book",
        3.into(),
        "Publisher",
        t("Shakespeare and Company"),
    );
    out.push(build(Case {
        id: "g12-books-publisher",
        domain: "books",
        task_type: TaskType::Ca,
        instruction: "Add a column \"Publisher\" to the book table.",
        before: books.clone(),
        new_columns: vec!["Publisher"],
        docs: vec![
            Doc::new("Dune was first published in 1965 by Chilton Books.")
                .ner("Book", &["Dune"])
                .ae("Dune", "Publisher", "Chilton Books")
                .ae("Dune", "Year", "1965"),
            Doc::new("Emma appeared in 1815 from John Murray, and Ulysses in 1922 from Shakespeare and Company.")
                .ner("Book", &["Emma", "Ulysses"])
                .ae("Emma", "Publisher", "John Murray")
                .ae("Ulysses", "Publisher", "Shakespeare and Company"),
        ],
        gold: g12,
    }));

    let g13 = push(&geo, "City", vec![i(4), t("Nagoya"), i(2_332_000), i(2)]);
    let g13 = push(&g13, "City", vec![i(5), t("Marseille"), i(870_000), i(1)]);
    out.push(build(Case {
        id: "g13-geo-new-cities",
        domain: "geography",
        task_type: TaskType::Rp,
        instruction: "Add the new cities from the travel notes.",
        before: geo.clone(),
        new_columns: vec![],
        docs: vec![
            Doc::new("Nagoya, a city of 2,332,000 people, lies in central Japan.")
                .ner("City", &["Nagoya"])
                .ner("Country", &["Japan"])
                .ae("Nagoya", "Population", "2,332,000")
                .re("Nagoya", "Country", &["Japan"]),
            Doc::new("Marseille, France, counts 870,000 residents.")
                .ner("City", &["Marseille"])
                .ner("Country", &["France"])
                .ae("Marseille", "Population", "870,000")
                .re("Marseille", "Country", &["France"]),
        ],
        gold: g13,
    }));

    out
}
