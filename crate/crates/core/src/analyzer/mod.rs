//! Checks a plan before it runs for real: the typechecker, a simulated run
//! against a mock instance, the integrity of what that run proposes, and a
//! comparison with the changes the mock expects.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::config::EngineConfig;
use crate::db::{check_integrity, diff, Database, DiffTuple, Violation};
use crate::executor::{self, commit, preview, CommitError, RunError};
use crate::feedback::Feedback;
use crate::observer::{column_demonstrations, MockInstance, Observation};
use crate::plan::{parse, typecheck, PlanProgram, Span};
use crate::tools::{FrozenClock, MockBackend, Proposal, ToolContext, ToolHub};

/// At most this many mismatching columns are reported from one comparison.
const MAX_DIFF_FINDINGS: usize = 6;

/// Parses `source`, then analyzes it. Parse errors come back as syntax
/// feedback.
pub fn analyze_source(
    source: &str,
    db: &Database,
    obs: &Observation,
    mock: &MockInstance,
    config: &EngineConfig,
) -> (Option<PlanProgram>, Vec<Feedback>) {
    match parse(source) {
        Ok(plan) => {
            let fb = analyze(&plan, db, obs, mock, config);
            (Some(plan), fb)
        }
        Err(diags) => (None, diags.iter().map(Feedback::from_diagnostic).collect()),
    }
}

/// Every finding about `plan`, from the first stage that has any. An
/// empty list clears the plan for execution.
///
/// `db` is the schema the plan is checked against; the simulated run uses
/// the mock's database, documents and fixtures and never reaches a remote
/// backend.
pub fn analyze(
    plan: &PlanProgram,
    db: &Database,
    obs: &Observation,
    mock: &MockInstance,
    config: &EngineConfig,
) -> Vec<Feedback> {
    let syntax: Vec<Feedback> = typecheck(plan, db)
        .iter()
        .filter(|d| d.is_error())
        .map(Feedback::from_diagnostic)
        .collect();
    if !syntax.is_empty() {
        return syntax;
    }
    run_simulated_test(plan, mock, obs, config).1
}

/// Runs `plan` on the mock and checks the outcome: runtime failures and
/// wrong results are logic findings, constraint breaks are integrity
/// findings. Returns the proposals the run made, if it got that far.
pub fn run_simulated_test(
    plan: &PlanProgram,
    mock: &MockInstance,
    obs: &Observation,
    config: &EngineConfig,
) -> (Vec<Proposal>, Vec<Feedback>) {
    let backend = MockBackend::new(mock.fixtures.clone());
    let hub = ToolHub::new(&backend, config.link_threshold, &FrozenClock);
    let ctx = ToolContext {
        demonstrations: column_demonstrations(&mock.database, config.demo_k, config.seed),
        documents: mock.documents.clone(),
    };
    let proposed = match executor::run(plan, &mock.database, &hub, &ctx, None) {
        Ok(p) => p,
        Err(f) => return (Vec::new(), alloc::vec![simulated_failure(&f.error)]),
    };
    let integrity = integrity_findings(&mock.database, &proposed.proposals, &proposed.spans);
    if !integrity.is_empty() {
        return (proposed.proposals, integrity);
    }
    let after = commit(&mock.database, &proposed.proposals)
        .expect("integrity findings were empty")
        .database;
    let actual = diff(&mock.database, &after).expect("commit only extends the schema");
    let logic = compare_diffs(
        &mock.expected_diff,
        &actual,
        &proposed.proposals,
        &proposed.spans,
        obs,
    );
    (proposed.proposals, logic)
}

fn simulated_failure(e: &RunError) -> Feedback {
    let mut fb = e.to_feedback();
    fb.message = format!("simulated run failed: {}", fb.message);
    fb
}

/// Constraint breaks of committing `proposals`: the commit error itself
/// plus every violation the unchecked application shows that `db` did
/// not already have.
fn integrity_findings(db: &Database, proposals: &[Proposal], spans: &[Span]) -> Vec<Feedback> {
    let err = match commit(db, proposals) {
        Ok(_) => return Vec::new(),
        Err(e) => e,
    };
    let mut out = Vec::new();
    let span_of = |i: Option<u32>| i.and_then(|i| spans.get(i as usize)).copied();
    match &err {
        CommitError::Integrity(_) => {}
        other => out.push(Feedback::integrity(
            other.to_string(),
            span_of(other.proposal()),
        )),
    }
    let before: BTreeSet<String> = check_integrity(db)
        .iter()
        .map(Violation::to_string)
        .collect();
    for v in check_integrity(&preview(db, proposals)) {
        if before.contains(&v.to_string()) {
            continue;
        }
        let span = proposals
            .iter()
            .position(|p| p.table() == v.table && !matches!(p, Proposal::AddColumns { .. }))
            .and_then(|i| spans.get(i))
            .copied();
        let fb = Feedback::integrity(v.to_string(), span);
        if !out.contains(&fb) {
            out.push(fb);
        }
    }
    if out.is_empty() {
        out.push(Feedback::integrity(
            err.to_string(),
            span_of(err.proposal()),
        ));
    }
    out
}

/// Logic findings for every column whose changes differ from the
/// expected ones.
fn compare_diffs(
    expected: &BTreeSet<DiffTuple>,
    actual: &BTreeSet<DiffTuple>,
    proposals: &[Proposal],
    spans: &[Span],
    obs: &Observation,
) -> Vec<Feedback> {
    if expected == actual {
        return Vec::new();
    }
    let mut groups: BTreeMap<(&str, &str), (Vec<&DiffTuple>, Vec<&DiffTuple>)> = BTreeMap::new();
    for t in expected.difference(actual) {
        groups.entry((&t.table, &t.column)).or_default().0.push(t);
    }
    for t in actual.difference(expected) {
        groups.entry((&t.table, &t.column)).or_default().1.push(t);
    }
    let mut out = Vec::new();
    for ((table, column), (missing, extra)) in groups.iter().take(MAX_DIFF_FINDINGS) {
        let span = proposals
            .iter()
            .position(|p| p.table() == *table)
            .and_then(|i| spans.get(i))
            .copied();
        let mut message = match (missing.is_empty(), extra.is_empty()) {
            (false, true) => format!(
                "`{table}.{column}` is missing {} expected value(s)",
                missing.len()
            ),
            (true, false) => format!(
                "`{table}.{column}` receives {} value(s) the task does not call for",
                extra.len()
            ),
            _ => format!("`{table}.{column}` receives wrong values"),
        };
        if span.is_none() {
            message.push_str("; no update tool writes to this table");
        }
        if let Some(fmt) = obs
            .table(table)
            .and_then(|t| t.column(column))
            .and_then(|c| c.detected_format.as_ref())
        {
            if extra.iter().any(|t| !fmt.matches(&t.value)) {
                message.push_str(&format!("; values of this column follow the format {fmt}"));
            }
        }
        out.push(Feedback::logic(
            message,
            span,
            render(missing),
            render(extra),
        ));
    }
    if groups.len() > MAX_DIFF_FINDINGS {
        let rest = groups.len() - MAX_DIFF_FINDINGS;
        let last = out.last_mut().expect("at least one finding");
        last.message
            .push_str(&format!(" ({rest} more column(s) differ)"));
    }
    out
}

fn render(tuples: &[&DiffTuple]) -> String {
    const SHOWN: usize = 3;
    if tuples.is_empty() {
        return "no change".to_string();
    }
    let mut parts: Vec<String> = tuples
        .iter()
        .take(SHOWN)
        .map(|t| {
            format!(
                "{} = {} where {} = {}",
                t.column, t.value, t.pk_column, t.pk_value
            )
        })
        .collect();
    if tuples.len() > SHOWN {
        parts.push(format!("and {} more", tuples.len() - SHOWN));
    }
    parts.join("; ")
}
