use super::*;
use crate::db::testing::movie_db;
use crate::feedback::FeedbackCategory;
use crate::observer::analyze_schema;
use alloc::string::ToString;
use alloc::vec;

const GOOD: &str = "```plan\nlet x = 1\n```";
const BAD: &str = "let x = (";

/// Replies from a script, the last one repeating; remembers the history
/// length it was shown each time.
struct Scripted {
    replies: Vec<&'static str>,
    calls: usize,
    seen_history: Vec<usize>,
}

impl Scripted {
    fn new(replies: &[&'static str]) -> Self {
        Self {
            replies: replies.to_vec(),
            calls: 0,
            seen_history: Vec::new(),
        }
    }
}

impl PlanGenerator for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn generate(&mut self, ctx: &PlannerContext) -> Result<Generation, PlannerError> {
        let r = self.replies[self.calls.min(self.replies.len() - 1)];
        self.calls += 1;
        self.seen_history.push(ctx.feedback_history.len());
        Ok(Generation {
            prompt: None,
            reply: r.into(),
            source: extract_plan(r),
        })
    }
}

fn ctx() -> PlannerContext {
    PlannerContext::new(
        "Fill in the missing budgets.",
        analyze_schema(&movie_db(), 12),
    )
}

const DEFAULT: Limits = Limits {
    max_revisions: 10,
    max_restarts: 2,
};

#[test]
fn always_failing_planner_uses_the_whole_budget() {
    let mut g = Scripted::new(&[BAD]);
    let mut log = Vec::new();
    let r = revise_loop(
        &mut ctx(),
        &mut g,
        |_| vec![],
        |_| Ok(()),
        DEFAULT,
        &mut log,
    );
    let report = r.unwrap_err();
    assert_eq!(report.generations, 33);
    assert_eq!(g.calls, 33);
    assert_eq!(report.error, None);
    assert_eq!(report.last_feedback[0].category, FeedbackCategory::Syntax);
    // a restart starts from an empty history
    let expected: Vec<usize> = (0..3).flat_map(|_| 0..11).collect();
    assert_eq!(g.seen_history, expected);
    assert_eq!(
        log.iter()
            .filter(|e| matches!(e, SessionEvent::Restart { .. }))
            .count(),
        2
    );
    assert_eq!(
        log.last(),
        Some(&SessionEvent::Finish {
            success: false,
            generations: 33
        })
    );
}

#[test]
fn second_generation_succeeds() {
    let mut g = Scripted::new(&[BAD, GOOD]);
    let r = revise_loop(
        &mut ctx(),
        &mut g,
        |_| vec![],
        |_| Ok(7),
        DEFAULT,
        &mut Vec::new(),
    )
    .unwrap();
    assert_eq!(
        (r.generations, r.revision_index, r.restart_index, r.outcome),
        (2, 1, 0, 7)
    );
    assert_eq!(g.calls, 2);
}

#[test]
fn first_plan_correct_needs_no_revision() {
    let mut g = Scripted::new(&[GOOD]);
    let r = revise_loop(
        &mut ctx(),
        &mut g,
        |_| vec![],
        |_| Ok(()),
        DEFAULT,
        &mut Vec::new(),
    )
    .unwrap();
    assert_eq!(
        (r.generations, r.revision_index, r.restart_index),
        (1, 0, 0)
    );
}

#[test]
fn analyzer_and_execution_findings_consume_revisions() {
    let mut g = Scripted::new(&[GOOD]);
    let mut analyzed = 0;
    let mut executed = 0;
    let r = revise_loop(
        &mut ctx(),
        &mut g,
        |_| {
            analyzed += 1;
            if analyzed == 1 {
                vec![Feedback::syntax("bad", None)]
            } else {
                vec![]
            }
        },
        |_| {
            executed += 1;
            if executed == 1 {
                Err(vec![Feedback::logic("remote failed", None, "a", "b")])
            } else {
                Ok(())
            }
        },
        DEFAULT,
        &mut Vec::new(),
    )
    .unwrap();
    assert_eq!(r.generations, 3);
    assert_eq!(r.revision_index, 2);
}

#[test]
fn one_shot_makes_a_single_attempt() {
    let mut g = Scripted::new(&[BAD]);
    let limits = Limits {
        max_revisions: 0,
        max_restarts: 0,
    };
    let r = revise_loop(
        &mut ctx(),
        &mut g,
        |_| vec![],
        |_| Ok(()),
        limits,
        &mut Vec::new(),
    );
    assert_eq!(r.unwrap_err().generations, 1);
}

struct Flaky {
    calls: usize,
}

impl CompletionClient for Flaky {
    fn complete(&mut self, _prompt: &str) -> Result<String, CompletionError> {
        self.calls += 1;
        match self.calls {
            1 => Ok("no plan here (".into()),
            _ => Ok(GOOD.into()),
        }
    }
}

#[test]
fn replaying_a_session_reproduces_the_plan() {
    let mut live = Flaky { calls: 0 };
    let mut log = Vec::new();
    let first = revise_loop(
        &mut ctx(),
        &mut LlmPlanner::new(&mut live),
        |_| vec![],
        |_| Ok(()),
        DEFAULT,
        &mut log,
    )
    .unwrap();
    let mut replay = ReplayClient::from_session(&log);
    let mut log2 = Vec::new();
    let second = revise_loop(
        &mut ctx(),
        &mut LlmPlanner::new(&mut replay),
        |_| vec![],
        |_| Ok(()),
        DEFAULT,
        &mut log2,
    )
    .unwrap();
    assert_eq!(first.source, second.source);
    assert_eq!(log, log2);
    // the second prompt carried the parse findings
    let prompts: Vec<&String> = log
        .iter()
        .filter_map(|e| match e {
            SessionEvent::Generation {
                prompt: Some(p), ..
            } => Some(p),
            _ => None,
        })
        .collect();
    assert!(!prompts[0].contains("Earlier attempts"));
    assert!(prompts[1].contains("Earlier attempts") && prompts[1].contains("[syntax]"));
}

#[test]
fn unavailable_backend_stops_the_loop() {
    let mut empty = ReplayClient::default();
    let r = revise_loop(
        &mut ctx(),
        &mut LlmPlanner::new(&mut empty),
        |_| vec![],
        |_| Ok(()),
        DEFAULT,
        &mut Vec::new(),
    );
    let report = r.unwrap_err();
    assert_eq!(report.generations, 1);
    assert!(matches!(
        report.error,
        Some(PlannerError::BackendUnavailable(_))
    ));
}

#[test]
fn plan_llm_reports_unparsable_replies() {
    let mut c = Flaky { calls: 0 };
    assert!(matches!(plan_llm(&ctx(), &mut c), Err(PlannerError::Unparsable(f)) if !f.is_empty()));
    assert_eq!(plan_llm(&ctx(), &mut c).unwrap().statements.len(), 1);
}

#[test]
fn template_planner_ignores_feedback() {
    let db = movie_db();
    let obs = analyze_schema(&db, 12);
    let mut t = TemplatePlanner::new("Fill in the missing budgets.", &db, &obs);
    let a = t.generate(&ctx()).unwrap();
    let mut c = ctx();
    c.feedback_history
        .push(("x".to_string(), vec![Feedback::syntax("bad", None)]));
    assert_eq!(t.generate(&c).unwrap(), a);
    let mut none = TemplatePlanner::new("Do something.", &db, &obs);
    assert_eq!(none.generate(&ctx()), Err(PlannerError::NoTargetTable));
}
