//! One line per acceptance criterion; exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::process::ExitCode;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use common::checks::{atomicity, budget_run, fault_detection, golden_macro_f1};
use common::gen::{brute_force_diff, mutate, random_database, random_program, rng, MUTATIONS};
use common::golden::golden_suite;
use common::oracles::{compensated_mean, literal_rows, sets, TABLE};
use opal::config::RemoteSettings;
use opal::format::{load_database, save_database};
use opal::remote::RemoteBackend;
use opal::SystemClock;
use opal_core::db::diff;
use opal_core::engine::run_instance;
use opal_core::eval::{classify_difficulty, macro_f1, score_instance, Difficulty, InstanceScore};
use opal_core::plan::{format, parse};
use opal_core::tools::{FixtureSet, FrozenClock, MockBackend};
use opal_core::EngineConfig;
use rand::Rng;
use support::FixtureServer;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn diff_oracle() -> Outcome {
    let start = Instant::now();
    for seed in 0..500u64 {
        let mut r = rng(seed);
        let before = random_database(&mut r);
        let after = mutate(&mut r, &before, MUTATIONS[(seed % 3) as usize]);
        let got = diff(&before, &after).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(got == brute_force_diff(&before, &after), || {
            format!("seed {seed}: differs from the oracle")
        })?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("500 pairs agree in {took:.2?}"))
}

fn scoring() -> Outcome {
    for (gold, predicted, matched, p, r, f) in TABLE {
        let (pred, g) = sets(gold, predicted, matched);
        let s = score_instance(&pred, &g);
        let close = (s.precision - p).abs() < 1e-9
            && (s.recall - r).abs() < 1e-9
            && (s.f1 - f).abs() < 1e-9;
        ensure(close, || format!("({gold},{predicted},{matched}): {s:?}"))?;
    }
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let f1s: Vec<f64> = (0..r.random_range(1..=300)).map(|_| r.random()).collect();
        let scores: Vec<InstanceScore> = f1s
            .iter()
            .map(|&f1| InstanceScore {
                f1,
                ..InstanceScore::zero(1)
            })
            .collect();
        let got = macro_f1(&scores).map_err(|e| format!("list {i}: {e}"))?;
        let err = (got - compensated_mean(&f1s)).abs();
        ensure(err <= 1e-12, || format!("list {i}: off by {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!(
        "{} table rows within 1e-9, 1000 means within {worst:.1e}",
        TABLE.len()
    ))
}

fn difficulty() -> Outcome {
    for (t, want) in [
        ((1, 10, 1000), Difficulty::Easy),
        ((1, 20, 2000), Difficulty::Medium),
        ((2, 1, 1), Difficulty::Hard),
    ] {
        let got = classify_difficulty(t.0, t.1, t.2);
        ensure(got == want, || format!("{t:?} is {got}"))?;
    }
    let mut r = rng(3);
    let mut seen = [0usize; 3];
    for _ in 0..10_000 {
        let t = (
            r.random_range(1..=4),
            r.random_range(0..=40),
            r.random_range(0..=4000),
        );
        let got = classify_difficulty(t.0, t.1, t.2);
        if let Some(want) = literal_rows(t.0, t.1, t.2) {
            ensure(got == want, || format!("{t:?} is {got}, expected {want}"))?;
        }
        seen[got as usize] += 1;
    }
    ensure(seen.iter().all(|&n| n > 0), || {
        format!("levels seen {seen:?}")
    })?;
    Ok(format!(
        "boundaries hold, 10000 triples classified {seen:?}"
    ))
}

fn round_trips() -> Outcome {
    for seed in 0..1000u64 {
        let db = random_database(&mut rng(seed));
        let text = save_database(&db);
        let back = load_database(text.as_bytes()).map_err(|e| format!("db {seed}: {e}"))?;
        ensure(
            back == db && format!("{back:?}") == format!("{db:?}"),
            || format!("db {seed} changed"),
        )?;
        let p = random_program(&mut rng(seed));
        let src = format(&p);
        ensure(parse(&src).as_ref() == Ok(&p), || {
            format!("plan {seed} changed:\n{src}")
        })?;
    }
    Ok("1000 databases and 1000 plans".into())
}

fn faults() -> Outcome {
    let s = fault_detection();
    ensure(
        s.syntax.0 == s.syntax.1 && s.integrity.0 == s.integrity.1,
        || format!("{s:?}"),
    )?;
    ensure(s.logic.0 * 10 >= s.logic.1 * 8, || format!("{s:?}"))?;
    ensure(s.clean.0 >= 10 && s.clean.1 == 0, || format!("{s:?}"))?;
    Ok(format!(
        "syntax {}/{}, logic {}/{}, integrity {}/{}, {} findings on {} clean plans",
        s.syntax.0,
        s.syntax.1,
        s.logic.0,
        s.logic.1,
        s.integrity.0,
        s.integrity.1,
        s.clean.1,
        s.clean.0
    ))
}

fn golden() -> Outcome {
    let (f1, n, took) = golden_macro_f1();
    ensure(
        n >= 10 && f1 == 1.0 && took < Duration::from_secs(60),
        || format!("{n} instances, F1 {f1} in {took:?}"),
    )?;
    Ok(format!("{n} instances, F1 {f1} in {took:.2?}"))
}

fn budget() -> Outcome {
    let budget = EngineConfig::default().generation_budget();
    let (calls, run) = budget_run(u32::MAX);
    let generations = run.result.as_ref().err().map(|e| e.generations);
    ensure(
        u64::from(calls) == budget && generations.map(u64::from) == Some(budget),
        || format!("{calls} prompts, {generations:?} generations, budget {budget}"),
    )?;
    let (second, run) = budget_run(1);
    ensure(second == 2 && run.result.is_ok(), || {
        format!("{second} prompts when the second succeeds")
    })?;
    Ok(format!(
        "{calls} generations when always failing, {second} when the second succeeds"
    ))
}

fn atomic() -> Outcome {
    let s = atomicity(100, 8);
    ensure(s.leaked.is_empty(), || s.leaked.join("; "))?;
    Ok(format!("{} injected-failure runs, none leaked", s.runs))
}

fn remote_replay() -> Outcome {
    let suite = golden_suite();
    let mut fixtures = FixtureSet::default();
    for g in &suite {
        fixtures.extend(g.fixtures.clone());
    }
    let server = FixtureServer::start(fixtures);
    let settings = RemoteSettings {
        endpoint: Some(server.url.clone()),
        request_timeout_s: 10,
        ..RemoteSettings::default()
    };
    let remote = RemoteBackend::new(&settings).map_err(|e| e.to_string())?;
    let cfg = EngineConfig::default();
    for g in &suite {
        let id = &g.instance.id;
        let live = run_instance(&g.instance, &cfg, &remote, &SystemClock, None);
        let out = live
            .result
            .as_ref()
            .map_err(|e| format!("{id}: {}", e.message()))?;
        let replay = run_instance(
            &g.instance,
            &cfg,
            &MockBackend::new(live.trace.to_fixtures()),
            &FrozenClock,
            None,
        );
        let again = replay
            .result
            .map_err(|e| format!("{id} replay: {}", e.message()))?;
        ensure(
            save_database(&again.database) == save_database(&out.database),
            || format!("{id}: databases differ"),
        )?;
        ensure(again.diff == out.diff, || format!("{id}: diffs differ"))?;
    }
    Ok(format!(
        "{} traces over {} requests replay identically",
        suite.len(),
        server.requests.load(Ordering::SeqCst)
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("diff matches the brute-force oracle", diff_oracle),
        ("scores match the worked table", scoring),
        ("difficulty levels", difficulty),
        ("formats round-trip", round_trips),
        ("analyzer reports planted faults", faults),
        ("golden suite is solved", golden),
        ("generation budget", budget),
        ("failed runs leave the database unchanged", atomic),
        ("remote traces replay through the mock", remote_replay),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria met",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
