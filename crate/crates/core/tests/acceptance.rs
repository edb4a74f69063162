//! Acceptance criteria. Runs without the test harness so every criterion
//! prints its own PASS/FAIL line; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use forcing_lab::bruteforce::falling_ratio;
use forcing_lab::verify::{run_suite, uniformize_corpus, RunConfig, Suite, SuiteReport};
use num_bigint::BigUint;
use serde_json::Value;

struct Outcome {
    passed: bool,
    note: String,
}

fn suite(suite: Suite, tweak: impl FnOnce(&mut RunConfig)) -> Result<SuiteReport, String> {
    let mut config = RunConfig::new(format!("acceptance {suite}"));
    tweak(&mut config);
    run_suite(suite, &config, None).map_err(|e| e.to_string())
}

fn field(v: &Value, key: &str) -> u64 {
    v[key].as_u64().or_else(|| v[key].as_str().and_then(|s| s.parse().ok())).unwrap_or(u64::MAX)
}

fn summary(r: &SuiteReport) -> String {
    format!("{} instances, {} failed", r.checked, r.failed)
}

fn tree_size_law() -> Result<Outcome, String> {
    let r = suite(Suite::TreeProps, |_| {})?;
    // closed form against a plain falling product
    let exact = r.instances.iter().all(|i| {
        let (k, d) = (field(&i.params, "o_len") as usize, field(&i.params, "d") as usize);
        field(&i.detail, "leaves") == falling_ratio(k + d, k)
    });
    Ok(Outcome {
        passed: r.passed && exact && r.checked == 16,
        note: summary(&r),
    })
}

fn antichain_upper_bound() -> Result<Outcome, String> {
    let r = suite(Suite::UpperBound, |_| {})?;
    let grid_ok = r.instances.iter().all(|i| field(&i.params, "m") <= 7);
    Ok(Outcome {
        passed: r.passed && grid_ok,
        note: summary(&r),
    })
}

fn envelope_lemma() -> Result<Outcome, String> {
    let r = suite(Suite::Envelope, |c| {
        c.n = Some(5);
        c.length_cap = Some(4);
    })?;
    let zero = r.instances.iter().all(|i| field(&i.detail, "counterexamples") == 0);
    let checks: u64 = r.instances.iter().map(|i| field(&i.detail, "gain_checks")).sum();
    Ok(Outcome {
        passed: r.passed && zero,
        note: format!("{}, {checks} gain checks", summary(&r)),
    })
}

fn uniformization() -> Result<Outcome, String> {
    let corpus = uniformize_corpus(0).map_err(|e| e.to_string())?;
    let in_range = corpus.iter().all(|c| c.array.p <= 3 && c.array.h <= 3 && c.universe.n <= 6);
    let r = suite(Suite::Uniformize, |_| {})?;
    let staged = r.instances.iter().all(|i| {
        i.detail["rows"].as_array().is_some_and(|rows| {
            rows.iter().all(|row| {
                row["stage_sizes"].as_array().map(Vec::len) == row["invariant_checks"].as_array().map(Vec::len)
            })
        })
    });
    Ok(Outcome {
        passed: r.passed && staged && in_range && corpus.len() >= 20 && r.checked == corpus.len(),
        note: format!("{} arrays, {}", corpus.len(), summary(&r)),
    })
}

fn array_inequality() -> Result<Outcome, String> {
    let r = suite(Suite::ArrayInequality, |_| {})?;
    let nonexistent = r
        .instances
        .iter()
        .filter(|i| i.detail["verdict"] == "nonexistent")
        .count();
    let witnesses = r.instances.iter().filter(|i| i.detail["verdict"] == "exists").count();
    Ok(Outcome {
        passed: r.passed,
        note: format!("{nonexistent} nonexistence certificates, {witnesses} witnesses"),
    })
}

fn compilation_soundness() -> Result<Outcome, String> {
    let r = suite(Suite::CompileSoundness, |_| {})?;
    let trees: u64 = r.instances.iter().map(|i| field(&i.detail, "trees")).sum();
    Ok(Outcome {
        passed: r.passed && r.checked == 4,
        note: format!("{trees} trees over n = 1..4"),
    })
}

fn single_step_totality() -> Result<Outcome, String> {
    let r = suite(Suite::SingleStep, |_| {})?;
    let n4 = r.instances.last().map(|i| i.detail.clone()).unwrap_or_default();
    Ok(Outcome {
        passed: r.passed,
        note: format!(
            "n = 4: {} trees, {} accepting families, {} programs up to family",
            field(&n4, "trees"),
            field(&n4, "accepting_families"),
            field(&n4, "combinations")
        ),
    })
}

fn frame_bounds() -> Result<Outcome, String> {
    let r = suite(Suite::FrameBounds, |_| {})?;
    let mut formulas_ok = true;
    let mut variants = 0;
    for i in &r.instances {
        let (n, k, d) = (field(&i.params, "n"), field(&i.params, "base_size"), field(&i.params, "d"));
        let expected = match i.params["frame"].as_str() {
            Some("tournament") => (0..d).fold(BigUint::from(1u32), |acc, j| acc << (k + j)),
            Some("partialfn") => BigUint::from(2 * n).pow(d as u32),
            _ => continue,
        };
        variants += 1;
        formulas_ok &= i.detail["tree_formula"].as_str() == Some(expected.to_string().as_str())
            && field(&i.detail, "tree_size").to_string() == expected.to_string()
            && BigUint::from(field(&i.detail, "max_antichain")) <= expected;
    }
    Ok(Outcome {
        passed: r.passed && formulas_ok,
        note: format!("{variants} tournament/partial-function instances"),
    })
}

fn game_effectiveness() -> Result<Outcome, String> {
    let r = suite(Suite::Game, |c| c.rounds = Some(30))?;
    let game = |name: &str| r.instances.iter().find(|i| i.params["game"] == name);
    let min = game("min").is_some_and(|i| i.passed && field(&i.params, "rounds") == 30);
    let dlo = game("dlo").is_some_and(|i| i.passed && field(&i.params, "x_size") >= 6);
    Ok(Outcome {
        passed: min && dlo,
        note: format!(
            "MIN rounds {}, dense DLO rounds {}",
            game("min").map_or(0, |i| field(&i.detail, "min_rounds")),
            game("dlo").map_or(0, |i| field(&i.detail, "dense_rounds"))
        ),
    })
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Result<Outcome, String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "tree size law", Some(Duration::from_secs(10)), tree_size_law),
        (2, "antichain upper bound", Some(Duration::from_secs(60)), antichain_upper_bound),
        (3, "envelope lemma", None, envelope_lemma),
        (4, "row uniformization", None, uniformization),
        (5, "array inequality", None, array_inequality),
        (6, "compilation soundness", None, compilation_soundness),
        (7, "single-step totality", None, single_step_totality),
        (8, "frame bounds", None, frame_bounds),
        (9, "game effectiveness", None, game_effectiveness),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let (passed, note) = match outcome {
            Ok(o) => (o.passed && in_time, o.note),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id} ({name}): {note} [{:.2}s]", elapsed.as_secs_f64());
    }
    let total = start.elapsed();
    let total_ok = total < Duration::from_secs(300);
    if !total_ok {
        failures += 1;
    }
    println!(
        "{} total runtime {:.2}s (limit 300s)",
        if total_ok { "PASS" } else { "FAIL" },
        total.as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
