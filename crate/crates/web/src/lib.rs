//! Browser demo: three operations over JSON strings, exported through
//! wasm-bindgen and usable natively for tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use wasm_bindgen::prelude::*;

use forcing_lab::bruteforce::EnumerationBudget;
use forcing_lab::frame::frame_bound_check;
use forcing_lab::game::{run_game, DloPlayer, MinPlayer, PassPlayer, Strategy};
use forcing_lab::trees::envelope;
use forcing_lab::variants::{PartialFnCondition, PartialFnFrame, TournamentCondition, TournamentFrame};
use forcing_lab::{Condition, OrderFrame, Universe};

// the page runs on the main thread; keep searches short
const BUDGET_NODES: u64 = 2_000_000;
const MAX_N: usize = 8;

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("not a number: {s:?}")))
        .collect()
}

fn small(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_N {
        return Err(format!("n must be between 1 and {MAX_N}"));
    }
    Ok(())
}

/// Uniform tree size, closed form and exhaustive antichain maximum.
pub fn counts_json(frame: &str, n: usize, base_len: usize, depth: usize) -> Result<String, String> {
    small(n)?;
    let budget = EnumerationBudget::default().with_nodes(BUDGET_NODES);
    let report = match frame {
        "order" => {
            let f = OrderFrame::new(Universe::full(n).map_err(|e| e.to_string())?);
            let base = Condition::new((0..base_len).collect()).map_err(|e| e.to_string())?;
            frame_bound_check(&f, &base, depth, &budget)
        }
        "tournament" => {
            let f = TournamentFrame::new(n, n).map_err(|e| e.to_string())?;
            let edges = (0..base_len).flat_map(|u| (u + 1..base_len).map(move |v| (u, v)));
            let base = TournamentCondition::new(0..base_len, edges).map_err(|e| e.to_string())?;
            frame_bound_check(&f, &base, depth, &budget)
        }
        "partialfn" => {
            let f = PartialFnFrame::new(n, n).map_err(|e| e.to_string())?;
            let base = PartialFnCondition::new((0..base_len).map(|x| (x, x))).map_err(|e| e.to_string())?;
            frame_bound_check(&f, &base, depth, &budget)
        }
        other => return Err(format!("unknown frame {other:?}")),
    };
    report.map(|r| to_json(&r)).map_err(|e| e.to_string())
}

/// Leaves of the envelope of `q` towards `s`, both given as lists.
pub fn envelope_json(n: usize, q: &str, s: &str) -> Result<String, String> {
    small(n)?;
    let u = Universe::full(n).map_err(|e| e.to_string())?;
    let q = u.condition(parse_list(q)?).map_err(|e| e.to_string())?;
    let s = u.condition(parse_list(s)?).map_err(|e| e.to_string())?;
    envelope(&u, &q, &s).map(|e| to_json(&e)).map_err(|e| e.to_string())
}

/// An order-frame game between the MIN, DLO and PASS players.
pub fn play_game_json(n: usize, rounds: usize, schedule: &str, x: &str) -> Result<String, String> {
    if n == 0 || n > 64 {
        return Err("n must be between 1 and 64".into());
    }
    let frame = OrderFrame::new(Universe::full(n).map_err(|e| e.to_string())?);
    let x: BTreeSet<usize> = parse_list(x)?.into_iter().collect();
    let schedule: Vec<String> = schedule
        .split(',')
        .map(|s| s.trim().to_uppercase())
        .filter(|s| !s.is_empty())
        .collect();
    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
    players.insert("MIN".into(), Box::new(MinPlayer::new(n)));
    players.insert("DLO".into(), Box::new(DloPlayer::new(x)));
    players.insert("PASS".into(), Box::new(PassPlayer));
    match run_game(&frame, &schedule, &mut players, rounds.min(200)) {
        Ok(t) => Ok(to_json(&t)),
        Err(abort) => Err(format!(
            "{} (after {} rounds)",
            abort.error,
            abort.transcript.rounds.len()
        )),
    }
}

#[wasm_bindgen]
pub fn counts(frame: &str, n: usize, base_len: usize, depth: usize) -> Result<String, JsValue> {
    counts_json(frame, n, base_len, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = envelope)]
pub fn envelope_js(n: usize, q: &str, s: &str) -> Result<String, JsValue> {
    envelope_json(n, q, s).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn play_game(n: usize, rounds: usize, schedule: &str, x: &str) -> Result<String, JsValue> {
    play_game_json(n, rounds, schedule, x).map_err(|e| JsValue::from_str(&e))
}
