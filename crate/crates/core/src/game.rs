//! The round-based game: each scheduled player receives the current
//! condition and must return an extension of it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, OrderFrame};
use crate::machines::{compile, CompiledFamily, OracleProgram};
use crate::poset::{Condition, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round<C> {
    pub index: usize,
    pub player: String,
    pub input: C,
    pub output: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub requirement: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternative: Option<Alternative>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTranscript<C> {
    pub frame: String,
    pub schedule: Vec<String>,
    pub rounds: Vec<Round<C>>,
    #[serde(rename = "final")]
    pub final_condition: C,
}

impl<C> GameTranscript<C> {
    pub fn rounds_of<'a>(&'a self, player: &'a str) -> impl Iterator<Item = &'a Round<C>> + 'a {
        self.rounds.iter().filter(move |r| r.player == player)
    }

    pub fn discharged(&self) -> usize {
        self.rounds.iter().filter(|r| r.alternative.is_some()).count()
    }
}

/// What a strategy did on its turn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move<C> {
    pub output: C,
    pub requirement: Option<String>,
    pub alternative: Option<Alternative>,
    pub note: Option<String>,
}

impl<C> Move<C> {
    pub fn to(output: C) -> Self {
        Self {
            output,
            requirement: None,
            alternative: None,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub trait Strategy<F: Frame> {
    fn play(&mut self, frame: &F, current: &F::Cond) -> Result<Move<F::Cond>>;
}

/// The game stopped early; the transcript holds every completed round.
#[derive(Debug, Clone)]
pub struct GameAbort<C> {
    pub error: Error,
    pub transcript: GameTranscript<C>,
}

/// Play `rounds` rounds from the weakest condition, cycling through
/// `schedule`. Every output is checked to extend its input and to respect
/// the frame cap.
pub fn run_game<F: Frame>(
    frame: &F,
    schedule: &[String],
    players: &mut BTreeMap<String, Box<dyn Strategy<F> + '_>>,
    rounds: usize,
) -> std::result::Result<GameTranscript<F::Cond>, GameAbort<F::Cond>> {
    let mut transcript = GameTranscript {
        frame: frame.name().to_string(),
        schedule: schedule.to_vec(),
        rounds: Vec::new(),
        final_condition: frame.root(),
    };
    let abort = |error, transcript| Err(GameAbort { error, transcript });

    if rounds > 0 && schedule.is_empty() {
        return abort(Error::InvalidInput("empty schedule".into()), transcript);
    }
    if let Some(id) = schedule.iter().find(|id| !players.contains_key(*id)) {
        return abort(
            Error::InvalidInput(format!("no strategy for scheduled player {id:?}")),
            transcript,
        );
    }

    for index in 0..rounds {
        let player = &schedule[index % schedule.len()];
        let input = transcript.final_condition.clone();
        let strategy = players.get_mut(player).expect("checked above");
        let mv = match strategy.play(frame, &input) {
            Ok(mv) => mv,
            Err(error) => return abort(error, transcript),
        };
        if let Err(error) = frame.check(&mv.output) {
            return abort(error, transcript);
        }
        if !frame.extends(&mv.output, &input) {
            return abort(
                Error::ContractBreach {
                    round: index,
                    player: player.clone(),
                },
                transcript,
            );
        }
        transcript.final_condition = mv.output.clone();
        transcript.rounds.push(Round {
            index,
            player: player.clone(),
            input,
            output: mv.output,
            requirement: mv.requirement,
            alternative: mv.alternative,
            note: mv.note,
        });
    }
    Ok(transcript)
}

/// Identity strategy; stands in for the induction player.
#[derive(Debug, Default, Clone)]
pub struct PassPlayer;

impl<F: Frame> Strategy<F> for PassPlayer {
    fn play(&mut self, _frame: &F, current: &F::Cond) -> Result<Move<F::Cond>> {
        Ok(Move::to(current.clone()))
    }
}

/// Drop everything already placed from the queue, then prepend the first
/// remaining element as the new minimum.
pub fn min_player_move(
    universe: &Universe,
    o: &Condition,
    queue: &mut VecDeque<usize>,
) -> Result<Condition> {
    universe.check_len(o.len() + 1)?;
    queue.retain(|&x| !o.contains(x));
    let a = queue.pop_front().ok_or(Error::Exhausted("minimum player queue"))?;
    Ok(o.with_minimum(a))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinPlayer {
    pub queue: VecDeque<usize>,
}

impl MinPlayer {
    pub fn new(n: usize) -> Self {
        Self {
            queue: (0..n).collect(),
        }
    }
}

impl Strategy<OrderFrame> for MinPlayer {
    fn play(&mut self, frame: &OrderFrame, current: &Condition) -> Result<Move<Condition>> {
        let out = min_player_move(&frame.universe, current, &mut self.queue)?;
        let note = format!("new minimum {}", out.as_slice()[0]);
        Ok(Move::to(out).with_note(note))
    }
}

/// Surround the `X`-elements already placed with fresh `X`-elements, one
/// before the first, one between each adjacent pair and one after the last.
pub fn dlo_player_move(
    universe: &Universe,
    o: &Condition,
    x: &BTreeSet<usize>,
    queue: &mut VecDeque<usize>,
) -> Result<Condition> {
    let placed = o.restrict(x);
    queue.retain(|&e| !o.contains(e));
    let need = placed.len() + 1;
    if queue.len() < need {
        return Err(Error::Exhausted("dense-order player queue"));
    }
    universe.check_len(o.len() + need)?;
    let fresh: Vec<usize> = queue.drain(..need).collect();

    let mut pattern = Vec::with_capacity(2 * need - 1);
    for (i, &b) in fresh.iter().enumerate() {
        pattern.push(b);
        if let Some(&a) = placed.as_slice().get(i) {
            pattern.push(a);
        }
    }
    let pattern = Condition::new(pattern)?;
    o.compatible(&pattern)
        .merged()
        .ok_or_else(|| Error::Invariant("pattern disagrees with the condition on X".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DloPlayer {
    pub x: BTreeSet<usize>,
    pub queue: VecDeque<usize>,
}

impl DloPlayer {
    pub fn new(x: BTreeSet<usize>) -> Self {
        Self {
            queue: x.iter().copied().collect(),
            x,
        }
    }
}

impl Strategy<OrderFrame> for DloPlayer {
    fn play(&mut self, frame: &OrderFrame, current: &Condition) -> Result<Move<Condition>> {
        match dlo_player_move(&frame.universe, current, &self.x, &mut self.queue) {
            Ok(out) => Ok(Move::to(out)),
            Err(Error::Exhausted(what)) => Ok(Move::to(current.clone()).with_note(format!("{what} exhausted"))),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlternativeKind {
    /// Two pigeons have compatible accepting leaves at the same hole.
    RowCollision,
    /// One pigeon has compatible accepting leaves at two holes.
    ColumnCollision,
    /// An extension incompatible with every accepting leaf of one pigeon.
    StarvingExtension,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternative {
    pub kind: AlternativeKind,
    pub pigeons: Vec<usize>,
    pub holes: Vec<usize>,
    /// The compatible leaves for a collision, or the starving condition.
    pub witnesses: Vec<Condition>,
    pub extension: Condition,
    /// Longest condition tried when looking for a starving extension.
    pub search_len: usize,
}

/// Look for one of the three ways to defeat an injective reading of the
/// accepting family, in order: two pigeons sharing a hole, one pigeon in two
/// holes, a condition that starves some pigeon. Witnesses are the first in
/// lexicographic order.
pub fn single_step_search(
    universe: &Universe,
    family: &CompiledFamily,
    search_len: usize,
) -> Result<Alternative> {
    let plus = &family.plus;
    let (p, h) = (family.p, family.h);
    let search_len = search_len.min(universe.length_cap);
    let collision = |kind, pigeons: Vec<usize>, holes: Vec<usize>, x: &Condition, y: &Condition| {
        let merged = x.compatible(y).merged()?;
        Some(universe.check(&merged).map(|()| Alternative {
            kind,
            pigeons,
            holes,
            witnesses: vec![x.clone(), y.clone()],
            extension: merged,
            search_len,
        }))
    };

    for a in 0..p {
        for a2 in a + 1..p {
            for c in 0..h {
                for x in &plus[a][c] {
                    for y in &plus[a2][c] {
                        if let Some(alt) =
                            collision(AlternativeKind::RowCollision, vec![a, a2], vec![c], x, y)
                        {
                            return alt;
                        }
                    }
                }
            }
        }
    }
    for a in 0..p {
        for b in 0..h {
            for c in b + 1..h {
                for x in &plus[a][b] {
                    for y in &plus[a][c] {
                        if let Some(alt) =
                            collision(AlternativeKind::ColumnCollision, vec![a], vec![b, c], x, y)
                        {
                            return alt;
                        }
                    }
                }
            }
        }
    }
    for o2 in universe.extensions_up_to(&family.base, search_len) {
        for (a, row) in plus.iter().enumerate() {
            if row.iter().flatten().all(|r| !o2.is_compatible(r)) {
                return Ok(Alternative {
                    kind: AlternativeKind::StarvingExtension,
                    pigeons: vec![a],
                    holes: Vec::new(),
                    witnesses: vec![o2.clone()],
                    extension: o2,
                    search_len,
                });
            }
        }
    }
    Err(Error::Exhausted("single-step alternatives"))
}

/// A pigeonhole instance the PHP player must defeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    #[serde(default)]
    pub label: String,
    pub program: OracleProgram,
    pub p: usize,
    pub h: usize,
}

impl Requirement {
    pub fn new(label: impl Into<String>, program: OracleProgram, p: usize, h: usize) -> Result<Self> {
        if p <= h {
            return Err(Error::InvalidInput(format!(
                "requirement needs more pigeons than holes, got p = {p}, h = {h}"
            )));
        }
        Ok(Self {
            label: label.into(),
            program,
            p,
            h,
        })
    }
}

/// Works through a finite queue of requirements, one per turn; passes once
/// the queue is empty.
#[derive(Debug, Clone)]
pub struct PhpPlayer {
    pub requirements: VecDeque<Requirement>,
    pub search_len: usize,
}

impl PhpPlayer {
    pub fn new(requirements: impl IntoIterator<Item = Requirement>, search_len: usize) -> Self {
        Self {
            requirements: requirements.into_iter().collect(),
            search_len,
        }
    }
}

impl Strategy<OrderFrame> for PhpPlayer {
    fn play(&mut self, frame: &OrderFrame, current: &Condition) -> Result<Move<Condition>> {
        let Some(req) = self.requirements.pop_front() else {
            return Ok(Move::to(current.clone()).with_note("no pending requirement"));
        };
        let universe = &frame.universe;
        let family = compile(&req.program, universe, current, req.p, req.h)?;
        let alt = single_step_search(universe, &family, self.search_len)?;
        Ok(Move {
            output: alt.extension.clone(),
            requirement: Some(req.label),
            alternative: Some(alt),
            note: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond;
    use crate::machines::{php_instance_check, PhpVerdict};

    #[test]
    fn min_move_examples() {
        let u = Universe::full(8).unwrap();
        let mut q: VecDeque<usize> = (0..4).collect();
        assert_eq!(min_player_move(&u, &cond![1, 2], &mut q).unwrap(), cond![0, 1, 2]);
        assert_eq!(q, VecDeque::from(vec![3]));

        let mut q: VecDeque<usize> = (0..8).collect();
        assert_eq!(min_player_move(&u, &Condition::empty(), &mut q).unwrap(), cond![0]);

        let mut q = VecDeque::from(vec![1]);
        assert_eq!(
            min_player_move(&u, &cond![1], &mut q),
            Err(Error::Exhausted("minimum player queue"))
        );
    }

    #[test]
    fn dlo_move_examples() {
        let u = Universe::full(8).unwrap();
        let x: BTreeSet<usize> = (0..5).collect();
        let mut q: VecDeque<usize> = (0..5).collect();
        let out = dlo_player_move(&u, &cond![5, 1, 2], &x, &mut q).unwrap();
        assert!(out.extends(&cond![5, 1, 2]));
        assert_eq!(out.restrict(&x), cond![0, 1, 3, 2, 4]);

        let mut q: VecDeque<usize> = (0..5).collect();
        assert_eq!(dlo_player_move(&u, &Condition::empty(), &x, &mut q).unwrap(), cond![0]);

        let mut q = VecDeque::from(vec![4]);
        assert!(dlo_player_move(&u, &cond![1, 2], &x, &mut q).is_err());
    }

    fn play(
        universe: Universe,
        schedule: &[&str],
        players: Vec<(&str, Box<dyn Strategy<OrderFrame>>)>,
        rounds: usize,
    ) -> std::result::Result<GameTranscript<Condition>, GameAbort<Condition>> {
        let frame = OrderFrame::new(universe);
        let schedule: Vec<String> = schedule.iter().map(|s| s.to_string()).collect();
        let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> =
            players.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        run_game(&frame, &schedule, &mut players, rounds)
    }

    #[test]
    fn min_only_game() {
        let u = Universe::full(8).unwrap();
        let t = play(u, &["min"], vec![("min", Box::new(MinPlayer::new(8)))], 3).unwrap();
        assert_eq!(t.final_condition, cond![2, 1, 0]);
        assert_eq!(t.rounds.len(), 3);

        let t = play(u, &["min"], vec![("min", Box::new(MinPlayer::new(8)))], 0).unwrap();
        assert_eq!(t.final_condition, Condition::empty());
    }

    #[test]
    fn php_round_discharges_modular_requirement() {
        let u = Universe::full(5).unwrap();
        let req = Requirement::new("mod", OracleProgram::modular(3, 2), 3, 2).unwrap();
        let t = play(
            u,
            &["min", "ind", "php"],
            vec![
                ("min", Box::new(MinPlayer::new(5))),
                ("ind", Box::new(PassPlayer)),
                ("php", Box::new(PhpPlayer::new([req.clone()], 5))),
            ],
            3,
        )
        .unwrap();
        let alt = t.rounds[2].alternative.as_ref().unwrap();
        assert_eq!(alt.kind, AlternativeKind::RowCollision);
        assert_eq!(alt.pigeons, vec![0, 2]);
        assert_eq!(alt.holes, vec![0]);
        let total = cond![0, 1, 2, 3, 4];
        assert!(php_instance_check(&req.program, 3, 2, &total).unwrap().is_violation());
    }

    #[test]
    fn starving_alternative() {
        let u = Universe::full(3).unwrap();
        let fam = compile(&OracleProgram::constant(1, 1, false), &u, &cond![1], 1, 1).unwrap();
        let alt = single_step_search(&u, &fam, 3).unwrap();
        assert_eq!(alt.kind, AlternativeKind::StarvingExtension);
        assert_eq!(alt.extension, cond![1]);
    }

    #[test]
    fn contract_breach_aborts_with_transcript() {
        struct Shrinker;
        impl Strategy<OrderFrame> for Shrinker {
            fn play(&mut self, _: &OrderFrame, _: &Condition) -> Result<Move<Condition>> {
                Ok(Move::to(Condition::empty()))
            }
        }
        let u = Universe::full(4).unwrap();
        let abort = play(
            u,
            &["min", "bad"],
            vec![("min", Box::new(MinPlayer::new(4))), ("bad", Box::new(Shrinker))],
            4,
        )
        .unwrap_err();
        assert!(matches!(abort.error, Error::ContractBreach { round: 1, .. }));
        assert_eq!(abort.transcript.rounds.len(), 1);
    }

    #[test]
    fn unknown_player_is_rejected() {
        let u = Universe::full(4).unwrap();
        let abort = play(u, &["ghost"], vec![], 1).unwrap_err();
        assert!(matches!(abort.error, Error::InvalidInput(_)));
        assert!(Requirement::new("r", OracleProgram::identity(2, 2), 2, 2).is_err());
    }

    #[test]
    fn transcript_json_uses_final_key() {
        let u = Universe::full(2).unwrap();
        let t = play(u, &["min"], vec![("min", Box::new(MinPlayer::new(2)))], 1).unwrap();
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["final"], serde_json::json!([0]));
        assert_eq!(json["rounds"][0]["player"], "min");
        let _ = PhpVerdict::Injection;
    }
}
