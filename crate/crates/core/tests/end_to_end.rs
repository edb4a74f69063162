use std::collections::{BTreeMap, BTreeSet};

use forcing_lab::bruteforce::{all_total_orders, EnumerationBudget};
use forcing_lab::game::{run_game, single_step_search, MinPlayer, PassPlayer, PhpPlayer, Requirement, Strategy};
use forcing_lab::machines::{compile, evaluate, php_instance_check, OracleProgram};
use forcing_lab::variants::{dominating_set_check, DominationPlayer, TourPlayer, TournamentFrame};
use forcing_lab::{Condition, OrderFrame, Universe};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_programs_are_defeated_in_one_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = Universe::full(6).unwrap();
    let budget = EnumerationBudget::default();
    for _ in 0..40 {
        let prog = OracleProgram::random(3, 2, 2, 6, &mut rng);
        let family = compile(&prog, &u, &Condition::empty(), 3, 2).unwrap();
        for a in 0..3 {
            for b in 0..2 {
                for leaf in &family.plus[a][b] {
                    let order = all_total_orders(6, leaf, &budget).unwrap().swap_remove(0);
                    assert!(evaluate(&prog, a, b, &order).unwrap());
                }
            }
        }
        let alt = single_step_search(&u, &family, 6).unwrap();
        for order in all_total_orders(6, &alt.extension, &budget).unwrap() {
            assert!(php_instance_check(&prog, 3, 2, &order).unwrap().is_violation());
        }
    }
}

#[test]
fn three_player_game_transcript() {
    let frame = OrderFrame::new(Universe::full(8).unwrap());
    let schedule: Vec<String> = ["MIN", "PASS", "PHP"].map(String::from).to_vec();
    let reqs = [
        Requirement::new("modular", OracleProgram::modular(3, 2), 3, 2).unwrap(),
        Requirement::new("identity", OracleProgram::identity(2, 1), 2, 1).unwrap(),
    ];
    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
    players.insert("MIN".into(), Box::new(MinPlayer::new(8)));
    players.insert("PASS".into(), Box::new(PassPlayer));
    players.insert("PHP".into(), Box::new(PhpPlayer::new(reqs, 4)));
    let t = run_game(&frame, &schedule, &mut players, 6).unwrap();
    assert_eq!(t.rounds.len(), 6);
    assert_eq!(t.discharged(), 2);
    for w in t.rounds.windows(2) {
        assert_eq!(w[0].output, w[1].input);
        assert!(w[1].output.extends(&w[1].input));
    }
    let json = serde_json::to_value(&t).unwrap();
    assert_eq!(json["final"], serde_json::to_value(&t.final_condition).unwrap());
    assert_eq!(json["rounds"][2]["player"], "PHP");
    assert!(json["rounds"][2]["alternative"]["kind"].is_string());
}

#[test]
fn zero_rounds_leave_the_empty_chain() {
    let frame = OrderFrame::new(Universe::full(3).unwrap());
    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
    players.insert("PASS".into(), Box::new(PassPlayer));
    let t = run_game(&frame, &["PASS".to_string()], &mut players, 0).unwrap();
    assert!(t.rounds.is_empty());
    assert_eq!(t.final_condition, Condition::empty());
}

#[test]
fn domination_game_defeats_x() {
    let frame = TournamentFrame::new(5, 5).unwrap();
    let x: BTreeSet<usize> = [0, 1, 2].into();
    let mut players: BTreeMap<String, Box<dyn Strategy<TournamentFrame>>> = BTreeMap::new();
    players.insert("TOUR".into(), Box::new(TourPlayer { queue: [0, 1, 2].into() }));
    players.insert("DOM".into(), Box::new(DominationPlayer { x: x.clone() }));
    let schedule: Vec<String> = ["TOUR", "TOUR", "TOUR", "DOM"].map(String::from).to_vec();
    let t = run_game(&frame, &schedule, &mut players, 4).unwrap();
    assert_eq!(t.final_condition.vertices().len(), 4);
    assert!(!dominating_set_check(&t.final_condition, &x).unwrap());
}
