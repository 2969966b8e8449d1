//! Closed-form analytics against brute-force enumeration.

mod common;

use monty_lab::analytics;
use monty_lab::oracle::{self, OracleHost};
use monty_lab::probability::prob;
use monty_lab::{GuestStrategy, Probability, ShowmasterStrategy};
use proptest::prelude::*;

fn moody(p: &Probability) -> ShowmasterStrategy {
    ShowmasterStrategy::Moody { p: p.clone() }
}

fn mixed(q: &Probability) -> GuestStrategy {
    GuestStrategy::Mixed { q: q.clone() }
}

fn check_p(p: &Probability) {
    let stay = oracle::enumerate(&moody(p), &GuestStrategy::Stay);
    let switch = oracle::enumerate(&moody(p), &GuestStrategy::Switch);
    assert_eq!(analytics::win_stay(p), oracle::win_probability(&stay), "win_stay p={p}");
    assert_eq!(analytics::win_switch(p), oracle::win_probability(&switch), "win_switch p={p}");
    let evil = oracle::conditional_probability(&stay, |a| a.is_evil(), |a| a.opened_other()).unwrap();
    let car = oracle::conditional_probability(&stay, |a| a.car_behind_pick(), |a| a.opened_other()).unwrap();
    assert_eq!(analytics::posterior_evil_given_other(p), evil, "posterior_evil p={p}");
    assert_eq!(analytics::posterior_car_given_other(p), car, "posterior_car p={p}");
    assert_eq!(analytics::prob_my(p), oracle::event_probability(&stay, |a| a.opened_mine()));
    assert_eq!(analytics::prob_other(p), oracle::event_probability(&stay, |a| a.opened_other()));
}

fn check_q(q: &Probability) {
    let atoms = oracle::enumerate_host(&OracleHost::OmniscientReader, &mixed(q));
    assert_eq!(analytics::mind_reader_win_rate(q), oracle::win_probability(&atoms), "win rate q={q}");
    assert_eq!(
        analytics::mind_reader_open_rate(q),
        oracle::event_probability(&atoms, |a| a.opened_other()),
        "open rate q={q}"
    );
}

#[test]
fn farey_grid_up_to_twelve() {
    let grid = common::farey(12);
    assert_eq!(grid.len(), 47);
    for p in &grid {
        check_p(p);
        check_q(p);
        for q in &grid {
            let atoms = oracle::enumerate(&moody(p), &mixed(q));
            assert_eq!(oracle::total_weight(&atoms), num_traits::One::one());
            assert_eq!(analytics::win_probability(p, q), oracle::win_probability(&atoms), "win p={p} q={q}");
        }
    }
}

#[test]
fn engine_mind_reader_matches_omniscient_reader_open_rate() {
    // The engine's reader turns evil on every announced switch, including
    // switchers holding the car; a goat is still revealed in that branch.
    for q in common::farey(6) {
        let engine = oracle::enumerate(&ShowmasterStrategy::MindReader { accuracy: Probability::one() }, &mixed(&q));
        let omniscient = oracle::enumerate_host(&OracleHost::OmniscientReader, &mixed(&q));
        assert_eq!(
            oracle::event_probability(&engine, |a| a.opened_other()),
            oracle::event_probability(&omniscient, |a| a.opened_other())
        );
        assert_eq!(oracle::win_probability(&engine), oracle::win_probability(&omniscient));
    }
}

#[test]
fn conditioning_on_a_null_event_is_an_error() {
    let fair = oracle::enumerate(&ShowmasterStrategy::Fair, &GuestStrategy::Stay);
    assert_eq!(
        oracle::conditional_probability(&fair, |a| a.is_evil(), |a| a.opened_mine()),
        Err(monty_lab::Error::ConditioningOnNull)
    );
}

fn small_prob() -> impl Strategy<Value = Probability> {
    (1u64..=60).prop_flat_map(|d| (0..=d).prop_map(move |n| prob(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn win_probability_is_the_q_mixture(p in small_prob(), q in small_prob()) {
        let expected = q.ratio() * analytics::win_stay(&p).ratio()
            + q.complement().ratio() * analytics::win_switch(&p).ratio();
        prop_assert_eq!(analytics::win_probability(&p, &q).into_ratio(), expected);
        let atoms = oracle::enumerate(&moody(&p), &mixed(&q));
        prop_assert_eq!(analytics::win_probability(&p, &q), oracle::win_probability(&atoms));
    }

    #[test]
    fn host_actions_partition_and_posteriors_sum(p in small_prob()) {
        let total = analytics::prob_other(&p).ratio() + analytics::prob_my(&p).ratio();
        prop_assert_eq!(total, num_traits::One::one());
        let sum = analytics::posterior_evil_given_other(&p).ratio() + analytics::posterior_fair_given_other(&p).ratio();
        prop_assert_eq!(sum, num_traits::One::one());
    }

    #[test]
    fn switch_payoff_falls_with_p(a in small_prob(), b in small_prob()) {
        let (lo, hi) = if a.ratio() <= b.ratio() { (a, b) } else { (b, a) };
        prop_assert!(analytics::win_switch(&hi).ratio() <= analytics::win_switch(&lo).ratio());
        prop_assert_eq!(analytics::win_stay(&lo), prob(1, 3));
    }

    #[test]
    fn oracle_atoms_obey_the_rules(p in small_prob(), q in small_prob()) {
        for atom in oracle::enumerate(&moody(&p), &mixed(&q)) {
            if atom.opened_mine() {
                prop_assert!(atom.is_evil());
                prop_assert!(!atom.car_behind_pick());
                prop_assert!(atom.final_decision.is_none());
                prop_assert!(!atom.is_win());
            } else if let monty_lab::HostAction::OpenedOtherDoor(d) = atom.host_action {
                prop_assert!(d != atom.car_door && d != atom.initial_pick);
            }
        }
    }
}
