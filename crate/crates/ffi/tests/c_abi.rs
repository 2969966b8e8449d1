use std::ffi::CStr;
use std::ptr;

use monty_lab_ffi::*;

fn frac(num: u64, den: u64) -> MontyFraction {
    MontyFraction { num, den }
}

fn host(kind: MontyHostKind, num: u64, den: u64) -> MontyHost {
    MontyHost { kind, param: frac(num, den) }
}

fn guest(kind: MontyGuestKind, num: u64, den: u64) -> MontyGuest {
    MontyGuest { kind, param: frac(num, den) }
}

fn last_error() -> String {
    let p = monty_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn analytics_values() {
    let mut out = frac(0, 0);
    unsafe {
        assert_eq!(monty_win_probability(frac(1, 2), frac(1, 2), &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 3));
        assert_eq!(monty_win_probability(frac(0, 1), frac(0, 1), &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(2, 3));
        assert_eq!(monty_posterior_evil_given_other(frac(1, 2), &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 4));
        assert_eq!(monty_posterior_car_given_other(frac(1, 2), &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 2));
        assert_eq!(monty_prob_opened_mine(frac(3, 4), &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 2));
        assert_eq!(monty_indifference_point(&mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 2));
        let mut rec = MontyRecommendation::Stay;
        assert_eq!(monty_best_response(frac(1, 4), &mut rec), MontyStatus::Ok);
        assert_eq!(rec, MontyRecommendation::Switch);
    }
}

#[test]
fn error_codes() {
    let mut out = frac(0, 0);
    unsafe {
        assert_eq!(monty_win_probability(frac(3, 2), frac(1, 2), &mut out), MontyStatus::InvalidProbability);
        assert!(!last_error().is_empty());
        assert_eq!(monty_win_probability(frac(1, 0), frac(1, 2), &mut out), MontyStatus::InvalidProbability);
        assert_eq!(monty_indifference_point(ptr::null_mut()), MontyStatus::NullPointer);
        let mut t = std::mem::MaybeUninit::<MontyTranscript>::uninit();
        let g = guest(MontyGuestKind::Stay, 0, 1);
        let h = host(MontyHostKind::Adaptive, 0, 1);
        assert_eq!(monty_play_game(&h, &g, 1, t.as_mut_ptr()), MontyStatus::InvalidParameter);
        assert_eq!(monty_play_game(ptr::null(), &g, 1, t.as_mut_ptr()), MontyStatus::NullPointer);
        let mut report = std::mem::MaybeUninit::<MontyReport>::uninit();
        let h = host(MontyHostKind::Fair, 0, 1);
        assert_eq!(monty_run_batch(&h, &g, 0, 1, report.as_mut_ptr()), MontyStatus::InvalidParameter);
    }
    use MontyStatus::*;
    for status in [
        Ok,
        NullPointer,
        InvalidProbability,
        InvalidParameter,
        IllegalDoor,
        PhaseViolation,
        NoChoiceAvailable,
        ConditioningOnNull,
        EmptyArchive,
        Overflow,
        Panic,
    ] {
        assert!(!unsafe { CStr::from_ptr(monty_status_message(status)) }.to_bytes().is_empty());
    }
}

#[test]
fn play_and_batch_match_core() {
    let h = host(MontyHostKind::Moody, 1, 2);
    let g = guest(MontyGuestKind::Mixed, 1, 2);
    for seed in 0..200u64 {
        let mut t = std::mem::MaybeUninit::<MontyTranscript>::uninit();
        let t = unsafe {
            assert_eq!(monty_play_game(&h, &g, seed, t.as_mut_ptr()), MontyStatus::Ok);
            t.assume_init()
        };
        let core = monty_lab::play_game(
            &monty_lab::ShowmasterStrategy::Moody { p: monty_lab::probability::prob(1, 2) },
            &monty_lab::GuestStrategy::Mixed { q: monty_lab::probability::prob(1, 2) },
            seed,
        );
        assert_eq!(t.car_door, core.car_door.index());
        assert_eq!(t.opened_door, core.opened_door().index());
        assert_eq!(t.won, core.outcome == monty_lab::Outcome::Win);
        assert_eq!(t.opened_mine, t.final_decision == MontyDecision::None);
        if t.opened_mine {
            assert!(t.evil && !t.won && t.opened_door == t.initial_pick);
        }
    }
    let mut r = std::mem::MaybeUninit::<MontyReport>::uninit();
    let r = unsafe {
        assert_eq!(monty_run_batch(&h, &g, 20_000, 7, r.as_mut_ptr()), MontyStatus::Ok);
        r.assume_init()
    };
    assert_eq!(r.replications, 20_000);
    assert_eq!(r.exact, frac(1, 3));
    assert!(r.z_score.abs() < 5.0, "{}", r.z_score);
}

#[test]
fn belief_handle() {
    unsafe {
        let mut b: *mut MontyBelief = ptr::null_mut();
        assert_eq!(monty_belief_new(frac(1, 2), &mut b), MontyStatus::Ok);
        let mut rec = MontyRecommendation::Stay;
        assert_eq!(monty_belief_recommend(b, &mut rec), MontyStatus::NoChoiceAvailable);
        assert_eq!(monty_belief_observe(b, false, 4), MontyStatus::IllegalDoor);
        assert_eq!(monty_belief_observe(b, false, 2), MontyStatus::Ok);
        let mut out = frac(0, 0);
        assert_eq!(monty_belief_posterior_evil(b, &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 4));
        assert_eq!(monty_belief_posterior_car(b, &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 2));
        assert_eq!(monty_belief_recommend(b, &mut rec), MontyStatus::Ok);
        assert_eq!(rec, MontyRecommendation::Indifferent);
        assert_eq!(monty_belief_observe(b, true, 0), MontyStatus::Ok);
        assert_eq!(monty_belief_posterior_evil(b, &mut out), MontyStatus::Ok);
        assert_eq!(out, frac(1, 1));
        monty_belief_free(b);
        monty_belief_free(ptr::null_mut());
        assert_eq!(monty_belief_observe(ptr::null_mut(), true, 0), MontyStatus::NullPointer);
    }
}

#[test]
fn session_handle() {
    unsafe {
        let h = host(MontyHostKind::Evil, 0, 1);
        let mut s: *mut MontySession = ptr::null_mut();
        assert_eq!(monty_session_new(&h, frac(1, 2), 42, &mut s), MontyStatus::Ok);
        let mut phase = MontyPhase::Finished;
        assert_eq!(monty_session_phase(s, &mut phase), MontyStatus::Ok);
        assert_eq!(phase, MontyPhase::AwaitingPick);
        let mut t = std::mem::MaybeUninit::<MontyTranscript>::uninit();
        assert_eq!(monty_session_decide(s, MontyDecision::Stay, t.as_mut_ptr()), MontyStatus::PhaseViolation);
        assert_eq!(
            monty_session_pick(s, 0, MontyDecision::None, ptr::null_mut(), ptr::null_mut()),
            MontyStatus::NullPointer
        );
        let mut finished = false;
        assert_eq!(
            monty_session_pick(s, 7, MontyDecision::None, &mut finished, ptr::null_mut()),
            MontyStatus::IllegalDoor
        );

        let mut games = 0;
        while games < 30 {
            assert_eq!(monty_session_pick(s, 1, MontyDecision::Switch, &mut finished, t.as_mut_ptr()), MontyStatus::Ok);
            if !finished {
                assert_eq!(monty_session_decide(s, MontyDecision::Switch, t.as_mut_ptr()), MontyStatus::Ok);
            }
            let tr = t.assume_init();
            // An evil host never lets a switcher win.
            assert!(!tr.won);
            assert!(tr.evil);
            games += 1;
        }

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(monty_session_view_json(s, &mut json), MontyStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        monty_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["phase"], "finished");
        assert_eq!(v["stats"]["games"], 30);
        monty_session_free(s);
        monty_session_free(ptr::null_mut());
    }
}
