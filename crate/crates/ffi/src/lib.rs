//! C ABI over `monty-lab`.
//!
//! Every fallible function returns a [`MontyStatus`] and writes its result
//! through an out-pointer. Probabilities cross the boundary as
//! [`MontyFraction`] pairs. Beliefs and sessions are opaque handles released
//! with their `_free` function. The header is generated into
//! `include/monty_lab.h` by the build script.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use monty_lab::analytics::{self, Recommendation};
use monty_lab::belief::BeliefState;
use monty_lab::session::{HostSpec, MoodMode, Session, SessionConfig};
use monty_lab::simulation;
use monty_lab::{
    play_game, Decision, DoorId, Error, GuestStrategy, HostAction, Mood, Outcome, Phase, Probability,
    ShowmasterStrategy,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MontyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidProbability = 2,
    InvalidParameter = 3,
    IllegalDoor = 4,
    PhaseViolation = 5,
    NoChoiceAvailable = 6,
    ConditioningOnNull = 7,
    EmptyArchive = 8,
    /// Result does not fit a 64-bit fraction.
    Overflow = 9,
    Panic = 10,
}

/// Exact probability `num / den`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontyFraction {
    pub num: u64,
    pub den: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MontyHostKind {
    Fair = 0,
    Evil = 1,
    /// `param` is the evil frequency `p`.
    Moody = 2,
    /// `param` is the reading accuracy.
    MindReader = 3,
    /// Sessions only.
    Adaptive = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontyHost {
    pub kind: MontyHostKind,
    pub param: MontyFraction,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MontyGuestKind {
    Stay = 0,
    Switch = 1,
    /// `param` is the stay probability `q`.
    Mixed = 2,
    /// `param` is the detection risk.
    Actor = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontyGuest {
    pub kind: MontyGuestKind,
    pub param: MontyFraction,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MontyDecision {
    Stay = 0,
    Switch = 1,
    /// Only as an input: no intent signaled.
    None = -1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MontyRecommendation {
    Stay = 0,
    Switch = 1,
    Indifferent = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MontyPhase {
    AwaitingPick = 0,
    AwaitingDecision = 1,
    Finished = 2,
}

/// One finished game. Doors are numbered 1 to 3.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MontyTranscript {
    pub seed: u64,
    pub car_door: u8,
    pub initial_pick: u8,
    pub evil: bool,
    pub signaled_intent: MontyDecision,
    pub opened_door: u8,
    pub opened_mine: bool,
    /// `None` when the host opened the guest's door.
    pub final_decision: MontyDecision,
    pub won: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MontyReport {
    pub replications: u64,
    pub wins: u64,
    pub win_rate: f64,
    pub std_error: f64,
    /// `{0, 0}` when the exact value does not fit.
    pub exact: MontyFraction,
    pub exact_f64: f64,
    pub z_score: f64,
    pub opened_mine: u64,
}

/// Opaque belief tracker.
pub struct MontyBelief(BeliefState);

/// Opaque interactive session.
pub struct MontySession(Session);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MontyStatus {
    match e {
        Error::InvalidProbability(_) => MontyStatus::InvalidProbability,
        Error::InvalidParameter(_) | Error::UnknownSession(_) => MontyStatus::InvalidParameter,
        Error::IllegalDoor(_) => MontyStatus::IllegalDoor,
        Error::PhaseViolation { .. } => MontyStatus::PhaseViolation,
        Error::NoChoiceAvailable => MontyStatus::NoChoiceAvailable,
        Error::ConditioningOnNull => MontyStatus::ConditioningOnNull,
        Error::EmptyArchive => MontyStatus::EmptyArchive,
    }
}

struct Failure(MontyStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MontyStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording the error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MontyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MontyStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside monty-lab".into());
            MontyStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(what))
}

fn to_probability(f: MontyFraction) -> Result<Probability, Failure> {
    Ok(Probability::new(f.num, f.den)?)
}

fn to_fraction(p: &Probability) -> Result<MontyFraction, Failure> {
    p.to_u64_parts()
        .map(|(num, den)| MontyFraction { num, den })
        .ok_or_else(|| Failure(MontyStatus::Overflow, format!("{p} does not fit 64 bits")))
}

fn showmaster(host: &MontyHost) -> Result<ShowmasterStrategy, Failure> {
    Ok(match host.kind {
        MontyHostKind::Fair => ShowmasterStrategy::Fair,
        MontyHostKind::Evil => ShowmasterStrategy::Evil,
        MontyHostKind::Moody => ShowmasterStrategy::Moody { p: to_probability(host.param)? },
        MontyHostKind::MindReader => ShowmasterStrategy::MindReader { accuracy: to_probability(host.param)? },
        MontyHostKind::Adaptive => {
            return Err(Failure(MontyStatus::InvalidParameter, "the adaptive host exists only in sessions".into()))
        }
    })
}

fn guest_strategy(guest: &MontyGuest) -> Result<GuestStrategy, Failure> {
    Ok(match guest.kind {
        MontyGuestKind::Stay => GuestStrategy::Stay,
        MontyGuestKind::Switch => GuestStrategy::Switch,
        MontyGuestKind::Mixed => GuestStrategy::Mixed { q: to_probability(guest.param)? },
        MontyGuestKind::Actor => GuestStrategy::Actor { detection_risk: to_probability(guest.param)? },
    })
}

fn decision_in(d: MontyDecision) -> Option<Decision> {
    match d {
        MontyDecision::Stay => Some(Decision::Stay),
        MontyDecision::Switch => Some(Decision::Switch),
        MontyDecision::None => None,
    }
}

fn decision_out(d: Option<Decision>) -> MontyDecision {
    match d {
        Some(Decision::Stay) => MontyDecision::Stay,
        Some(Decision::Switch) => MontyDecision::Switch,
        None => MontyDecision::None,
    }
}

fn transcript_out(t: &monty_lab::GameTranscript) -> MontyTranscript {
    MontyTranscript {
        seed: t.seed,
        car_door: t.car_door.index(),
        initial_pick: t.initial_pick.index(),
        evil: t.sampled_mood == Mood::Evil,
        signaled_intent: decision_out(Some(t.signaled_intent)),
        opened_door: t.opened_door().index(),
        opened_mine: t.host_action == HostAction::OpenedGuestDoor,
        final_decision: decision_out(t.final_decision),
        won: t.outcome == Outcome::Win,
    }
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn monty_status_message(status: MontyStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        MontyStatus::Ok => b"ok\0",
        MontyStatus::NullPointer => b"null pointer\0",
        MontyStatus::InvalidProbability => b"invalid probability\0",
        MontyStatus::InvalidParameter => b"invalid parameter\0",
        MontyStatus::IllegalDoor => b"illegal door\0",
        MontyStatus::PhaseViolation => b"action not allowed in this phase\0",
        MontyStatus::NoChoiceAvailable => b"no choice available\0",
        MontyStatus::ConditioningOnNull => b"conditioning on a null event\0",
        MontyStatus::EmptyArchive => b"empty archive\0",
        MontyStatus::Overflow => b"value does not fit 64 bits\0",
        MontyStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn monty_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Win probability against a moody host with evil frequency `p` for a guest
/// who stays with probability `q`.
#[no_mangle]
pub unsafe extern "C" fn monty_win_probability(
    p: MontyFraction,
    q: MontyFraction,
    out: *mut MontyFraction,
) -> MontyStatus {
    guard(|| {
        let v = analytics::win_probability(&to_probability(p)?, &to_probability(q)?);
        write(out, to_fraction(&v)?, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn monty_posterior_evil_given_other(p: MontyFraction, out: *mut MontyFraction) -> MontyStatus {
    guard(|| write(out, to_fraction(&analytics::posterior_evil_given_other(&to_probability(p)?))?, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn monty_posterior_car_given_other(p: MontyFraction, out: *mut MontyFraction) -> MontyStatus {
    guard(|| write(out, to_fraction(&analytics::posterior_car_given_other(&to_probability(p)?))?, "out"))
}

/// Probability that the host opens the guest's own door.
#[no_mangle]
pub unsafe extern "C" fn monty_prob_opened_mine(p: MontyFraction, out: *mut MontyFraction) -> MontyStatus {
    guard(|| write(out, to_fraction(&analytics::prob_my(&to_probability(p)?))?, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn monty_best_response(p: MontyFraction, out: *mut MontyRecommendation) -> MontyStatus {
    guard(|| {
        let r = match analytics::best_response(&to_probability(p)?) {
            Recommendation::Stay => MontyRecommendation::Stay,
            Recommendation::Switch => MontyRecommendation::Switch,
            Recommendation::Indifferent => MontyRecommendation::Indifferent,
        };
        write(out, r, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn monty_indifference_point(out: *mut MontyFraction) -> MontyStatus {
    guard(|| write(out, to_fraction(&analytics::indifference_point())?, "out"))
}

/// Plays one seeded game.
#[no_mangle]
pub unsafe extern "C" fn monty_play_game(
    host: *const MontyHost,
    guest: *const MontyGuest,
    seed: u64,
    out: *mut MontyTranscript,
) -> MontyStatus {
    guard(|| {
        let s = showmaster(deref(host, "host")?)?;
        let g = guest_strategy(deref(guest, "guest")?)?;
        write(out, transcript_out(&play_game(&s, &g, seed)), "out")
    })
}

/// Runs `replications` seeded games and compares the win rate with the
/// exact value.
#[no_mangle]
pub unsafe extern "C" fn monty_run_batch(
    host: *const MontyHost,
    guest: *const MontyGuest,
    replications: u64,
    seed: u64,
    out: *mut MontyReport,
) -> MontyStatus {
    guard(|| {
        let s = showmaster(deref(host, "host")?)?;
        let g = guest_strategy(deref(guest, "guest")?)?;
        let r = simulation::run_batch(&s, &g, replications, seed)?;
        let report = MontyReport {
            replications: r.replications,
            wins: r.wins,
            win_rate: r.win_rate,
            std_error: r.std_error,
            exact: to_fraction(&r.exact_value).unwrap_or(MontyFraction { num: 0, den: 0 }),
            exact_f64: r.exact_value.to_f64(),
            z_score: r.z_score,
            opened_mine: r.event_count("opened_mine"),
        };
        write(out, report, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn monty_belief_new(prior_evil: MontyFraction, out: *mut *mut MontyBelief) -> MontyStatus {
    guard(|| {
        let state = BeliefState::new(to_probability(prior_evil)?);
        write(out, Box::into_raw(Box::new(MontyBelief(state))), "out")
    })
}

/// Records a host action. `opened_door` is ignored when `opened_mine`.
#[no_mangle]
pub unsafe extern "C" fn monty_belief_observe(
    belief: *mut MontyBelief,
    opened_mine: bool,
    opened_door: u8,
) -> MontyStatus {
    guard(|| {
        let b = deref_mut(belief, "belief")?;
        let action = if opened_mine {
            HostAction::OpenedGuestDoor
        } else {
            HostAction::OpenedOtherDoor(DoorId::new(opened_door.into())?)
        };
        b.0 = b.0.update(action);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn monty_belief_posterior_evil(
    belief: *const MontyBelief,
    out: *mut MontyFraction,
) -> MontyStatus {
    guard(|| write(out, to_fraction(&deref(belief, "belief")?.0.posterior_evil)?, "out"))
}

/// Posterior that the car is behind the guest's own door.
#[no_mangle]
pub unsafe extern "C" fn monty_belief_posterior_car(
    belief: *const MontyBelief,
    out: *mut MontyFraction,
) -> MontyStatus {
    guard(|| write(out, to_fraction(&deref(belief, "belief")?.0.posterior_car_own_door)?, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn monty_belief_recommend(
    belief: *const MontyBelief,
    out: *mut MontyRecommendation,
) -> MontyStatus {
    guard(|| {
        let r = match deref(belief, "belief")?.0.recommend()? {
            Recommendation::Stay => MontyRecommendation::Stay,
            Recommendation::Switch => MontyRecommendation::Switch,
            Recommendation::Indifferent => MontyRecommendation::Indifferent,
        };
        write(out, r, "out")
    })
}

/// Null is accepted.
#[no_mangle]
pub unsafe extern "C" fn monty_belief_free(belief: *mut MontyBelief) {
    if !belief.is_null() {
        drop(Box::from_raw(belief));
    }
}

#[no_mangle]
pub unsafe extern "C" fn monty_session_new(
    host: *const MontyHost,
    prior_evil: MontyFraction,
    seed: u64,
    out: *mut *mut MontySession,
) -> MontyStatus {
    guard(|| {
        let host = deref(host, "host")?;
        let spec = match host.kind {
            MontyHostKind::Adaptive => HostSpec::Adaptive,
            _ => match showmaster(host)? {
                ShowmasterStrategy::Fair => HostSpec::Fair,
                ShowmasterStrategy::Evil => HostSpec::Evil,
                ShowmasterStrategy::Moody { p } => HostSpec::Moody { p },
                ShowmasterStrategy::MindReader { accuracy } => HostSpec::MindReader { accuracy },
            },
        };
        let config =
            SessionConfig { host: spec, prior: to_probability(prior_evil)?, mood_mode: MoodMode::PerGame, seed };
        let session = Session::new(format!("ffi-{seed:016x}"), config);
        write(out, Box::into_raw(Box::new(MontySession(session))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn monty_session_phase(session: *const MontySession, out: *mut MontyPhase) -> MontyStatus {
    guard(|| {
        let phase = match deref(session, "session")?.0.phase() {
            Phase::AwaitingPick => MontyPhase::AwaitingPick,
            Phase::AwaitingDecision => MontyPhase::AwaitingDecision,
            Phase::Finished => MontyPhase::Finished,
        };
        write(out, phase, "out")
    })
}

/// Picks a door (1 to 3) with an optional signaled intent. A pick after a
/// finished game deals the next one. `out_transcript` may be null; when the
/// host opened the guest's door the game is over and it receives the
/// transcript.
#[no_mangle]
pub unsafe extern "C" fn monty_session_pick(
    session: *mut MontySession,
    door: i64,
    intent: MontyDecision,
    out_finished: *mut bool,
    out_transcript: *mut MontyTranscript,
) -> MontyStatus {
    guard(|| {
        let s = &mut deref_mut(session, "session")?.0;
        if out_finished.is_null() {
            return Err(null("out_finished"));
        }
        s.pick(door, decision_in(intent))?;
        let finished = s.phase() == Phase::Finished;
        if finished && !out_transcript.is_null() {
            let t = s.last_transcript().expect("finished game has a transcript");
            out_transcript.write(transcript_out(t));
        }
        write(out_finished, finished, "out_finished")
    })
}

#[no_mangle]
pub unsafe extern "C" fn monty_session_decide(
    session: *mut MontySession,
    decision: MontyDecision,
    out: *mut MontyTranscript,
) -> MontyStatus {
    guard(|| {
        let s = &mut deref_mut(session, "session")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = decision_in(decision)
            .ok_or_else(|| Failure(MontyStatus::InvalidParameter, "a decision must be stay or switch".into()))?;
        s.decide(d)?;
        let t = s.last_transcript().expect("finished game has a transcript");
        write(out, transcript_out(t), "out")
    })
}

/// The session's public view as JSON, released with [`monty_string_free`].
#[no_mangle]
pub unsafe extern "C" fn monty_session_view_json(session: *const MontySession, out: *mut *mut c_char) -> MontyStatus {
    guard(|| {
        let view = serde_json::to_string(&deref(session, "session")?.0.view()).expect("view serializes");
        let c = CString::new(view).expect("json has no nul bytes");
        write(out, c.into_raw(), "out")
    })
}

/// Null is accepted.
#[no_mangle]
pub unsafe extern "C" fn monty_session_free(session: *mut MontySession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Null is accepted.
#[no_mangle]
pub unsafe extern "C" fn monty_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
