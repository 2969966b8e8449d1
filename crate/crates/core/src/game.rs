//! The game engine: doors, moods, host and guest strategies, and a seeded
//! state machine that plays one game and records a [`GameTranscript`].
//!
//! # Random stream
//!
//! Each game owns one `ChaCha8Rng` seeded with `seed_from_u64(seed)`. A game
//! always consumes exactly five 64-bit words, in this order, whether or not
//! the configured strategies use them:
//!
//! 1. car placement
//! 2. the guest's initial pick
//! 3. host coin (mood draw of a moody host, read/unsure coin of a mind reader)
//! 4. tie-break between two goat doors
//! 5. guest coin (stay/switch draw of a mixed guest, detection draw for an actor)
//!
//! Doors are derived from a word `w` as `1 + floor(3w / 2^64)`, coins as
//! `w / 2^64 < p`. Since every strategy reads the same words, strategies can
//! be compared on common random numbers: `Moody(0)` yields the same
//! transcript as `Fair` for every seed, apart from the recorded strategy.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::Probability;

/// One of the three doors, numbered 1 to 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct DoorId(u8);

impl DoorId {
    pub const ALL: [DoorId; 3] = [DoorId(1), DoorId(2), DoorId(3)];

    pub fn new(index: i64) -> Result<Self> {
        match index {
            1..=3 => Ok(DoorId(index as u8)),
            _ => Err(Error::IllegalDoor(index)),
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    fn from_word(word: u64) -> Self {
        DoorId(1 + ((word as u128 * 3) >> 64) as u8)
    }

    /// The doors other than `self` and `other`, in ascending order.
    pub fn others(self, other: DoorId) -> impl Iterator<Item = DoorId> {
        DoorId::ALL.into_iter().filter(move |d| *d != self && *d != other)
    }
}

impl TryFrom<i64> for DoorId {
    type Error = Error;
    fn try_from(value: i64) -> Result<Self> {
        DoorId::new(value)
    }
}

impl From<DoorId> for u8 {
    fn from(door: DoorId) -> u8 {
        door.0
    }
}

impl fmt::Display for DoorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mood {
    Fair,
    Evil,
}

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mood::Fair => "fair",
            Mood::Evil => "evil",
        })
    }
}

/// The guest's final move, also used for signaled intent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Stay,
    Switch,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Stay => "stay",
            Decision::Switch => "switch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Lose,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShowmasterStrategy {
    /// Always opens another goat door and offers the switch.
    Fair,
    /// Opens the guest's door whenever it hides a goat.
    Evil,
    /// Evil with probability `p`, drawn once per game.
    Moody { p: Probability },
    /// Reads the guest's signaled intent with probability `accuracy`: fair on
    /// a read stay, evil on a read switch, evil when unsure.
    MindReader { accuracy: Probability },
}

impl fmt::Display for ShowmasterStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShowmasterStrategy::Fair => f.write_str("fair"),
            ShowmasterStrategy::Evil => f.write_str("evil"),
            ShowmasterStrategy::Moody { p } => write!(f, "moody(p={p})"),
            ShowmasterStrategy::MindReader { accuracy } => write!(f, "mind_reader(accuracy={accuracy})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GuestStrategy {
    Stay,
    Switch,
    /// Stays with probability `q`, otherwise switches. The draw is made before
    /// the game and signaled truthfully.
    Mixed {
        q: Probability,
    },
    /// Signals stay but switches when offered; a mind-reading host sees
    /// through the act with probability `detection_risk`.
    Actor {
        detection_risk: Probability,
    },
}

impl fmt::Display for GuestStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuestStrategy::Stay => f.write_str("stay"),
            GuestStrategy::Switch => f.write_str("switch"),
            GuestStrategy::Mixed { q } => write!(f, "mixed(q={q})"),
            GuestStrategy::Actor { detection_risk } => write!(f, "actor(detection_risk={detection_risk})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HostAction {
    OpenedOtherDoor(DoorId),
    OpenedGuestDoor,
}

impl HostAction {
    pub fn label(self) -> &'static str {
        match self {
            HostAction::OpenedOtherDoor(_) => "opened_other",
            HostAction::OpenedGuestDoor => "opened_mine",
        }
    }
}

/// Complete record of one game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTranscript {
    pub seed: u64,
    pub showmaster: ShowmasterStrategy,
    pub guest: GuestStrategy,
    pub car_door: DoorId,
    pub initial_pick: DoorId,
    pub sampled_mood: Mood,
    pub signaled_intent: Decision,
    pub host_action: HostAction,
    pub final_decision: Option<Decision>,
    pub outcome: Outcome,
}

impl GameTranscript {
    /// The door the host opened, whichever it was.
    pub fn opened_door(&self) -> DoorId {
        match self.host_action {
            HostAction::OpenedOtherDoor(door) => door,
            HostAction::OpenedGuestDoor => self.initial_pick,
        }
    }

    /// Checks every structural invariant of a finished game.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.opened_door() == self.car_door {
            return Err(format!("host revealed the car behind door {}", self.car_door));
        }
        match self.host_action {
            HostAction::OpenedGuestDoor => {
                if self.initial_pick == self.car_door {
                    return Err("guest door opened although it hides the car".into());
                }
                if self.sampled_mood != Mood::Evil {
                    return Err("guest door opened by a fair host".into());
                }
                if self.final_decision.is_some() || self.outcome != Outcome::Lose {
                    return Err("game must end in a loss once the guest door is opened".into());
                }
            }
            HostAction::OpenedOtherDoor(door) => {
                if door == self.initial_pick {
                    return Err("other-door action names the guest's door".into());
                }
                let expected = match self.final_decision {
                    Some(Decision::Stay) => self.initial_pick == self.car_door,
                    Some(Decision::Switch) => self.initial_pick != self.car_door,
                    None => return Err("no decision recorded after an other-door reveal".into()),
                };
                if (self.outcome == Outcome::Win) != expected {
                    return Err("outcome does not follow from the decision".into());
                }
            }
        }
        Ok(())
    }
}

/// The five words a game draws from its generator, in stream order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameDraws {
    pub car_door: DoorId,
    pub initial_pick: DoorId,
    pub host_coin: u64,
    pub tie_break: u64,
    pub guest_coin: u64,
}

impl GameDraws {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GameDraws {
            car_door: DoorId::from_word(rng.next_u64()),
            initial_pick: DoorId::from_word(rng.next_u64()),
            host_coin: rng.next_u64(),
            tie_break: rng.next_u64(),
            guest_coin: rng.next_u64(),
        }
    }
}

/// What the host does once the mood is fixed.
pub fn host_act<R: RngCore + ?Sized>(mood: Mood, car_door: DoorId, initial_pick: DoorId, rng: &mut R) -> HostAction {
    host_act_with_word(mood, car_door, initial_pick, rng.next_u64())
}

fn host_act_with_word(mood: Mood, car_door: DoorId, initial_pick: DoorId, tie_break: u64) -> HostAction {
    if mood == Mood::Evil && initial_pick != car_door {
        return HostAction::OpenedGuestDoor;
    }
    let mut goats = car_door.others(initial_pick);
    let first = goats.next().expect("at least one goat door besides the pick");
    match goats.next() {
        // Guest holds the car: two goat doors, split on the top bit.
        Some(second) if tie_break >> 63 == 1 => HostAction::OpenedOtherDoor(second),
        _ => HostAction::OpenedOtherDoor(first),
    }
}

/// Mood of a mind-reading host facing a guest who signals `signaled_intent`.
pub fn resolve_mind_reader<R: RngCore + ?Sized>(
    accuracy: &Probability,
    signaled_intent: Decision,
    rng: &mut R,
) -> Mood {
    resolve_mind_reader_with_word(accuracy, signaled_intent, rng.next_u64())
}

fn resolve_mind_reader_with_word(accuracy: &Probability, signaled_intent: Decision, coin: u64) -> Mood {
    if !accuracy.covers(coin) {
        return Mood::Evil;
    }
    match signaled_intent {
        Decision::Stay => Mood::Fair,
        Decision::Switch => Mood::Evil,
    }
}

/// The guest's plan for one game: the signal shown to the host and the
/// decision played if the host offers the choice.
fn guest_plan(guest: &GuestStrategy, guest_coin: u64) -> (Decision, Decision) {
    match guest {
        GuestStrategy::Stay => (Decision::Stay, Decision::Stay),
        GuestStrategy::Switch => (Decision::Switch, Decision::Switch),
        GuestStrategy::Mixed { q } => {
            let d = if q.covers(guest_coin) { Decision::Stay } else { Decision::Switch };
            (d, d)
        }
        GuestStrategy::Actor { .. } => (Decision::Stay, Decision::Switch),
    }
}

fn sample_mood(showmaster: &ShowmasterStrategy, guest: &GuestStrategy, intent: Decision, draws: &GameDraws) -> Mood {
    match showmaster {
        ShowmasterStrategy::Fair => Mood::Fair,
        ShowmasterStrategy::Evil => Mood::Evil,
        ShowmasterStrategy::Moody { p } => {
            if p.covers(draws.host_coin) {
                Mood::Evil
            } else {
                Mood::Fair
            }
        }
        ShowmasterStrategy::MindReader { accuracy } => {
            if let GuestStrategy::Actor { detection_risk } = guest {
                if detection_risk.covers(draws.guest_coin) {
                    return Mood::Evil;
                }
            }
            resolve_mind_reader_with_word(accuracy, intent, draws.host_coin)
        }
    }
}

/// Plays one game. A pure function of its arguments.
pub fn play_game(showmaster: &ShowmasterStrategy, guest: &GuestStrategy, seed: u64) -> GameTranscript {
    let draws = GameDraws::from_seed(seed);
    let (intent, plan) = guest_plan(guest, draws.guest_coin);
    let mood = sample_mood(showmaster, guest, intent, &draws);
    let mut game = Game::with_draws(showmaster.clone(), seed, draws, mood);
    let action = game.pick(draws.initial_pick, intent, guest.clone()).expect("fresh game accepts a pick");
    if let HostAction::OpenedOtherDoor(_) = action {
        game.decide(plan).expect("decision phase follows an other-door reveal");
    }
    game.into_transcript().expect("game finished")
}

/// An acting guest against a mind reader.
pub fn actor_game(detection_risk: &Probability, accuracy: &Probability, seed: u64) -> GameTranscript {
    play_game(
        &ShowmasterStrategy::MindReader { accuracy: accuracy.clone() },
        &GuestStrategy::Actor { detection_risk: detection_risk.clone() },
        seed,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitingPick,
    AwaitingDecision,
    Finished,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::AwaitingPick => "awaiting_pick",
            Phase::AwaitingDecision => "awaiting_decision",
            Phase::Finished => "finished",
        })
    }
}

/// A game driven step by step, for interactive play.
///
/// The car and all coins come from the seed; the pick, the signal and the
/// decision are supplied by the caller. A mind-reading host resolves its
/// mood from the signal given with the pick.
#[derive(Debug, Clone)]
pub struct Game {
    seed: u64,
    showmaster: ShowmasterStrategy,
    draws: GameDraws,
    mood: Option<Mood>,
    guest: Option<GuestStrategy>,
    initial_pick: Option<DoorId>,
    signaled_intent: Option<Decision>,
    host_action: Option<HostAction>,
    final_decision: Option<Decision>,
    outcome: Option<Outcome>,
}

impl Game {
    pub fn deal(showmaster: ShowmasterStrategy, seed: u64) -> Self {
        let draws = GameDraws::from_seed(seed);
        Game {
            seed,
            showmaster,
            draws,
            mood: None,
            guest: None,
            initial_pick: None,
            signaled_intent: None,
            host_action: None,
            final_decision: None,
            outcome: None,
        }
    }

    fn with_draws(showmaster: ShowmasterStrategy, seed: u64, draws: GameDraws, mood: Mood) -> Self {
        let mut game = Game::deal(showmaster, seed);
        game.draws = draws;
        game.mood = Some(mood);
        game
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn showmaster(&self) -> &ShowmasterStrategy {
        &self.showmaster
    }

    pub fn phase(&self) -> Phase {
        if self.outcome.is_some() {
            Phase::Finished
        } else if self.host_action.is_some() {
            Phase::AwaitingDecision
        } else {
            Phase::AwaitingPick
        }
    }

    pub fn car_door(&self) -> DoorId {
        self.draws.car_door
    }

    pub fn mood(&self) -> Option<Mood> {
        self.mood
    }

    pub fn initial_pick(&self) -> Option<DoorId> {
        self.initial_pick
    }

    pub fn host_action(&self) -> Option<HostAction> {
        self.host_action
    }

    pub fn final_decision(&self) -> Option<Decision> {
        self.final_decision
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    fn violation(&self, action: &str) -> Error {
        Error::PhaseViolation { phase: self.phase().to_string(), action: action.to_string() }
    }

    /// Records the guest's pick and lets the host act. `guest` is the
    /// strategy written into the transcript.
    pub fn pick(&mut self, door: DoorId, signaled_intent: Decision, guest: GuestStrategy) -> Result<HostAction> {
        if self.phase() != Phase::AwaitingPick {
            return Err(self.violation("pick"));
        }
        let mood = match self.mood {
            Some(mood) => mood,
            None => sample_mood(&self.showmaster, &guest, signaled_intent, &self.draws),
        };
        let action = host_act_with_word(mood, self.draws.car_door, door, self.draws.tie_break);
        self.mood = Some(mood);
        self.guest = Some(guest);
        self.initial_pick = Some(door);
        self.signaled_intent = Some(signaled_intent);
        self.host_action = Some(action);
        if action == HostAction::OpenedGuestDoor {
            self.outcome = Some(Outcome::Lose);
        }
        Ok(action)
    }

    pub fn decide(&mut self, decision: Decision) -> Result<Outcome> {
        if self.phase() != Phase::AwaitingDecision {
            return Err(self.violation("decision"));
        }
        let held_car = self.initial_pick == Some(self.draws.car_door);
        let won = match decision {
            Decision::Stay => held_car,
            Decision::Switch => !held_car,
        };
        let outcome = if won { Outcome::Win } else { Outcome::Lose };
        self.final_decision = Some(decision);
        self.outcome = Some(outcome);
        Ok(outcome)
    }

    pub fn into_transcript(self) -> Option<GameTranscript> {
        Some(GameTranscript {
            seed: self.seed,
            showmaster: self.showmaster,
            guest: self.guest?,
            car_door: self.draws.car_door,
            initial_pick: self.initial_pick?,
            sampled_mood: self.mood?,
            signaled_intent: self.signaled_intent?,
            host_action: self.host_action?,
            final_decision: self.final_decision,
            outcome: self.outcome?,
        })
    }
}

/// Replays a recorded game from its seed and recorded guest inputs.
pub fn replay(transcript: &GameTranscript) -> GameTranscript {
    let mut game = Game::deal(transcript.showmaster.clone(), transcript.seed);
    game.pick(transcript.initial_pick, transcript.signaled_intent, transcript.guest.clone())
        .expect("fresh game accepts a pick");
    if let Some(decision) = transcript.final_decision {
        // A mismatched recording may have no decision phase; the comparison
        // against the original transcript reports that.
        let _ = game.decide(decision);
    }
    game.into_transcript().unwrap_or_else(|| transcript.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::prob;

    struct Words(Vec<u64>);

    impl RngCore for Words {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }
        fn next_u64(&mut self) -> u64 {
            self.0.remove(0)
        }
        fn fill_bytes(&mut self, _dst: &mut [u8]) {
            unimplemented!()
        }
    }

    fn door(i: i64) -> DoorId {
        DoorId::new(i).unwrap()
    }

    #[test]
    fn door_ids_are_one_to_three() {
        assert!(DoorId::new(0).is_err());
        assert!(DoorId::new(4).is_err());
        assert_eq!(DoorId::from_word(0), door(1));
        assert_eq!(DoorId::from_word(u64::MAX), door(3));
        assert_eq!(DoorId::from_word(u64::MAX / 2), door(2));
    }

    #[test]
    fn evil_opens_goat_pick() {
        let mut rng = Words(vec![0]);
        assert_eq!(host_act(Mood::Evil, door(1), door(2), &mut rng), HostAction::OpenedGuestDoor);
    }

    #[test]
    fn evil_opens_other_door_when_guest_holds_car() {
        for word in [0, u64::MAX] {
            let action = host_act(Mood::Evil, door(1), door(1), &mut Words(vec![word]));
            assert!(matches!(action, HostAction::OpenedOtherDoor(d) if d == door(2) || d == door(3)));
        }
    }

    #[test]
    fn fair_tie_break_splits_on_top_bit() {
        assert_eq!(host_act(Mood::Fair, door(1), door(1), &mut Words(vec![0])), HostAction::OpenedOtherDoor(door(2)));
        assert_eq!(
            host_act(Mood::Fair, door(1), door(1), &mut Words(vec![1 << 63])),
            HostAction::OpenedOtherDoor(door(3))
        );
        // A goat pick leaves a single door to open.
        assert_eq!(
            host_act(Mood::Fair, door(1), door(2), &mut Words(vec![1 << 63])),
            HostAction::OpenedOtherDoor(door(3))
        );
    }

    #[test]
    fn mind_reader_mapping() {
        let one = Probability::one();
        let zero = Probability::zero();
        assert_eq!(resolve_mind_reader(&one, Decision::Stay, &mut Words(vec![u64::MAX])), Mood::Fair);
        assert_eq!(resolve_mind_reader(&one, Decision::Switch, &mut Words(vec![0])), Mood::Evil);
        assert_eq!(resolve_mind_reader(&zero, Decision::Stay, &mut Words(vec![0])), Mood::Evil);
    }

    #[test]
    fn evil_switch_never_wins() {
        for seed in 0..2_000 {
            let t = play_game(&ShowmasterStrategy::Evil, &GuestStrategy::Switch, seed);
            assert_eq!(t.outcome, Outcome::Lose);
            t.check_invariants().unwrap();
        }
    }

    #[test]
    fn fair_host_always_opens_another_door() {
        for seed in 0..2_000 {
            let t = play_game(&ShowmasterStrategy::Fair, &GuestStrategy::Stay, seed);
            assert!(matches!(t.host_action, HostAction::OpenedOtherDoor(_)));
            t.check_invariants().unwrap();
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let host = ShowmasterStrategy::Moody { p: prob(1, 2) };
        let guest = GuestStrategy::Mixed { q: prob(1, 3) };
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(play_game(&host, &guest, seed), play_game(&host, &guest, seed));
        }
    }

    #[test]
    fn detected_actor_loses() {
        for seed in 0..500 {
            let t = actor_game(&Probability::one(), &Probability::one(), seed);
            assert_eq!(t.sampled_mood, Mood::Evil);
            assert_eq!(t.outcome, Outcome::Lose);
        }
    }

    #[test]
    fn undetected_actor_faces_fair_host_and_switches() {
        for seed in 0..500 {
            let t = actor_game(&Probability::zero(), &Probability::one(), seed);
            assert_eq!(t.sampled_mood, Mood::Fair);
            assert_eq!(t.signaled_intent, Decision::Stay);
            assert_eq!(t.final_decision, Some(Decision::Switch));
            assert_eq!(t.outcome == Outcome::Win, t.initial_pick != t.car_door);
        }
    }

    #[test]
    fn stepwise_phase_machine() {
        let mut game = Game::deal(ShowmasterStrategy::Fair, 9);
        assert_eq!(game.phase(), Phase::AwaitingPick);
        assert!(matches!(game.decide(Decision::Stay), Err(Error::PhaseViolation { .. })));
        game.pick(door(2), Decision::Stay, GuestStrategy::Stay).unwrap();
        assert_eq!(game.phase(), Phase::AwaitingDecision);
        assert!(game.pick(door(1), Decision::Stay, GuestStrategy::Stay).is_err());
        game.decide(Decision::Stay).unwrap();
        assert_eq!(game.phase(), Phase::Finished);
        assert!(game.decide(Decision::Stay).is_err());
        let t = game.into_transcript().unwrap();
        t.check_invariants().unwrap();
        assert_eq!(replay(&t), t);
    }

    #[test]
    fn invariant_checker_catches_revealed_car() {
        let mut t = play_game(&ShowmasterStrategy::Fair, &GuestStrategy::Stay, 3);
        t.host_action = HostAction::OpenedOtherDoor(t.car_door);
        assert!(t.check_invariants().is_err());
    }
}
