//! Exact enumeration of the outcome tree.
//!
//! The tree branches on car placement, initial pick, the guest's coin, the
//! host's mood (or read/unsure coin) and the goat tie-break, with exact
//! branch weights. Host behaviour is restated here from the rules of the
//! game rather than borrowed from [`crate::game`], so the engine can be
//! checked against it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Decision, DoorId, GuestStrategy, HostAction, Mood, Outcome, ShowmasterStrategy};
use crate::probability::Probability;

/// Host behaviours the oracle can enumerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleHost {
    /// Any engine strategy.
    Strategy(ShowmasterStrategy),
    /// A perfect mind reader that also sees the car: fair on guests who
    /// intend to stay and on switchers who picked the car, evil otherwise.
    OmniscientReader,
}

impl From<ShowmasterStrategy> for OracleHost {
    fn from(s: ShowmasterStrategy) -> Self {
        OracleHost::Strategy(s)
    }
}

/// One leaf of the outcome tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeAtom {
    pub car_door: DoorId,
    pub initial_pick: DoorId,
    pub sampled_mood: Mood,
    pub signaled_intent: Decision,
    pub host_action: HostAction,
    pub final_decision: Option<Decision>,
    pub outcome: Outcome,
    pub weight: Probability,
}

impl OutcomeAtom {
    pub fn is_win(&self) -> bool {
        self.outcome == Outcome::Win
    }

    pub fn opened_other(&self) -> bool {
        matches!(self.host_action, HostAction::OpenedOtherDoor(_))
    }

    pub fn opened_mine(&self) -> bool {
        self.host_action == HostAction::OpenedGuestDoor
    }

    pub fn car_behind_pick(&self) -> bool {
        self.car_door == self.initial_pick
    }

    pub fn is_evil(&self) -> bool {
        self.sampled_mood == Mood::Evil
    }

    /// Observable fields, used to compare distributions.
    pub fn key(&self) -> AtomKey {
        (
            self.car_door,
            self.initial_pick,
            self.sampled_mood,
            self.signaled_intent,
            self.host_action,
            self.final_decision,
            self.outcome,
        )
    }
}

pub type AtomKey = (DoorId, DoorId, Mood, Decision, HostAction, Option<Decision>, Outcome);

struct GuestBranch {
    intent: Decision,
    plan: Decision,
    detected: bool,
    weight: BigRational,
}

fn guest_branches(guest: &GuestStrategy) -> Vec<GuestBranch> {
    let one = BigRational::one();
    let branch = |intent, plan, detected, weight| GuestBranch { intent, plan, detected, weight };
    match guest {
        GuestStrategy::Stay => vec![branch(Decision::Stay, Decision::Stay, false, one)],
        GuestStrategy::Switch => vec![branch(Decision::Switch, Decision::Switch, false, one)],
        GuestStrategy::Mixed { q } => vec![
            branch(Decision::Stay, Decision::Stay, false, q.ratio().clone()),
            branch(Decision::Switch, Decision::Switch, false, &one - q.ratio()),
        ],
        GuestStrategy::Actor { detection_risk } => vec![
            branch(Decision::Stay, Decision::Switch, true, detection_risk.ratio().clone()),
            branch(Decision::Stay, Decision::Switch, false, &one - detection_risk.ratio()),
        ],
    }
}

fn mood_branches(host: &OracleHost, guest: &GuestBranch, car: DoorId, pick: DoorId) -> Vec<(Mood, BigRational)> {
    let one = BigRational::one();
    match host {
        OracleHost::Strategy(ShowmasterStrategy::Fair) => vec![(Mood::Fair, one)],
        OracleHost::Strategy(ShowmasterStrategy::Evil) => vec![(Mood::Evil, one)],
        OracleHost::Strategy(ShowmasterStrategy::Moody { p }) => {
            vec![(Mood::Evil, p.ratio().clone()), (Mood::Fair, &one - p.ratio())]
        }
        OracleHost::Strategy(ShowmasterStrategy::MindReader { accuracy }) => {
            if guest.detected {
                return vec![(Mood::Evil, one)];
            }
            let read = if guest.intent == Decision::Stay { Mood::Fair } else { Mood::Evil };
            vec![(read, accuracy.ratio().clone()), (Mood::Evil, &one - accuracy.ratio())]
        }
        OracleHost::OmniscientReader => {
            let fair = !guest.detected && (guest.intent == Decision::Stay || car == pick);
            vec![(if fair { Mood::Fair } else { Mood::Evil }, one)]
        }
    }
}

fn action_branches(mood: Mood, car: DoorId, pick: DoorId) -> Vec<(HostAction, BigRational)> {
    if mood == Mood::Evil && car != pick {
        return vec![(HostAction::OpenedGuestDoor, BigRational::one())];
    }
    let goats: Vec<DoorId> = DoorId::ALL.iter().copied().filter(|&d| d != car && d != pick).collect();
    let share = BigRational::new(1.into(), (goats.len() as i64).into());
    goats.into_iter().map(|d| (HostAction::OpenedOtherDoor(d), share.clone())).collect()
}

/// Every leaf of the outcome tree with a non-zero weight.
pub fn enumerate(showmaster: &ShowmasterStrategy, guest: &GuestStrategy) -> Vec<OutcomeAtom> {
    enumerate_host(&OracleHost::Strategy(showmaster.clone()), guest)
}

pub fn enumerate_host(host: &OracleHost, guest: &GuestStrategy) -> Vec<OutcomeAtom> {
    let third = BigRational::new(1.into(), 3.into());
    let mut atoms = Vec::new();
    for car in DoorId::ALL {
        for pick in DoorId::ALL {
            let placement = &third * &third;
            for g in guest_branches(guest) {
                let after_guest = &placement * &g.weight;
                for (mood, w_mood) in mood_branches(host, &g, car, pick) {
                    let after_mood = &after_guest * &w_mood;
                    for (action, w_action) in action_branches(mood, car, pick) {
                        let weight = &after_mood * &w_action;
                        if weight.is_zero() {
                            continue;
                        }
                        let (final_decision, outcome) = match action {
                            HostAction::OpenedGuestDoor => (None, Outcome::Lose),
                            HostAction::OpenedOtherDoor(opened) => {
                                let final_door = match g.plan {
                                    Decision::Stay => pick,
                                    Decision::Switch => DoorId::ALL
                                        .into_iter()
                                        .find(|&d| d != pick && d != opened)
                                        .expect("one door remains closed"),
                                };
                                let outcome = if final_door == car { Outcome::Win } else { Outcome::Lose };
                                (Some(g.plan), outcome)
                            }
                        };
                        atoms.push(OutcomeAtom {
                            car_door: car,
                            initial_pick: pick,
                            sampled_mood: mood,
                            signaled_intent: g.intent,
                            host_action: action,
                            final_decision,
                            outcome,
                            weight: Probability::from_ratio_unchecked(weight),
                        });
                    }
                }
            }
        }
    }
    atoms
}

/// Sum of atom weights, exact.
pub fn total_weight(atoms: &[OutcomeAtom]) -> BigRational {
    atoms.iter().map(|a| a.weight.ratio().clone()).sum()
}

pub fn event_probability<F>(atoms: &[OutcomeAtom], predicate: F) -> Probability
where
    F: Fn(&OutcomeAtom) -> bool,
{
    let sum: BigRational = atoms.iter().filter(|a| predicate(a)).map(|a| a.weight.ratio().clone()).sum();
    Probability::from_ratio(sum).expect("atom weights sum to at most one")
}

/// `P(target | given)`; fails when `given` has probability zero.
pub fn conditional_probability<T, G>(atoms: &[OutcomeAtom], target: T, given: G) -> Result<Probability>
where
    T: Fn(&OutcomeAtom) -> bool,
    G: Fn(&OutcomeAtom) -> bool,
{
    let denominator = event_probability(atoms, &given);
    if denominator.is_zero() {
        return Err(Error::ConditioningOnNull);
    }
    let numerator = event_probability(atoms, |a| given(a) && target(a));
    Ok(Probability::from_ratio_unchecked(numerator.into_ratio() / denominator.into_ratio()))
}

pub fn win_probability(atoms: &[OutcomeAtom]) -> Probability {
    event_probability(atoms, OutcomeAtom::is_win)
}

/// Atoms merged by observable key, for distribution comparisons.
pub fn distribution(atoms: &[OutcomeAtom]) -> BTreeMap<AtomKey, BigRational> {
    let mut merged = BTreeMap::new();
    for atom in atoms {
        *merged.entry(atom.key()).or_insert_with(BigRational::zero) += atom.weight.ratio();
    }
    merged
}

fn action_text(action: HostAction) -> String {
    match action {
        HostAction::OpenedOtherDoor(d) => format!("opened_other({d})"),
        HostAction::OpenedGuestDoor => "opened_mine".to_string(),
    }
}

/// Aligned text table of the atoms, for audit.
pub fn atom_table(atoms: &[OutcomeAtom]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3} {:>4} {:>5} {:>7} {:<16} {:>8} {:>7} {:>10} {:>10}",
        "car", "pick", "mood", "intent", "host_action", "decision", "outcome", "weight", "decimal"
    );
    for a in atoms {
        let decision = a.final_decision.map_or_else(|| "-".to_string(), |d| d.to_string());
        let outcome = if a.is_win() { "win" } else { "lose" };
        let _ = writeln!(
            out,
            "{:>3} {:>4} {:>5} {:>7} {:<16} {:>8} {:>7} {:>10} {:>10}",
            a.car_door.to_string(),
            a.initial_pick.to_string(),
            a.sampled_mood.to_string(),
            a.signaled_intent.to_string(),
            action_text(a.host_action),
            decision,
            outcome,
            a.weight.to_string(),
            a.weight.to_decimal_string(),
        );
    }
    let _ = writeln!(out, "total weight {}", total_weight(atoms));
    out
}
