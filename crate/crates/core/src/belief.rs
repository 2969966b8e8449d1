//! Guest-side Bayesian tracking of the host's mood and the car's location.
//!
//! Updates use the likelihood table of the two observable host actions:
//!
//! | mood | P(other) | P(my) |
//! |------|----------|-------|
//! | fair | 1        | 0     |
//! | evil | 1/3      | 2/3   |
//!
//! Successive observations are treated as evidence about one fixed mood, so
//! the posterior after an observation is the prior for the next one.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::analytics::Recommendation;
use crate::error::{Error, Result};
use crate::game::{GameTranscript, HostAction};
use crate::probability::{ratio, Probability};

/// Likelihood of a host action given the mood and what the guest holds.
fn likelihood(action: HostAction, evil: bool, holds_car: bool) -> BigRational {
    let other = match (evil, holds_car) {
        (_, true) => BigRational::one(),
        (false, false) => BigRational::one(),
        (true, false) => BigRational::zero(),
    };
    match action {
        HostAction::OpenedOtherDoor(_) => other,
        HostAction::OpenedGuestDoor => BigRational::one() - other,
    }
}

/// `P(action | mood)`, marginal over the guest's door.
fn mood_likelihood(action: HostAction, evil: bool) -> BigRational {
    let car = ratio(1, 3);
    let goat = ratio(2, 3);
    &car * likelihood(action, evil, true) + &goat * likelihood(action, evil, false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefState {
    pub prior_evil: Probability,
    pub posterior_evil: Probability,
    /// Probability that the car is behind the guest's initial pick, as of
    /// the latest observation.
    pub posterior_car_own_door: Probability,
    pub observations: Vec<HostAction>,
}

impl BeliefState {
    pub fn new(prior_evil: Probability) -> Self {
        BeliefState {
            posterior_evil: prior_evil.clone(),
            prior_evil,
            posterior_car_own_door: Probability::from_ratio_unchecked(ratio(1, 3)),
            observations: Vec::new(),
        }
    }

    /// Bayes update on one host action; returns the new state.
    ///
    /// Seeing the guest's own door opened forces `posterior_evil = 1` even
    /// from a zero prior, since no fair host ever does it.
    pub fn update(&self, action: HostAction) -> BeliefState {
        let evil = self.posterior_evil.ratio();
        let fair = BigRational::one() - evil;
        let joint_evil = evil * mood_likelihood(action, true);
        let evidence = &joint_evil + &fair * mood_likelihood(action, false);
        let posterior_evil = if evidence.is_zero() { BigRational::one() } else { joint_evil / &evidence };

        // Car behind own door: marginalise the mood out of P(action | car/goat).
        let given =
            |holds_car: bool| evil * likelihood(action, true, holds_car) + &fair * likelihood(action, false, holds_car);
        let joint_car = ratio(1, 3) * given(true);
        let joint_goat = ratio(2, 3) * given(false);
        let total = &joint_car + &joint_goat;
        let posterior_car = if total.is_zero() { BigRational::zero() } else { joint_car / total };

        let mut observations = self.observations.clone();
        observations.push(action);
        BeliefState {
            prior_evil: self.prior_evil.clone(),
            posterior_evil: Probability::from_ratio_unchecked(posterior_evil),
            posterior_car_own_door: Probability::from_ratio_unchecked(posterior_car),
            observations,
        }
    }

    pub fn update_all<I: IntoIterator<Item = HostAction>>(&self, actions: I) -> BeliefState {
        actions.into_iter().fold(self.clone(), |state, action| state.update(action))
    }

    /// Stay when the own door is more likely than not to hide the car.
    pub fn recommend(&self) -> Result<Recommendation> {
        match self.observations.last() {
            Some(HostAction::OpenedOtherDoor(_)) => {}
            _ => return Err(Error::NoChoiceAvailable),
        }
        let half = ratio(1, 2);
        let car = self.posterior_car_own_door.ratio();
        Ok(if car < &half {
            Recommendation::Switch
        } else if car > &half {
            Recommendation::Stay
        } else {
            Recommendation::Indifferent
        })
    }

    /// One trace row per observation, replaying the updates from the prior.
    pub fn trace(&self) -> Vec<BeliefTraceRow> {
        let mut state = BeliefState::new(self.prior_evil.clone());
        self.observations
            .iter()
            .enumerate()
            .map(|(i, &action)| {
                state = state.update(action);
                BeliefTraceRow::new(i as u64 + 1, action, &state)
            })
            .collect()
    }
}

/// A belief value as `"a/b"` with its decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactValue {
    pub exact: Probability,
    pub decimal: String,
}

impl From<&Probability> for ExactValue {
    fn from(p: &Probability) -> Self {
        ExactValue { exact: p.clone(), decimal: p.to_decimal_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BeliefTraceRow {
    pub step: u64,
    pub action: &'static str,
    pub posterior_evil: ExactValue,
    pub posterior_car: ExactValue,
}

impl BeliefTraceRow {
    pub fn new(step: u64, action: HostAction, state: &BeliefState) -> Self {
        BeliefTraceRow {
            step,
            action: action.label(),
            posterior_evil: (&state.posterior_evil).into(),
            posterior_car: (&state.posterior_car_own_door).into(),
        }
    }
}

pub fn trace_jsonl(rows: &[BeliefTraceRow]) -> String {
    rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect()
}

/// Method-of-moments estimate of the host's evil frequency from archived
/// games, with a 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PEstimate {
    pub games: u64,
    pub opened_mine: u64,
    pub point: Probability,
    pub lower: f64,
    pub upper: f64,
}

impl PEstimate {
    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes / n` at the 95% level.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    let n_f = n as f64;
    let phat = successes as f64 / n_f;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n_f;
    let centre = (phat + z2 / (2.0 * n_f)) / denom;
    let half = Z_95 * (phat * (1.0 - phat) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lower = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let upper = if successes == n { 1.0 } else { (centre + half).min(1.0) };
    (lower, upper)
}

/// `p̂ = min(1, 3f/2)` where `f` is the share of games in which the host
/// opened the guest's door, inverting `P(my) = 2p/3`.
pub fn estimate_p(transcripts: &[GameTranscript]) -> Result<PEstimate> {
    if transcripts.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let games = transcripts.len() as u64;
    let opened_mine = transcripts.iter().filter(|t| t.host_action == HostAction::OpenedGuestDoor).count() as u64;
    let raw = ratio(3, 2) * BigRational::new(opened_mine.into(), games.into());
    let point = Probability::from_ratio(raw).unwrap_or_else(|_| Probability::one());
    let (lo, hi) = wilson_interval(opened_mine, games);
    Ok(PEstimate { games, opened_mine, point, lower: (1.5 * lo).min(1.0), upper: (1.5 * hi).min(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{play_game, DoorId, GuestStrategy, ShowmasterStrategy};
    use crate::probability::prob;

    fn other() -> HostAction {
        HostAction::OpenedOtherDoor(DoorId::new(2).unwrap())
    }

    #[test]
    fn update_after_other_door() {
        let s = BeliefState::new(prob(1, 2)).update(other());
        assert_eq!(s.posterior_evil, prob(1, 4));
        assert_eq!(s.posterior_car_own_door, prob(1, 2));
        let s = BeliefState::new(Probability::zero()).update(other());
        assert_eq!(s.posterior_evil, Probability::zero());
        assert_eq!(s.posterior_car_own_door, prob(1, 3));
    }

    #[test]
    fn own_door_opened_means_evil() {
        for prior in [Probability::zero(), prob(1, 4), Probability::one()] {
            let s = BeliefState::new(prior).update(HostAction::OpenedGuestDoor);
            assert_eq!(s.posterior_evil, Probability::one());
            assert_eq!(s.posterior_car_own_door, Probability::zero());
            assert_eq!(s.recommend(), Err(Error::NoChoiceAvailable));
        }
    }

    #[test]
    fn recommendations() {
        let rec = |n, d| BeliefState::new(prob(n, d)).update(other()).recommend().unwrap();
        assert_eq!(rec(1, 4), Recommendation::Switch);
        assert_eq!(rec(1, 2), Recommendation::Indifferent);
        assert_eq!(rec(2, 3), Recommendation::Stay);
        assert_eq!(BeliefState::new(prob(2, 3)).update(other()).posterior_car_own_door, prob(3, 5));
        assert_eq!(BeliefState::new(prob(1, 2)).recommend(), Err(Error::NoChoiceAvailable));
    }

    #[test]
    fn trace_replays_updates() {
        let s = BeliefState::new(prob(1, 2)).update_all([other(), other()]);
        let trace = s.trace();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].posterior_evil.exact, prob(1, 4));
        assert_eq!(trace[1].posterior_evil.exact, s.posterior_evil);
        // Two reveals of another door from 1/2: (1/18)/(1/18 + 1/2) = 1/10.
        assert_eq!(s.posterior_evil, prob(1, 10));
        let line = trace_jsonl(&trace);
        assert!(line
            .starts_with(r#"{"step":1,"action":"opened_other","posterior_evil":{"exact":"1/4","decimal":"0.250000"}"#));
    }

    #[test]
    fn estimate_p_edges() {
        assert_eq!(estimate_p(&[]), Err(Error::EmptyArchive));
        let fair: Vec<_> = (0..1000).map(|s| play_game(&ShowmasterStrategy::Fair, &GuestStrategy::Stay, s)).collect();
        let est = estimate_p(&fair).unwrap();
        assert_eq!(est.point, Probability::zero());
        assert!(est.contains(0.0));
        let evil: Vec<_> = (0..20_000).map(|s| play_game(&ShowmasterStrategy::Evil, &GuestStrategy::Stay, s)).collect();
        let est = estimate_p(&evil).unwrap();
        assert!((est.point.to_f64() - 1.0).abs() < 0.03, "{}", est.point.to_f64());
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
