//! Interactive game sessions.
//!
//! A session holds one game at a time on the server side. Client views
//! never include the car position or the host's mood before the game is
//! finished. Each session is single-writer: the store hands out one lock per
//! session, so messages for a session are applied in arrival order while
//! different sessions proceed independently.
//!
//! An `adaptive` host is a mind reader whose "reading" is a Laplace-smoothed
//! estimate of how often this player stays: it predicts stay above 1/2,
//! switch below 1/2, and plays evil when the estimate is exactly 1/2.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::analytics::Recommendation;
use crate::archive;
use crate::belief::{BeliefState, ExactValue};
use crate::error::{Error, Result};
use crate::game::{
    Decision, DoorId, Game, GameTranscript, GuestStrategy, HostAction, Mood, Outcome, Phase, ShowmasterStrategy,
};
use crate::probability::{prob, Probability};
use crate::simulation::replication_seed;

pub const SCHEMA_VERSION: u32 = 1;

/// Host configured for a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HostSpec {
    Fair,
    Evil,
    Moody { p: Probability },
    MindReader { accuracy: Probability },
    Adaptive,
}

impl HostSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            HostSpec::Fair => "fair",
            HostSpec::Evil => "evil",
            HostSpec::Moody { .. } => "moody",
            HostSpec::MindReader { .. } => "mind_reader",
            HostSpec::Adaptive => "adaptive",
        }
    }
}

/// Whether a moody host draws a mood for every game or once per session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoodMode {
    #[default]
    PerGame,
    PerSession,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionConfig {
    pub host: HostSpec,
    /// Prior on the host being evil used by the belief panel.
    pub prior: Probability,
    pub mood_mode: MoodMode,
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(host: HostSpec, seed: u64) -> Self {
        SessionConfig { host, prior: prob(1, 2), mood_mode: MoodMode::PerGame, seed }
    }
}

/// Counts of a player's past decisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AdaptiveReaderModel {
    pub stay_count: u64,
    pub switch_count: u64,
}

impl AdaptiveReaderModel {
    /// `(stays + 1) / (stays + switches + 2)`.
    pub fn propensity(&self) -> Probability {
        let num = BigRational::new((self.stay_count + 1).into(), (self.stay_count + self.switch_count + 2).into());
        Probability::from_ratio_unchecked(num)
    }

    pub fn update(self, decision: Decision) -> Self {
        match decision {
            Decision::Stay => AdaptiveReaderModel { stay_count: self.stay_count + 1, ..self },
            Decision::Switch => AdaptiveReaderModel { switch_count: self.switch_count + 1, ..self },
        }
    }

    /// `None` when the propensity is exactly 1/2 (unsure).
    pub fn predicted_intent(&self) -> Option<Decision> {
        match self.stay_count.cmp(&self.switch_count) {
            std::cmp::Ordering::Greater => Some(Decision::Stay),
            std::cmp::Ordering::Less => Some(Decision::Switch),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// The engine strategy and signal that reproduce the adaptive host.
    pub fn as_mind_reader(&self) -> (ShowmasterStrategy, Decision) {
        match self.predicted_intent() {
            Some(intent) => (ShowmasterStrategy::MindReader { accuracy: Probability::one() }, intent),
            None => (ShowmasterStrategy::MindReader { accuracy: Probability::zero() }, Decision::Stay),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SessionStats {
    pub games: u64,
    pub wins: u64,
    pub stay_games: u64,
    pub stay_wins: u64,
    pub switch_games: u64,
    pub switch_wins: u64,
    pub opened_mine: u64,
}

impl SessionStats {
    fn record(&mut self, t: &GameTranscript) {
        let won = t.outcome == Outcome::Win;
        self.games += 1;
        self.wins += won as u64;
        match t.final_decision {
            Some(Decision::Stay) => {
                self.stay_games += 1;
                self.stay_wins += won as u64;
            }
            Some(Decision::Switch) => {
                self.switch_games += 1;
                self.switch_wins += won as u64;
            }
            None => self.opened_mine += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionTraceRow {
    pub game: u64,
    pub step: u64,
    pub action: &'static str,
    pub posterior_evil: ExactValue,
    pub posterior_car: ExactValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DoorContent {
    Goat,
    Car,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoorView {
    pub door: u8,
    pub open: bool,
    pub picked: bool,
    pub content: Option<DoorContent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HostView {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Probability>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<Probability>,
    pub mood_mode: MoodMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BeliefView {
    pub prior_evil: ExactValue,
    pub posterior_evil: ExactValue,
    pub posterior_car_own_door: ExactValue,
    pub recommendation: Option<Recommendation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileView {
    pub stay_count: u64,
    pub switch_count: u64,
    pub propensity: ExactValue,
    pub predicted_intent: Option<Decision>,
}

/// Hidden state, present only once a game is finished.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reveal {
    pub car_door: u8,
    pub sampled_mood: Mood,
    pub seed: u64,
}

/// Everything a client may see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionView {
    pub schema_version: u32,
    pub session_id: String,
    pub host: HostView,
    pub phase: Phase,
    pub game_index: u64,
    pub doors: Vec<DoorView>,
    pub initial_pick: Option<u8>,
    pub host_action: Option<&'static str>,
    pub opened_door: Option<u8>,
    pub final_decision: Option<Decision>,
    pub outcome: Option<Outcome>,
    pub reveal: Option<Reveal>,
    pub belief: BeliefView,
    pub belief_trace: Vec<SessionTraceRow>,
    pub stats: SessionStats,
    pub profile: ProfileView,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    config: SessionConfig,
    session_mood: Option<Mood>,
    game_index: u64,
    game: Game,
    belief: BeliefState,
    trace: Vec<SessionTraceRow>,
    history: Vec<GameTranscript>,
    profile: AdaptiveReaderModel,
    stats: SessionStats,
}

impl Session {
    pub fn new(id: impl Into<String>, config: SessionConfig) -> Self {
        let session_mood = match (&config.host, config.mood_mode) {
            (HostSpec::Moody { p }, MoodMode::PerSession) => {
                let word = replication_seed(!config.seed, 0);
                Some(if p.covers(word) { Mood::Evil } else { Mood::Fair })
            }
            _ => None,
        };
        let mut session = Session {
            id: id.into(),
            belief: BeliefState::new(config.prior.clone()),
            game: Game::deal(ShowmasterStrategy::Fair, 0),
            config,
            session_mood,
            game_index: 0,
            trace: Vec::new(),
            history: Vec::new(),
            profile: AdaptiveReaderModel::default(),
            stats: SessionStats::default(),
        };
        session.game = Game::deal(session.showmaster_for_game(), session.game_seed());
        session
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.game.phase()
    }

    pub fn history(&self) -> &[GameTranscript] {
        &self.history
    }

    pub fn profile(&self) -> AdaptiveReaderModel {
        self.profile
    }

    pub fn belief(&self) -> &BeliefState {
        &self.belief
    }

    fn game_seed(&self) -> u64 {
        replication_seed(self.config.seed, self.game_index)
    }

    /// The engine strategy that plays the next game. Adaptive hosts are
    /// resolved at pick time, when the profile is final.
    fn showmaster_for_game(&self) -> ShowmasterStrategy {
        match (&self.config.host, self.session_mood) {
            (_, Some(Mood::Fair)) => ShowmasterStrategy::Fair,
            (_, Some(Mood::Evil)) => ShowmasterStrategy::Evil,
            (HostSpec::Fair, None) => ShowmasterStrategy::Fair,
            (HostSpec::Evil, None) => ShowmasterStrategy::Evil,
            (HostSpec::Moody { p }, None) => ShowmasterStrategy::Moody { p: p.clone() },
            (HostSpec::MindReader { accuracy }, None) => ShowmasterStrategy::MindReader { accuracy: accuracy.clone() },
            (HostSpec::Adaptive, None) => self.profile.as_mind_reader().0,
        }
    }

    fn start_next_game(&mut self) {
        self.game_index += 1;
        if self.config.mood_mode == MoodMode::PerGame {
            self.belief = BeliefState::new(self.config.prior.clone());
        }
        self.game = Game::deal(self.showmaster_for_game(), self.game_seed());
    }

    /// Picks a door. In the finished phase this deals the next game first.
    /// `intent` is the stay/switch signal shown to a mind-reading host; an
    /// adaptive host ignores it and uses its own prediction.
    pub fn pick(&mut self, door: i64, intent: Option<Decision>) -> Result<()> {
        let door = DoorId::new(door)?;
        match self.phase() {
            Phase::AwaitingPick => {}
            Phase::Finished => self.start_next_game(),
            Phase::AwaitingDecision => {
                return Err(Error::PhaseViolation { phase: self.phase().to_string(), action: "pick".into() })
            }
        }
        let intent = if self.config.host == HostSpec::Adaptive && self.session_mood.is_none() {
            let (showmaster, predicted) = self.profile.as_mind_reader();
            self.game = Game::deal(showmaster, self.game_seed());
            predicted
        } else {
            intent.unwrap_or(Decision::Stay)
        };
        let guest = match intent {
            Decision::Stay => GuestStrategy::Stay,
            Decision::Switch => GuestStrategy::Switch,
        };
        let action = self.game.pick(door, intent, guest)?;
        self.observe(action);
        if self.phase() == Phase::Finished {
            self.finish();
        }
        Ok(())
    }

    pub fn decide(&mut self, decision: Decision) -> Result<()> {
        self.game.decide(decision)?;
        self.profile = self.profile.update(decision);
        self.finish();
        Ok(())
    }

    fn observe(&mut self, action: HostAction) {
        self.belief = self.belief.update(action);
        self.trace.push(SessionTraceRow {
            game: self.game_index,
            step: self.trace.len() as u64 + 1,
            action: action.label(),
            posterior_evil: (&self.belief.posterior_evil).into(),
            posterior_car: (&self.belief.posterior_car_own_door).into(),
        });
    }

    fn finish(&mut self) {
        let mut transcript = self.game.clone().into_transcript().expect("finished game has a transcript");
        transcript.guest = match transcript.final_decision.unwrap_or(transcript.signaled_intent) {
            Decision::Stay => GuestStrategy::Stay,
            Decision::Switch => GuestStrategy::Switch,
        };
        self.stats.record(&transcript);
        self.history.push(transcript);
    }

    pub fn last_transcript(&self) -> Option<&GameTranscript> {
        match self.phase() {
            Phase::Finished => self.history.last(),
            _ => None,
        }
    }

    pub fn view(&self) -> SessionView {
        let phase = self.phase();
        let finished = phase == Phase::Finished;
        let car = self.game.car_door();
        let pick = self.game.initial_pick();
        let action = self.game.host_action();
        let opened = action.map(|a| match a {
            HostAction::OpenedOtherDoor(d) => d,
            HostAction::OpenedGuestDoor => pick.expect("pick precedes host action"),
        });
        let doors = DoorId::ALL
            .iter()
            .map(|&d| {
                let open = opened == Some(d) || finished;
                let content = if finished {
                    Some(if d == car { DoorContent::Car } else { DoorContent::Goat })
                } else if opened == Some(d) {
                    Some(DoorContent::Goat)
                } else {
                    None
                };
                DoorView { door: d.index(), open, picked: pick == Some(d), content }
            })
            .collect();
        let (p, accuracy) = match &self.config.host {
            HostSpec::Moody { p } => (Some(p.clone()), None),
            HostSpec::MindReader { accuracy } => (None, Some(accuracy.clone())),
            _ => (None, None),
        };
        let recommendation = match phase {
            Phase::AwaitingDecision => self.belief.recommend().ok(),
            _ => None,
        };
        SessionView {
            schema_version: SCHEMA_VERSION,
            session_id: self.id.clone(),
            host: HostView { kind: self.config.host.kind(), p, accuracy, mood_mode: self.config.mood_mode },
            phase,
            game_index: self.game_index,
            doors,
            initial_pick: pick.map(DoorId::index),
            host_action: action.map(HostAction::label),
            opened_door: opened.map(DoorId::index),
            final_decision: self.game.final_decision(),
            outcome: self.game.outcome(),
            reveal: finished.then(|| Reveal {
                car_door: car.index(),
                sampled_mood: self.game.mood().expect("finished game has a mood"),
                seed: self.game.seed(),
            }),
            belief: BeliefView {
                prior_evil: (&self.belief.prior_evil).into(),
                posterior_evil: (&self.belief.posterior_evil).into(),
                posterior_car_own_door: (&self.belief.posterior_car_own_door).into(),
                recommendation,
            },
            belief_trace: self.trace.clone(),
            stats: self.stats,
            profile: ProfileView {
                stay_count: self.profile.stay_count,
                switch_count: self.profile.switch_count,
                propensity: (&self.profile.propensity()).into(),
                predicted_intent: self.profile.predicted_intent(),
            },
        }
    }
}

/// All live sessions, plus an optional JSONL archive of finished games.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    archive: Option<(PathBuf, Mutex<File>)>,
}

impl SessionStore {
    pub fn new() -> Self {
        SessionStore::default()
    }

    pub fn with_archive(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(SessionStore { sessions: RwLock::default(), archive: Some((path, Mutex::new(file))) })
    }

    pub fn archive_path(&self) -> Option<&Path> {
        self.archive.as_ref().map(|(p, _)| p.as_path())
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Creates a session; a missing seed is drawn from the OS.
    pub fn create(
        &self,
        host: HostSpec,
        prior: Option<Probability>,
        mood_mode: MoodMode,
        seed: Option<u64>,
    ) -> SessionView {
        let id = format!("{:032x}", rand::random::<u128>());
        let mut config = SessionConfig::new(host, seed.unwrap_or_else(rand::random));
        if let Some(prior) = prior {
            config.prior = prior;
        }
        config.mood_mode = mood_mode;
        let session = Session::new(id.clone(), config);
        let view = session.view();
        self.sessions.write().expect("session map lock").insert(id, Arc::new(Mutex::new(session)));
        view
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_string()))
    }

    fn step<F>(&self, id: &str, apply: F) -> Result<SessionView>
    where
        F: FnOnce(&mut Session) -> Result<()>,
    {
        let handle = self.get(id)?;
        let mut session = handle.lock().expect("session lock");
        let finished_before = session.history.len();
        apply(&mut session)?;
        if session.history.len() > finished_before {
            self.append_archive(session.history.last().expect("just finished"));
        }
        Ok(session.view())
    }

    fn append_archive(&self, transcript: &GameTranscript) {
        if let Some((path, file)) = &self.archive {
            let mut file = file.lock().expect("archive lock");
            if let Err(e) = writeln!(file, "{}", archive::to_json_line(transcript)).and_then(|_| file.flush()) {
                eprintln!("failed to append to archive {}: {e}", path.display());
            }
        }
    }

    pub fn pick(&self, id: &str, door: i64, intent: Option<Decision>) -> Result<SessionView> {
        self.step(id, |s| s.pick(door, intent))
    }

    pub fn decide(&self, id: &str, decision: Decision) -> Result<SessionView> {
        self.step(id, |s| s.decide(decision))
    }

    pub fn view(&self, id: &str) -> Result<SessionView> {
        Ok(self.get(id)?.lock().expect("session lock").view())
    }

    /// Finished games of a session, oldest first.
    pub fn history(&self, id: &str) -> Result<Vec<GameTranscript>> {
        Ok(self.get(id)?.lock().expect("session lock").history.clone())
    }
}
