//! JSONL transcript archives.
//!
//! One transcript per line. Doors are integers 1-3 and enumerations are
//! lowercase strings. The host action is `"opened_other"` or `"opened_mine"`;
//! the door it opened is carried in `opened_door`.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::game::{Decision, DoorId, GameTranscript, GuestStrategy, HostAction, Mood, Outcome, ShowmasterStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum HostActionKind {
    OpenedOther,
    OpenedMine,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TranscriptRecord {
    seed: u64,
    showmaster: ShowmasterStrategy,
    guest: GuestStrategy,
    car_door: DoorId,
    initial_pick: DoorId,
    sampled_mood: Mood,
    signaled_intent: Decision,
    host_action: HostActionKind,
    opened_door: DoorId,
    final_decision: Option<Decision>,
    outcome: Outcome,
}

impl From<&GameTranscript> for TranscriptRecord {
    fn from(t: &GameTranscript) -> Self {
        TranscriptRecord {
            seed: t.seed,
            showmaster: t.showmaster.clone(),
            guest: t.guest.clone(),
            car_door: t.car_door,
            initial_pick: t.initial_pick,
            sampled_mood: t.sampled_mood,
            signaled_intent: t.signaled_intent,
            host_action: match t.host_action {
                HostAction::OpenedOtherDoor(_) => HostActionKind::OpenedOther,
                HostAction::OpenedGuestDoor => HostActionKind::OpenedMine,
            },
            opened_door: t.opened_door(),
            final_decision: t.final_decision,
            outcome: t.outcome,
        }
    }
}

impl TryFrom<TranscriptRecord> for GameTranscript {
    type Error = String;

    fn try_from(r: TranscriptRecord) -> Result<Self, String> {
        let host_action = match r.host_action {
            HostActionKind::OpenedOther => HostAction::OpenedOtherDoor(r.opened_door),
            HostActionKind::OpenedMine if r.opened_door == r.initial_pick => HostAction::OpenedGuestDoor,
            HostActionKind::OpenedMine => {
                return Err(format!("opened_mine names door {} but the pick was {}", r.opened_door, r.initial_pick))
            }
        };
        Ok(GameTranscript {
            seed: r.seed,
            showmaster: r.showmaster,
            guest: r.guest,
            car_door: r.car_door,
            initial_pick: r.initial_pick,
            sampled_mood: r.sampled_mood,
            signaled_intent: r.signaled_intent,
            host_action,
            final_decision: r.final_decision,
            outcome: r.outcome,
        })
    }
}

pub fn to_json_line(transcript: &GameTranscript) -> String {
    serde_json::to_string(&TranscriptRecord::from(transcript)).expect("transcript serializes")
}

pub fn from_json_line(line: &str) -> Result<GameTranscript, String> {
    let record: TranscriptRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    GameTranscript::try_from(record)
}

pub fn write_jsonl<'a, W, I>(mut out: W, transcripts: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a GameTranscript>,
{
    for t in transcripts {
        writeln!(out, "{}", to_json_line(t))?;
    }
    Ok(())
}

/// Reads a JSONL archive, skipping blank lines.
pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Vec<GameTranscript>> {
    let mut transcripts = Vec::new();
    for (index, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t = from_json_line(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", index + 1)))?;
        transcripts.push(t);
    }
    Ok(transcripts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::play_game;
    use crate::probability::prob;
    use proptest::prelude::*;

    #[test]
    fn field_names_and_lowercase_enums() {
        let t = play_game(&ShowmasterStrategy::Evil, &GuestStrategy::Stay, 11);
        let value: serde_json::Value = serde_json::from_str(&to_json_line(&t)).unwrap();
        for field in [
            "seed",
            "showmaster",
            "guest",
            "car_door",
            "initial_pick",
            "sampled_mood",
            "signaled_intent",
            "host_action",
            "final_decision",
            "outcome",
        ] {
            assert!(value.get(field).is_some(), "missing {field}");
        }
        assert_eq!(value["sampled_mood"], "evil");
        assert_eq!(value["showmaster"]["kind"], "evil");
        assert_eq!(value["signaled_intent"], "stay");
        assert!(value["car_door"].as_u64().unwrap() >= 1);
        let action = value["host_action"].as_str().unwrap();
        assert!(action == "opened_other" || action == "opened_mine");
    }

    #[test]
    fn rejects_inconsistent_opened_mine() {
        let t = play_game(&ShowmasterStrategy::Evil, &GuestStrategy::Switch, 0);
        let mut value: serde_json::Value = serde_json::from_str(&to_json_line(&t)).unwrap();
        value["host_action"] = "opened_mine".into();
        let pick = value["initial_pick"].as_u64().unwrap();
        value["opened_door"] = (pick % 3 + 1).into();
        assert!(from_json_line(&value.to_string()).is_err());
    }

    proptest! {
        #[test]
        fn json_lines_round_trip(seed: u64, p in 0u64..=12, q in 0u64..=12) {
            let host = ShowmasterStrategy::Moody { p: prob(p, 12) };
            let guest = GuestStrategy::Mixed { q: prob(q, 12) };
            let t = play_game(&host, &guest, seed);
            prop_assert_eq!(from_json_line(&to_json_line(&t)).unwrap(), t);
        }
    }
}
