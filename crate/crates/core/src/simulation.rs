//! Seeded Monte Carlo batches over the game engine.
//!
//! Replication `i` of a batch with master seed `m` plays the game seeded
//! with the `(i + 1)`-th output of a SplitMix64 generator started at `m`.
//! Counts are merged by addition, so the report does not depend on how the
//! replications are split across threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{play_game, Decision, GuestStrategy, HostAction, Mood, Outcome, ShowmasterStrategy};
use crate::oracle;
use crate::probability::Probability;

/// Monte Carlo comparisons fail beyond this many standard errors.
pub const Z_THRESHOLD: f64 = 5.0;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const CELL_SALT: u64 = 0xC3A5_C85C_97CB_3127;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `master_seed`.
pub fn replication_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Master seed of sweep cell `index`.
pub fn cell_seed(master_seed: u64, index: u64) -> u64 {
    replication_seed(master_seed ^ CELL_SALT, index)
}

/// Event labels tallied in every report.
pub const EVENTS: [&str; 7] = ["win", "opened_mine", "opened_other", "stay", "switch", "mood_evil", "mood_fair"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts([u64; 7]);

impl Counts {
    fn record(mut self, showmaster: &ShowmasterStrategy, guest: &GuestStrategy, seed: u64) -> Self {
        let t = play_game(showmaster, guest, seed);
        let flags = [
            t.outcome == Outcome::Win,
            t.host_action == HostAction::OpenedGuestDoor,
            matches!(t.host_action, HostAction::OpenedOtherDoor(_)),
            t.final_decision == Some(Decision::Stay),
            t.final_decision == Some(Decision::Switch),
            t.sampled_mood == Mood::Evil,
            t.sampled_mood == Mood::Fair,
        ];
        for (count, flag) in self.0.iter_mut().zip(flags) {
            *count += flag as u64;
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

/// Standard score of `successes / n` against `exact`, using the empirical
/// standard error. A zero standard error scores 0 on an exact match and
/// infinity otherwise.
pub fn z_score(successes: u64, n: u64, exact: f64) -> f64 {
    let rate = successes as f64 / n as f64;
    let se = (rate * (1.0 - rate) / n as f64).sqrt();
    let diff = rate - exact;
    if se > 0.0 {
        diff / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub showmaster: ShowmasterStrategy,
    pub guest: GuestStrategy,
    pub master_seed: u64,
    pub replications: u64,
    pub wins: u64,
    pub win_rate: f64,
    pub std_error: f64,
    pub exact_value: Probability,
    pub z_score: f64,
    pub event_counts: BTreeMap<String, u64>,
}

impl SimulationReport {
    pub fn event_count(&self, label: &str) -> u64 {
        self.event_counts.get(label).copied().unwrap_or(0)
    }

    pub fn event_frequency(&self, label: &str) -> f64 {
        self.event_count(label) as f64 / self.replications as f64
    }

    /// z-score of an event frequency against an exact probability.
    pub fn event_z(&self, label: &str, exact: &Probability) -> f64 {
        z_score(self.event_count(label), self.replications, exact.to_f64())
    }

    pub fn within(&self, threshold: f64) -> bool {
        self.z_score.abs() < threshold
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn check_strategies(showmaster: &ShowmasterStrategy, guest: &GuestStrategy) -> Result<()> {
    // Probabilities are validated on construction; re-check in case a value
    // was built from an unchecked ratio.
    let params = [
        match showmaster {
            ShowmasterStrategy::Moody { p } => Some(p),
            ShowmasterStrategy::MindReader { accuracy } => Some(accuracy),
            _ => None,
        },
        match guest {
            GuestStrategy::Mixed { q } => Some(q),
            GuestStrategy::Actor { detection_risk } => Some(detection_risk),
            _ => None,
        },
    ];
    for p in params.into_iter().flatten() {
        if Probability::from_ratio(p.ratio().clone()).is_err() {
            return Err(Error::InvalidParameter(format!("probability {p} out of range")));
        }
    }
    Ok(())
}

/// Plays `replications` games and compares the win rate with the exact
/// value from the oracle.
pub fn run_batch(
    showmaster: &ShowmasterStrategy,
    guest: &GuestStrategy,
    replications: u64,
    master_seed: u64,
) -> Result<SimulationReport> {
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be at least 1".into()));
    }
    check_strategies(showmaster, guest)?;
    let counts = (0..replications)
        .into_par_iter()
        .fold(Counts::default, |acc, i| acc.record(showmaster, guest, replication_seed(master_seed, i)))
        .reduce(Counts::default, Counts::merge);
    Ok(report_from_counts(showmaster, guest, replications, master_seed, counts))
}

/// Single-threaded variant of [`run_batch`]; yields the same report.
pub fn run_batch_serial(
    showmaster: &ShowmasterStrategy,
    guest: &GuestStrategy,
    replications: u64,
    master_seed: u64,
) -> Result<SimulationReport> {
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be at least 1".into()));
    }
    check_strategies(showmaster, guest)?;
    let counts = (0..replications)
        .fold(Counts::default(), |acc, i| acc.record(showmaster, guest, replication_seed(master_seed, i)));
    Ok(report_from_counts(showmaster, guest, replications, master_seed, counts))
}

fn report_from_counts(
    showmaster: &ShowmasterStrategy,
    guest: &GuestStrategy,
    replications: u64,
    master_seed: u64,
    counts: Counts,
) -> SimulationReport {
    let exact_value = oracle::win_probability(&oracle::enumerate(showmaster, guest));
    let wins = counts.0[0];
    let win_rate = wins as f64 / replications as f64;
    let std_error = (win_rate * (1.0 - win_rate) / replications as f64).sqrt();
    SimulationReport {
        showmaster: showmaster.clone(),
        guest: guest.clone(),
        master_seed,
        replications,
        wins,
        win_rate,
        std_error,
        z_score: z_score(wins, replications, exact_value.to_f64()),
        exact_value,
        event_counts: EVENTS.iter().map(|e| e.to_string()).zip(counts.0).collect(),
    }
}

/// One configuration of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCell {
    pub showmaster: ShowmasterStrategy,
    pub guest: GuestStrategy,
}

/// Moody hosts over `ps` crossed with mixed guests over `qs`.
pub fn moody_mixed_grid(ps: &[Probability], qs: &[Probability]) -> Vec<SweepCell> {
    ps.iter()
        .flat_map(|p| {
            qs.iter().map(move |q| SweepCell {
                showmaster: ShowmasterStrategy::Moody { p: p.clone() },
                guest: GuestStrategy::Mixed { q: q.clone() },
            })
        })
        .collect()
}

/// Moody hosts over `ps` against one fixed guest.
pub fn moody_grid(ps: &[Probability], guest: &GuestStrategy) -> Vec<SweepCell> {
    ps.iter()
        .map(|p| SweepCell { showmaster: ShowmasterStrategy::Moody { p: p.clone() }, guest: guest.clone() })
        .collect()
}

/// A mind reader of fixed accuracy against mixed guests over `qs`.
pub fn mind_reader_grid(accuracy: &Probability, qs: &[Probability]) -> Vec<SweepCell> {
    qs.iter()
        .map(|q| SweepCell {
            showmaster: ShowmasterStrategy::MindReader { accuracy: accuracy.clone() },
            guest: GuestStrategy::Mixed { q: q.clone() },
        })
        .collect()
}

/// One report per cell. Cell `i` runs with master seed
/// [`cell_seed`]`(master_seed, i)`, so any cell can be rerun on its own
/// through [`run_batch`] with the seed recorded in its report.
pub fn sweep(cells: &[SweepCell], replications: u64, master_seed: u64) -> Result<Vec<SimulationReport>> {
    cells
        .iter()
        .enumerate()
        .map(|(i, cell)| run_batch(&cell.showmaster, &cell.guest, replications, cell_seed(master_seed, i as u64)))
        .collect()
}

/// Aligned text table of reports.
pub fn format_reports(reports: &[SimulationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28} {:<28} {:>10} {:>10} {:>9} {:>9} {:>12} {:>8}",
        "showmaster", "guest", "n", "wins", "win_rate", "std_err", "exact", "z"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<28} {:<28} {:>10} {:>10} {:>9.6} {:>9.6} {:>12} {:>8.3}",
            r.showmaster.to_string(),
            r.guest.to_string(),
            r.replications,
            r.wins,
            r.win_rate,
            r.std_error,
            format!("{} ", r.exact_value) + &r.exact_value.to_decimal_string(),
            r.z_score
        );
    }
    out
}
