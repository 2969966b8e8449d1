//! A laboratory for the Monty Hall game played against real showmasters.
//!
//! The host may be fair, evil, moody (evil with probability `p`) or a mind
//! reader; the guest may stay, switch, mix, or act. The crate provides
//!
//! * [`game`]: a seeded engine playing one game and recording a transcript,
//! * [`analytics`]: closed-form payoffs and posteriors in exact arithmetic,
//! * [`oracle`]: brute-force enumeration of the full outcome tree,
//! * [`simulation`]: Monte Carlo batches compared against the exact values,
//! * [`belief`]: a guest-side Bayesian tracker and an estimator of `p`,
//! * [`session`]: interactive game sessions with an adaptive mind reader,
//!   served over HTTP by [`http`] when the `server` feature is on.

pub mod analytics;
pub mod archive;
pub mod belief;
pub mod error;
pub mod game;
pub mod oracle;
pub mod probability;
pub mod session;
pub mod simulation;

#[cfg(feature = "server")]
pub mod cli;
#[cfg(feature = "server")]
pub mod http;

pub use error::{Error, Result};
pub use game::{
    actor_game, host_act, play_game, resolve_mind_reader, Decision, DoorId, GameTranscript, GuestStrategy, HostAction,
    Mood, Outcome, Phase, ShowmasterStrategy,
};
pub use probability::Probability;
