//! Five-player werewolf: game engine, wire protocol, talk analysis, and a
//! hybrid rule-based/LLM agent stack with a tournament harness.
//!
//! The crate is organized around the flow of one game:
//!
//! - [`game`] — authoritative rules engine: roles, phases, divination,
//!   votes, attacks, win detection.
//! - [`protocol`] — per-agent status messages, the talk-turn scheduler,
//!   newline-delimited JSON wire format (TCP and in-process), and game logs.
//! - [`analysis`] — extraction of vote intents and divination claims from
//!   conversation history (deterministic patterns, optional LLM backend).
//! - [`rules`] — situation detection and the decision layer that picks
//!   between an LLM candidate utterance, a template, or closing the talk.
//! - [`utterance`] — template catalog, generation prompts, and persona
//!   style transformation.
//! - [`gateway`] — text-completion abstraction: OpenAI-compatible HTTP
//!   client plus a deterministic mock for tests and tournaments.
//! - [`agents`] — ready-made agent policies (hybrid, llm-only,
//!   template-only, scripted).
//! - [`arena`] — seeded batch tournaments, statistics, log replay, and the
//!   consistency checker.
//!
//! See the `examples/` directory for a runnable tour of each capability,
//! and the `arena` binary for the command-line interface.

pub mod agents;
pub mod analysis;
pub mod arena;
pub mod game;
pub mod gateway;
pub mod protocol;
pub mod rules;
mod util;
pub mod utterance;

pub use game::{AgentId, GameState, Phase, Role, Side, Species};
pub use protocol::{StatusMessage, TalkEntry, TalkTag};
