//! Wire protocol and game server.
//!
//! One message per line, JSON-encoded. The server drives five [`Agent`]s
//! through a game: status messages before each phase, round-robin talk
//! turns, vote/divine/attack requests at the right moments, and a finish
//! notice. The same trait serves in-process policies and remote TCP
//! clients, so tournaments stay hermetic while the network surface stays
//! real.

mod log;
mod messages;
mod server;
mod talk;
pub mod tcp;

pub use log::{GameLog, LogRecord};
pub use messages::{encode_status, ClientMessage, ServerMessage, StatusMessage};
pub use server::{
    run_game, run_talk_phase, Agent, AgentError, GameConfig, GameOutcome, ServerError,
    TalkResponse, DEFAULT_AGENT_TIMEOUT_MS, DEFAULT_MAX_ROUNDS,
};
pub use talk::{parse_talk, render_history, TalkEntry, TalkTag, OVER_TOKEN, SKIP_TOKEN};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("line has no `Agent[0k]: ` speaker prefix: {0:?}")]
    MalformedLine(String),
    #[error("agent index out of range in {0:?}")]
    BadAgentIndex(String),
    #[error("unknown agent {0}")]
    UnknownAgent(u8),
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
