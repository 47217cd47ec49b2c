//! Wire message types: one JSON object per line.

use serde::{Deserialize, Serialize};

use crate::game::{AgentId, GameState, PhaseKind, Role, Side, Species};

use super::talk::TalkTag;
use super::ProtocolError;

/// Per-agent game status. Carries the recipient's own role and nothing
/// about anyone else's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusMessage {
    pub id: AgentId,
    pub role: Role,
    pub alive: Vec<AgentId>,
    pub dead: Vec<AgentId>,
    pub day: u32,
    pub phase: PhaseKind,
}

impl StatusMessage {
    /// The key/value block used in prompts:
    ///
    /// ```text
    /// ID: Agent[02]
    /// Role: Seer
    /// Alive: Agent[02], Agent[03], Agent[05]
    /// Dead: Agent[01], Agent[04]
    /// ```
    pub fn render(&self) -> String {
        let join = |ids: &[AgentId]| {
            ids.iter()
                .map(AgentId::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "ID: {}\nRole: {}\nAlive: {}\nDead: {}",
            self.id,
            self.role,
            join(&self.alive),
            join(&self.dead)
        )
    }
}

/// Builds the status message for one recipient. Never leaks another
/// agent's role.
pub fn encode_status(
    state: &GameState,
    recipient: AgentId,
) -> Result<StatusMessage, ProtocolError> {
    // AgentId can only hold 1..=5, so the lookup cannot fail; the check is
    // for callers that construct ids from raw wire input.
    if !state.roles().contains_key(&recipient) {
        return Err(ProtocolError::UnknownAgent(recipient.index()));
    }
    Ok(StatusMessage {
        id: recipient,
        role: state.role_of(recipient),
        alive: state.alive().iter().copied().collect(),
        dead: state.dead().iter().copied().collect(),
        day: state.day(),
        phase: state.phase().into(),
    })
}

/// Server-to-agent messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Status(StatusMessage),
    TalkRequest {
        day: u32,
        round: u32,
        turn: u32,
    },
    /// Broadcast of an accepted utterance, same `talk` type the speaker
    /// sent it with.
    Talk {
        day: u32,
        turn: u32,
        speaker: AgentId,
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<TalkTag>,
    },
    VoteRequest {
        day: u32,
        candidates: Vec<AgentId>,
    },
    DivineRequest {
        day: u32,
        candidates: Vec<AgentId>,
    },
    DivineResult {
        day: u32,
        target: AgentId,
        species: Species,
    },
    AttackRequest {
        day: u32,
        candidates: Vec<AgentId>,
    },
    Finish {
        day: u32,
        winner: Side,
    },
}

/// Agent-to-server messages. Every target choice (vote, divination,
/// attack) answers with the same `vote` shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Talk {
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<TalkTag>,
    },
    Vote {
        target: AgentId,
    },
}
