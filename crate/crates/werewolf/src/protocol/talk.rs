//! Talk entries, the mention prefix, and the `Agent[0k]: {say}` line format.

use serde::{Deserialize, Serialize};

use crate::game::{AgentId, Role, Species};

use super::ProtocolError;

/// Reserved token marking a passed turn.
pub const SKIP_TOKEN: &str = "Skip";
/// Accepted alias meaning the agent is done talking for the day.
pub const OVER_TOKEN: &str = "Over";

/// Machine-readable meaning attached to an utterance in the log record.
/// Template utterances carry one, so the pattern analyzer is exact on
/// self-generated talk; free text from external agents has none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TalkTag {
    Greeting,
    VoteDeclaration { target: AgentId },
    DivinationClaim { target: AgentId, species: Species },
    AskVote { target: AgentId },
    RoleClaim { role: Role },
    AccuseFake { rival: AgentId },
    DivinedHumanDefense { by: AgentId },
    Closing,
    Generic,
}

/// One utterance in a game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TalkEntry {
    pub day: u32,
    /// 1-based position within the day, skips included.
    pub turn: u32,
    pub speaker: AgentId,
    pub text: String,
    /// Set iff the text begins with a well-formed `>>Agent[0k]` prefix.
    pub mention: Option<AgentId>,
    /// True iff the text is exactly the reserved skip token.
    pub skipped: bool,
    pub tag: Option<TalkTag>,
}

impl TalkEntry {
    pub fn new(
        day: u32,
        turn: u32,
        speaker: AgentId,
        text: impl Into<String>,
        tag: Option<TalkTag>,
    ) -> Self {
        let text = text.into();
        let mention = parse_mention(&text);
        let skipped = text == SKIP_TOKEN;
        TalkEntry {
            day,
            turn,
            speaker,
            text,
            mention,
            skipped,
            tag,
        }
    }

    /// Skip or the end-of-day alias; either way the turn was passed.
    pub fn is_pass(&self) -> bool {
        self.skipped || self.text == OVER_TOKEN
    }

    pub fn is_over(&self) -> bool {
        self.text == OVER_TOKEN
    }

    /// The `Agent[0k]: {say}` line form.
    pub fn render_line(&self) -> String {
        format!("{}: {}", self.speaker, self.text)
    }
}

/// Extracts the mention target from a `>>Agent[0k]` prefix. Text that does
/// not begin with a well-formed prefix (including out-of-range indexes)
/// mentions nobody.
pub fn parse_mention(text: &str) -> Option<AgentId> {
    let rest = text.strip_prefix(">>Agent[")?;
    let digits = rest.get(..2)?;
    if !rest[2..].starts_with(']') {
        return None;
    }
    let index: u8 = digits.parse().ok()?;
    AgentId::new(index).ok()
}

/// Parses one `Agent[{number}]: {say}` line. The caller owns day/turn
/// placement; both are zero on the returned entry.
pub fn parse_talk(line: &str) -> Result<TalkEntry, ProtocolError> {
    let rest = line
        .strip_prefix("Agent[")
        .ok_or_else(|| ProtocolError::MalformedLine(line.to_string()))?;
    let close = rest
        .find(']')
        .ok_or_else(|| ProtocolError::MalformedLine(line.to_string()))?;
    let digits = &rest[..close];
    if digits.len() != 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ProtocolError::MalformedLine(line.to_string()));
    }
    let index: u8 = digits
        .parse()
        .map_err(|_| ProtocolError::MalformedLine(line.to_string()))?;
    let speaker =
        AgentId::new(index).map_err(|_| ProtocolError::BadAgentIndex(line.to_string()))?;
    let body = rest[close + 1..]
        .strip_prefix(": ")
        .ok_or_else(|| ProtocolError::MalformedLine(line.to_string()))?;
    Ok(TalkEntry::new(0, 0, speaker, body, None))
}

/// Serializes history as `Agent[{number}]: {say}` lines, oldest first.
pub fn render_history(history: &[TalkEntry]) -> String {
    history
        .iter()
        .map(TalkEntry::render_line)
        .collect::<Vec<_>>()
        .join("\n")
}
