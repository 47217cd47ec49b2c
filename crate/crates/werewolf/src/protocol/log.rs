//! Game logs: one JSON record per line, status snapshots interleaved with
//! talks, ballots, night actions, and the finish record.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::game::{AgentId, PhaseKind, Role, Side, Species};

use super::talk::{TalkEntry, TalkTag};
use super::ProtocolError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogRecord {
    /// Header: seed and the full role assignment.
    Game {
        seed: u64,
        roles: BTreeMap<AgentId, Role>,
    },
    Status {
        day: u32,
        phase: PhaseKind,
        alive: Vec<AgentId>,
        dead: Vec<AgentId>,
    },
    Talk {
        day: u32,
        turn: u32,
        speaker: AgentId,
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<TalkTag>,
    },
    Divine {
        day: u32,
        seer: AgentId,
        target: AgentId,
        species: Species,
    },
    /// A recorded ballot, as opposed to a vote intent declared in talk.
    Vote {
        day: u32,
        voter: AgentId,
        target: AgentId,
    },
    Exile {
        day: u32,
        target: AgentId,
    },
    Attack {
        day: u32,
        target: AgentId,
    },
    Finish {
        day: u32,
        winner: Side,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forfeit: Option<AgentId>,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GameLog {
    records: Vec<LogRecord>,
}

impl GameLog {
    pub fn new() -> Self {
        GameLog::default()
    }

    pub fn push(&mut self, record: LogRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    /// All utterances, with mention/skip state re-derived from the text.
    pub fn talks(&self) -> Vec<TalkEntry> {
        self.records
            .iter()
            .filter_map(|r| match r {
                LogRecord::Talk {
                    day,
                    turn,
                    speaker,
                    text,
                    tag,
                } => Some(TalkEntry::new(*day, *turn, *speaker, text.clone(), *tag)),
                _ => None,
            })
            .collect()
    }

    pub fn ballots(&self) -> Vec<(u32, AgentId, AgentId)> {
        self.records
            .iter()
            .filter_map(|r| match r {
                LogRecord::Vote { day, voter, target } => Some((*day, *voter, *target)),
                _ => None,
            })
            .collect()
    }

    pub fn header(&self) -> Option<(u64, &BTreeMap<AgentId, Role>)> {
        self.records.iter().find_map(|r| match r {
            LogRecord::Game { seed, roles } => Some((*seed, roles)),
            _ => None,
        })
    }

    pub fn finish(&self) -> Option<(u32, Side, Option<AgentId>)> {
        self.records.iter().find_map(|r| match r {
            LogRecord::Finish {
                day,
                winner,
                forfeit,
            } => Some((*day, *winner, *forfeit)),
            _ => None,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("log records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, ProtocolError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: LogRecord = serde_json::from_str(line)
                .map_err(|e| ProtocolError::MalformedLog(format!("line {}: {e}", i + 1)))?;
            records.push(record);
        }
        Ok(GameLog { records })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), ProtocolError> {
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, ProtocolError> {
        let text = std::fs::read_to_string(path)?;
        GameLog::from_jsonl(&text)
    }
}
