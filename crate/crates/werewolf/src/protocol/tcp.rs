//! Newline-delimited JSON over TCP: one connection per agent per game.
//!
//! The server side wraps each accepted connection in a [`TcpAgentHandle`],
//! which implements [`Agent`] so [`run_game`](super::run_game) drives
//! remote players exactly like in-process ones. The client side is the
//! mirror image: [`run_client`] reads server messages off a socket and
//! dispatches them to any local [`Agent`] implementation.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use crate::game::{AgentId, Side, Species};

use super::messages::{ClientMessage, ServerMessage, StatusMessage};
use super::server::{Agent, AgentError, TalkResponse};
use super::talk::TalkEntry;

/// Server-side view of one connected agent.
pub struct TcpAgentHandle {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    label: String,
}

impl TcpAgentHandle {
    pub fn new(
        stream: TcpStream,
        timeout_ms: u64,
        label: impl Into<String>,
    ) -> std::io::Result<Self> {
        stream.set_read_timeout(Some(Duration::from_millis(timeout_ms)))?;
        stream.set_nodelay(true)?;
        let writer = stream.try_clone()?;
        Ok(TcpAgentHandle {
            reader: BufReader::new(stream),
            writer,
            label: label.into(),
        })
    }

    fn send(&mut self, msg: &ServerMessage) -> Result<(), AgentError> {
        let mut line =
            serde_json::to_string(msg).map_err(|e| AgentError::Crashed(format!("encode: {e}")))?;
        line.push('\n');
        self.writer
            .write_all(line.as_bytes())
            .map_err(|e| AgentError::Crashed(format!("send: {e}")))
    }

    fn recv(&mut self) -> Result<ClientMessage, AgentError> {
        let mut line = String::new();
        let n = self.reader.read_line(&mut line).map_err(|e| {
            if matches!(
                e.kind(),
                std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
            ) {
                AgentError::Timeout
            } else {
                AgentError::Crashed(format!("recv: {e}"))
            }
        })?;
        if n == 0 {
            return Err(AgentError::Crashed("connection closed".into()));
        }
        serde_json::from_str(line.trim_end())
            .map_err(|e| AgentError::Crashed(format!("bad reply {line:?}: {e}")))
    }

    fn request_target(&mut self, msg: &ServerMessage) -> Result<AgentId, AgentError> {
        self.send(msg)?;
        match self.recv()? {
            ClientMessage::Vote { target } => Ok(target),
            other => Err(AgentError::Crashed(format!(
                "expected vote reply, got {other:?}"
            ))),
        }
    }
}

impl Agent for TcpAgentHandle {
    fn policy_name(&self) -> String {
        self.label.clone()
    }

    fn on_status(&mut self, status: &StatusMessage) -> Result<(), AgentError> {
        self.send(&ServerMessage::Status(status.clone()))
    }

    fn on_talk(&mut self, entry: &TalkEntry) -> Result<(), AgentError> {
        self.send(&ServerMessage::Talk {
            day: entry.day,
            turn: entry.turn,
            speaker: entry.speaker,
            text: entry.text.clone(),
            tag: entry.tag,
        })
    }

    fn talk(&mut self, day: u32, round: u32, turn: u32) -> Result<TalkResponse, AgentError> {
        self.send(&ServerMessage::TalkRequest { day, round, turn })?;
        match self.recv()? {
            ClientMessage::Talk { text, tag } => Ok(TalkResponse { text, tag }),
            other => Err(AgentError::Crashed(format!(
                "expected talk reply, got {other:?}"
            ))),
        }
    }

    fn vote(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        self.request_target(&ServerMessage::VoteRequest {
            day,
            candidates: candidates.to_vec(),
        })
    }

    fn divine(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        self.request_target(&ServerMessage::DivineRequest {
            day,
            candidates: candidates.to_vec(),
        })
    }

    fn on_divine_result(
        &mut self,
        day: u32,
        target: AgentId,
        species: Species,
    ) -> Result<(), AgentError> {
        self.send(&ServerMessage::DivineResult {
            day,
            target,
            species,
        })
    }

    fn attack(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        self.request_target(&ServerMessage::AttackRequest {
            day,
            candidates: candidates.to_vec(),
        })
    }

    fn on_finish(&mut self, day: u32, winner: Side) -> Result<(), AgentError> {
        self.send(&ServerMessage::Finish { day, winner })
    }
}

/// Accepts exactly five connections; seats are assigned in connection
/// order, `Agent[01]` first.
pub fn accept_agents(
    listener: &TcpListener,
    timeout_ms: u64,
) -> std::io::Result<Vec<TcpAgentHandle>> {
    let mut handles = Vec::with_capacity(AgentId::COUNT);
    for i in 0..AgentId::COUNT {
        let (stream, _addr) = listener.accept()?;
        handles.push(TcpAgentHandle::new(
            stream,
            timeout_ms,
            format!("remote-{}", i + 1),
        )?);
    }
    Ok(handles)
}

/// Client side: connects a local [`Agent`] implementation to a remote
/// game server. Blocks until the server sends `finish` or disconnects.
pub fn run_client(stream: TcpStream, agent: &mut dyn Agent) -> std::io::Result<()> {
    stream.set_nodelay(true)?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let msg: ServerMessage = match serde_json::from_str(line.trim_end()) {
            Ok(msg) => msg,
            Err(_) => continue,
        };
        let reply = match msg {
            ServerMessage::Status(status) => {
                let _ = agent.on_status(&status);
                None
            }
            ServerMessage::Talk {
                day,
                turn,
                speaker,
                text,
                tag,
            } => {
                let _ = agent.on_talk(&TalkEntry::new(day, turn, speaker, text, tag));
                None
            }
            ServerMessage::TalkRequest { day, round, turn } => {
                let response = agent
                    .talk(day, round, turn)
                    .unwrap_or_else(|_| TalkResponse::skip());
                Some(ClientMessage::Talk {
                    text: response.text,
                    tag: response.tag,
                })
            }
            ServerMessage::VoteRequest { day, candidates } => {
                let target = agent.vote(day, &candidates).unwrap_or(candidates[0]);
                Some(ClientMessage::Vote { target })
            }
            ServerMessage::DivineRequest { day, candidates } => {
                let target = agent.divine(day, &candidates).unwrap_or(candidates[0]);
                Some(ClientMessage::Vote { target })
            }
            ServerMessage::DivineResult {
                day,
                target,
                species,
            } => {
                let _ = agent.on_divine_result(day, target, species);
                None
            }
            ServerMessage::AttackRequest { day, candidates } => {
                let target = agent.attack(day, &candidates).unwrap_or(candidates[0]);
                Some(ClientMessage::Vote { target })
            }
            ServerMessage::Finish { day, winner } => {
                let _ = agent.on_finish(day, winner);
                return Ok(());
            }
        };
        if let Some(reply) = reply {
            let mut out = serde_json::to_string(&reply).expect("replies serialize");
            out.push('\n');
            writer.write_all(out.as_bytes())?;
        }
    }
}
