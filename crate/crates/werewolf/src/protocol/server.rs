//! The game loop: talk-turn scheduling, vote collection, night actions.
//!
//! The server owns one [`GameState`] per game and serializes all mutation
//! through the loop. Agents are queried one at a time in id order, so a
//! fixed seed and deterministic agents reproduce a game exactly.

use thiserror::Error;

use crate::game::{AgentId, GameError, GameState, Phase, RoleAssignment, Side, Species};

use super::log::{GameLog, LogRecord};
use super::messages::{encode_status, StatusMessage};
use super::talk::{TalkEntry, TalkTag, SKIP_TOKEN};

pub const DEFAULT_MAX_ROUNDS: u32 = 10;
pub const DEFAULT_AGENT_TIMEOUT_MS: u64 = 30_000;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("agent did not respond within the deadline")]
    Timeout,
    #[error("agent failed: {0}")]
    Crashed(String),
}

/// One utterance from an agent: the text plus the machine-readable tag of
/// a template, if one produced it.
#[derive(Debug, Clone)]
pub struct TalkResponse {
    pub text: String,
    pub tag: Option<TalkTag>,
}

impl TalkResponse {
    pub fn skip() -> Self {
        TalkResponse {
            text: SKIP_TOKEN.to_string(),
            tag: None,
        }
    }
}

/// A player seat driven by the server. Implemented by in-process policies
/// and by the TCP adapters on both ends of a connection.
pub trait Agent: Send {
    /// Label used for per-policy tournament statistics.
    fn policy_name(&self) -> String;

    fn on_status(&mut self, status: &StatusMessage) -> Result<(), AgentError>;

    /// Broadcast of every accepted utterance, the speaker's own included.
    fn on_talk(&mut self, entry: &TalkEntry) -> Result<(), AgentError>;

    fn talk(&mut self, day: u32, round: u32, turn: u32) -> Result<TalkResponse, AgentError>;

    fn vote(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError>;

    fn divine(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError>;

    fn on_divine_result(
        &mut self,
        day: u32,
        target: AgentId,
        species: Species,
    ) -> Result<(), AgentError>;

    fn attack(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError>;

    fn on_finish(&mut self, day: u32, winner: Side) -> Result<(), AgentError>;
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    /// Talk rounds per day before the phase is cut off.
    pub max_rounds: u32,
    /// Per-response deadline applied by remote transports.
    pub agent_timeout_ms: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            max_rounds: DEFAULT_MAX_ROUNDS,
            agent_timeout_ms: DEFAULT_AGENT_TIMEOUT_MS,
        }
    }
}

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("agent {agent} failed: {source}")]
    Agent { agent: AgentId, source: AgentError },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("expected exactly five agents, got {0}")]
    WrongRosterSize(usize),
}

/// Result of one complete game. A crashed agent forfeits the game to the
/// opposing side rather than erroring the batch.
#[derive(Debug)]
pub struct GameOutcome {
    pub winner: Side,
    pub days: u32,
    pub forfeit: Option<AgentId>,
    pub log: GameLog,
}

fn agent_at(agents: &mut [Box<dyn Agent>], id: AgentId) -> &mut Box<dyn Agent> {
    &mut agents[id.index() as usize - 1]
}

fn fail(agent: AgentId, source: AgentError) -> ServerError {
    ServerError::Agent { agent, source }
}

/// Utterances are single lines on the wire; collapse anything else.
fn sanitize(text: &str) -> String {
    let cleaned: String = text
        .trim()
        .chars()
        .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
        .collect();
    if cleaned.is_empty() {
        SKIP_TOKEN.to_string()
    } else {
        cleaned
    }
}

/// Runs one day's talk: round-robin over living agents in id order until
/// everyone passes in the same round or `max_rounds` rounds elapse. The
/// entries are appended to the state history and the phase advances to
/// voting. Returns the new entries.
pub fn run_talk_phase(
    state: &mut GameState,
    agents: &mut [Box<dyn Agent>],
    max_rounds: u32,
) -> Result<Vec<TalkEntry>, ServerError> {
    let day = match state.phase() {
        Phase::DayTalk(d) => d,
        _ => return Err(ServerError::Game(GameError::WrongPhase)),
    };
    let mut produced = Vec::new();
    let mut turn = state.talks().iter().filter(|t| t.day == day).count() as u32;
    let alive: Vec<AgentId> = state.alive().iter().copied().collect();

    for round in 1..=max_rounds {
        let mut all_passed = true;
        for &speaker in &alive {
            turn += 1;
            let response = agent_at(agents, speaker)
                .talk(day, round, turn)
                .map_err(|e| fail(speaker, e))?;
            let entry = TalkEntry::new(day, turn, speaker, sanitize(&response.text), response.tag);
            if !entry.is_pass() {
                all_passed = false;
            }
            state.push_talk(entry.clone())?;
            for &listener in &alive {
                agent_at(agents, listener)
                    .on_talk(&entry)
                    .map_err(|e| fail(listener, e))?;
            }
            produced.push(entry);
        }
        if all_passed {
            break;
        }
    }
    state.end_talk()?;
    Ok(produced)
}

fn snapshot(state: &GameState) -> LogRecord {
    LogRecord::Status {
        day: state.day(),
        phase: state.phase().into(),
        alive: state.alive().iter().copied().collect(),
        dead: state.dead().iter().copied().collect(),
    }
}

fn send_statuses(state: &GameState, agents: &mut [Box<dyn Agent>]) -> Result<(), ServerError> {
    for &id in &state.alive().iter().copied().collect::<Vec<_>>() {
        let status = encode_status(state, id).expect("live agents are known");
        agent_at(agents, id)
            .on_status(&status)
            .map_err(|e| fail(id, e))?;
    }
    Ok(())
}

fn night_divination(
    state: &mut GameState,
    agents: &mut [Box<dyn Agent>],
    log: &mut GameLog,
) -> Result<(), ServerError> {
    let seer = state.seer();
    if !state.is_alive(seer) {
        return Ok(());
    }
    let day = state.day();
    let candidates: Vec<AgentId> = state
        .alive()
        .iter()
        .copied()
        .filter(|&id| id != seer)
        .collect();
    let target = agent_at(agents, seer)
        .divine(day, &candidates)
        .map_err(|e| fail(seer, e))?;
    let species = state
        .divine(seer, target)
        .map_err(|e| fail(seer, AgentError::Crashed(e.to_string())))?;
    log.push(LogRecord::Divine {
        day,
        seer,
        target,
        species,
    });
    agent_at(agents, seer)
        .on_divine_result(day, target, species)
        .map_err(|e| fail(seer, e))?;
    Ok(())
}

/// Plays one full game. Agent failures forfeit the game to the opposing
/// side instead of failing the call; only an invalid roster errors.
pub fn run_game(
    seed: u64,
    assignment: Option<RoleAssignment>,
    agents: &mut [Box<dyn Agent>],
    config: &GameConfig,
) -> Result<GameOutcome, ServerError> {
    if agents.len() != AgentId::COUNT {
        return Err(ServerError::WrongRosterSize(agents.len()));
    }
    let mut state = GameState::new(seed, assignment)?;
    let mut log = GameLog::new();
    log.push(LogRecord::Game {
        seed,
        roles: state.roles().clone(),
    });

    match drive(&mut state, agents, config, &mut log) {
        Ok(()) => {
            let winner = match state.phase() {
                Phase::Finished(side) => side,
                _ => unreachable!("drive only returns once the game finished"),
            };
            let days = last_day(&log);
            log.push(LogRecord::Finish {
                day: days,
                winner,
                forfeit: None,
            });
            notify_finish(agents, days, winner);
            Ok(GameOutcome {
                winner,
                days,
                forfeit: None,
                log,
            })
        }
        Err(ServerError::Agent { agent, .. }) => {
            // Forfeit: the crashing agent's side loses.
            let winner = match state.role_of(agent).side() {
                Side::VillageSide => Side::WolfSide,
                Side::WolfSide => Side::VillageSide,
            };
            let days = last_day(&log).max(state.day());
            log.push(LogRecord::Finish {
                day: days,
                winner,
                forfeit: Some(agent),
            });
            notify_finish(agents, days, winner);
            Ok(GameOutcome {
                winner,
                days,
                forfeit: Some(agent),
                log,
            })
        }
        Err(other) => Err(other),
    }
}

fn last_day(log: &GameLog) -> u32 {
    log.records()
        .iter()
        .filter_map(|r| match r {
            LogRecord::Exile { day, .. } | LogRecord::Talk { day, .. } => Some(*day),
            _ => None,
        })
        .max()
        .unwrap_or(1)
}

fn notify_finish(agents: &mut [Box<dyn Agent>], day: u32, winner: Side) {
    // Best effort; a dead TCP peer must not poison the result.
    for agent in agents.iter_mut() {
        let _ = agent.on_finish(day, winner);
    }
}

fn drive(
    state: &mut GameState,
    agents: &mut [Box<dyn Agent>],
    config: &GameConfig,
    log: &mut GameLog,
) -> Result<(), ServerError> {
    // Night zero: only the seer acts.
    log.push(snapshot(state));
    send_statuses(state, agents)?;
    night_divination(state, agents, log)?;
    state.end_night_zero()?;

    loop {
        // Day talk.
        log.push(snapshot(state));
        send_statuses(state, agents)?;
        let day = state.day();
        let entries = run_talk_phase(state, agents, config.max_rounds)?;
        for entry in &entries {
            log.push(LogRecord::Talk {
                day: entry.day,
                turn: entry.turn,
                speaker: entry.speaker,
                text: entry.text.clone(),
                tag: entry.tag,
            });
        }

        // Vote.
        let mut ballots = std::collections::BTreeMap::new();
        let alive: Vec<AgentId> = state.alive().iter().copied().collect();
        for &voter in &alive {
            let candidates: Vec<AgentId> =
                alive.iter().copied().filter(|&id| id != voter).collect();
            let target = agent_at(agents, voter)
                .vote(day, &candidates)
                .map_err(|e| fail(voter, e))?;
            ballots.insert(voter, target);
        }
        for (&voter, &target) in &ballots {
            log.push(LogRecord::Vote { day, voter, target });
        }
        let exiled = state.resolve_vote(&ballots).map_err(|e| match e {
            GameError::SelfVote(v) | GameError::MissingVote(v) | GameError::IllegalVoter(v) => {
                fail(v, AgentError::Crashed(e.to_string()))
            }
            GameError::VoteForDead { voter, .. } => fail(voter, AgentError::Crashed(e.to_string())),
            other => ServerError::Game(other),
        })?;
        log.push(LogRecord::Exile {
            day,
            target: exiled,
        });
        if matches!(state.phase(), Phase::Finished(_)) {
            return Ok(());
        }

        // Night: divination, then the attack.
        log.push(snapshot(state));
        send_statuses(state, agents)?;
        night_divination(state, agents, log)?;
        let wolf = state.werewolf();
        let candidates: Vec<AgentId> = state
            .alive()
            .iter()
            .copied()
            .filter(|&id| id != wolf)
            .collect();
        let target = agent_at(agents, wolf)
            .attack(day, &candidates)
            .map_err(|e| fail(wolf, e))?;
        state
            .resolve_attack(target)
            .map_err(|e| fail(wolf, AgentError::Crashed(e.to_string())))?;
        log.push(LogRecord::Attack { day, target });
        if matches!(state.phase(), Phase::Finished(_)) {
            return Ok(());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Role;
    use std::collections::BTreeMap;

    fn agent(i: u8) -> AgentId {
        AgentId::new(i).unwrap()
    }

    fn fixed_assignment() -> RoleAssignment {
        let mut map = BTreeMap::new();
        map.insert(agent(1), Role::Villager);
        map.insert(agent(2), Role::Seer);
        map.insert(agent(3), Role::Villager);
        map.insert(agent(4), Role::Possessed);
        map.insert(agent(5), Role::Werewolf);
        RoleAssignment::new(map).unwrap()
    }

    /// Talks from a fixed list, then skips; votes/divines/attacks the
    /// lowest-id candidate.
    struct Scripted {
        lines: Vec<String>,
        next: usize,
        offers: Vec<u32>,
    }

    impl Scripted {
        fn new(lines: &[&str]) -> Self {
            Scripted {
                lines: lines.iter().map(|s| s.to_string()).collect(),
                next: 0,
                offers: vec![],
            }
        }
    }

    impl Agent for Scripted {
        fn policy_name(&self) -> String {
            "scripted".into()
        }
        fn on_status(&mut self, _status: &StatusMessage) -> Result<(), AgentError> {
            Ok(())
        }
        fn on_talk(&mut self, _entry: &TalkEntry) -> Result<(), AgentError> {
            Ok(())
        }
        fn talk(&mut self, _day: u32, round: u32, _turn: u32) -> Result<TalkResponse, AgentError> {
            self.offers.push(round);
            let text = self
                .lines
                .get(self.next)
                .cloned()
                .unwrap_or_else(|| SKIP_TOKEN.into());
            self.next += 1;
            Ok(TalkResponse { text, tag: None })
        }
        fn vote(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
            Ok(candidates[0])
        }
        fn divine(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
            Ok(candidates[0])
        }
        fn on_divine_result(
            &mut self,
            _day: u32,
            _target: AgentId,
            _species: Species,
        ) -> Result<(), AgentError> {
            Ok(())
        }
        fn attack(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
            Ok(candidates[0])
        }
        fn on_finish(&mut self, _day: u32, _winner: Side) -> Result<(), AgentError> {
            Ok(())
        }
    }

    fn boxed(agents: Vec<Scripted>) -> Vec<Box<dyn Agent>> {
        agents
            .into_iter()
            .map(|a| Box::new(a) as Box<dyn Agent>)
            .collect()
    }

    fn talk_ready_state() -> GameState {
        let mut state = GameState::new(1, Some(fixed_assignment())).unwrap();
        state.divine(agent(2), agent(1)).unwrap();
        state.end_night_zero().unwrap();
        state
    }

    #[test]
    fn all_skip_ends_after_one_round_with_five_entries() {
        let mut state = talk_ready_state();
        let mut agents = boxed((0..5).map(|_| Scripted::new(&[])).collect());
        let entries = run_talk_phase(&mut state, &mut agents, 10).unwrap();
        assert_eq!(entries.len(), 5);
        assert!(entries.iter().all(|e| e.skipped));
        assert_eq!(state.phase(), Phase::DayVote(1));
    }

    #[test]
    fn cap_limits_rounds_to_exactly_fifty_entries() {
        let mut state = talk_ready_state();
        let chatty: Vec<Scripted> = (0..5).map(|_| Scripted::new(&["talk"; 100])).collect();
        let mut agents = boxed(chatty);
        let entries = run_talk_phase(&mut state, &mut agents, 10).unwrap();
        assert_eq!(entries.len(), 50);
    }

    #[test]
    fn round_robin_offers_every_agent_once_per_round() {
        let mut state = talk_ready_state();
        let mut agents = boxed((0..5).map(|_| Scripted::new(&["a", "b"])).collect());
        run_talk_phase(&mut state, &mut agents, 10).unwrap();
        // Three rounds ran (two talking, one all-skip): every agent was
        // offered exactly one turn per round, in order.
        let talks = state.talks();
        for round in 0..3 {
            let window: Vec<AgentId> = talks[round * 5..round * 5 + 5]
                .iter()
                .map(|e| e.speaker)
                .collect();
            assert_eq!(window, AgentId::all().to_vec());
        }
    }

    #[test]
    fn turn_numbers_count_through_the_day() {
        let mut state = talk_ready_state();
        let mut agents = boxed((0..5).map(|_| Scripted::new(&[])).collect());
        let entries = run_talk_phase(&mut state, &mut agents, 10).unwrap();
        let turns: Vec<u32> = entries.iter().map(|e| e.turn).collect();
        assert_eq!(turns, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn full_game_runs_to_a_winner() {
        let mut agents = boxed((0..5).map(|_| Scripted::new(&["hello"])).collect());
        let outcome = run_game(
            3,
            Some(fixed_assignment()),
            &mut agents,
            &GameConfig::default(),
        )
        .unwrap();
        assert!(outcome.days <= 3);
        assert!(outcome.forfeit.is_none());
        assert!(outcome.log.finish().is_some());
        // Votes go to the lowest-id candidate, so agent 1 is exiled on day
        // 1 and the wolf (agent 5) attacks agent 2 at night.
        let (_, winner, _) = outcome.log.finish().unwrap();
        assert!(matches!(winner, Side::VillageSide | Side::WolfSide));
    }

    struct Crashing;

    impl Agent for Crashing {
        fn policy_name(&self) -> String {
            "crashing".into()
        }
        fn on_status(&mut self, _s: &StatusMessage) -> Result<(), AgentError> {
            Ok(())
        }
        fn on_talk(&mut self, _e: &TalkEntry) -> Result<(), AgentError> {
            Ok(())
        }
        fn talk(&mut self, _d: u32, _r: u32, _t: u32) -> Result<TalkResponse, AgentError> {
            Err(AgentError::Crashed("boom".into()))
        }
        fn vote(&mut self, _d: u32, _c: &[AgentId]) -> Result<AgentId, AgentError> {
            Err(AgentError::Crashed("boom".into()))
        }
        fn divine(&mut self, _d: u32, _c: &[AgentId]) -> Result<AgentId, AgentError> {
            Err(AgentError::Crashed("boom".into()))
        }
        fn on_divine_result(
            &mut self,
            _d: u32,
            _t: AgentId,
            _s: Species,
        ) -> Result<(), AgentError> {
            Ok(())
        }
        fn attack(&mut self, _d: u32, _c: &[AgentId]) -> Result<AgentId, AgentError> {
            Err(AgentError::Crashed("boom".into()))
        }
        fn on_finish(&mut self, _d: u32, _w: Side) -> Result<(), AgentError> {
            Ok(())
        }
    }

    #[test]
    fn crash_forfeits_to_the_opposing_side() {
        // Agent 5 (the werewolf) crashes on its first talk turn.
        let mut agents: Vec<Box<dyn Agent>> = vec![
            Box::new(Scripted::new(&[])),
            Box::new(Scripted::new(&[])),
            Box::new(Scripted::new(&[])),
            Box::new(Scripted::new(&[])),
            Box::new(Crashing),
        ];
        let outcome = run_game(
            3,
            Some(fixed_assignment()),
            &mut agents,
            &GameConfig::default(),
        )
        .unwrap();
        assert_eq!(outcome.forfeit, Some(agent(5)));
        assert_eq!(outcome.winner, Side::VillageSide);
        let (_, winner, forfeit) = outcome.log.finish().unwrap();
        assert_eq!(winner, Side::VillageSide);
        assert_eq!(forfeit, Some(agent(5)));
    }

    #[test]
    fn empty_text_is_recorded_as_skip() {
        let mut state = talk_ready_state();
        let mut agents = boxed(vec![
            Scripted::new(&["  "]),
            Scripted::new(&[]),
            Scripted::new(&[]),
            Scripted::new(&[]),
            Scripted::new(&[]),
        ]);
        let entries = run_talk_phase(&mut state, &mut agents, 10).unwrap();
        assert!(entries[0].skipped);
        assert_eq!(entries.len(), 5);
    }
}
