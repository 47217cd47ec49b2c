//! Authoritative rules engine for the five-player game.
//!
//! A game always has exactly five seats with the 2/1/1/1 composition:
//! two villagers, one seer, one possessed, one werewolf. The seer acts on
//! the night of day 0, day talk starts on day 1, and one exile per day plus
//! at most one attack per night drive the game to a winner within a few
//! days.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::TalkEntry;

/// Identifier of one of the five seats, rendered as `Agent[01]`..`Agent[05]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(u8);

impl AgentId {
    pub const COUNT: usize = 5;

    pub fn new(index: u8) -> Result<Self, GameError> {
        if (1..=5).contains(&index) {
            Ok(AgentId(index))
        } else {
            Err(GameError::UnknownAgent(index))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// All five agents in id order.
    pub fn all() -> [AgentId; 5] {
        [AgentId(1), AgentId(2), AgentId(3), AgentId(4), AgentId(5)]
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Agent[{:02}]", self.0)
    }
}

impl FromStr for AgentId {
    type Err = GameError;

    /// Parses the exact rendered form, `Agent[0k]` with a two-digit index.
    fn from_str(s: &str) -> Result<Self, GameError> {
        let inner = s
            .strip_prefix("Agent[")
            .and_then(|rest| rest.strip_suffix(']'))
            .ok_or_else(|| GameError::BadAgentName(s.to_string()))?;
        if inner.len() != 2 || !inner.bytes().all(|b| b.is_ascii_digit()) {
            return Err(GameError::BadAgentName(s.to_string()));
        }
        let index: u8 = inner
            .parse()
            .map_err(|_| GameError::BadAgentName(s.to_string()))?;
        AgentId::new(index).map_err(|_| GameError::BadAgentName(s.to_string()))
    }
}

impl Serialize for AgentId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AgentId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Villager,
    Seer,
    Possessed,
    Werewolf,
}

impl Role {
    /// What a divination of this role reports. The possessed is human to
    /// the seer's eye despite playing for the wolf side.
    pub fn species(self) -> Species {
        match self {
            Role::Werewolf => Species::Werewolf,
            _ => Species::Human,
        }
    }

    pub fn side(self) -> Side {
        match self {
            Role::Villager | Role::Seer => Side::VillageSide,
            Role::Possessed | Role::Werewolf => Side::WolfSide,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Villager => "Villager",
            Role::Seer => "Seer",
            Role::Possessed => "Possessed",
            Role::Werewolf => "Werewolf",
        };
        f.write_str(s)
    }
}

/// Divination-visible category, distinct from [`Role`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Species {
    Human,
    Werewolf,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::Human => "Human",
            Species::Werewolf => "Werewolf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    VillageSide,
    WolfSide,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::VillageSide => "VillageSide",
            Side::WolfSide => "WolfSide",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Night of day 0; only the seer acts.
    NightZero,
    DayTalk(u32),
    DayVote(u32),
    Night(u32),
    Finished(Side),
}

impl Phase {
    pub fn day(&self) -> u32 {
        match self {
            Phase::NightZero => 0,
            Phase::DayTalk(d) | Phase::DayVote(d) | Phase::Night(d) => *d,
            Phase::Finished(_) => 0,
        }
    }
}

/// Flat phase label used on the wire and in logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    NightZero,
    DayTalk,
    DayVote,
    Night,
    Finished,
}

impl From<Phase> for PhaseKind {
    fn from(p: Phase) -> Self {
        match p {
            Phase::NightZero => PhaseKind::NightZero,
            Phase::DayTalk(_) => PhaseKind::DayTalk,
            Phase::DayVote(_) => PhaseKind::DayVote,
            Phase::Night(_) => PhaseKind::Night,
            Phase::Finished(_) => PhaseKind::Finished,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("role assignment violates the 2/1/1/1 composition")]
    InvalidComposition,
    #[error("agent index {0} out of range 1..=5")]
    UnknownAgent(u8),
    #[error("not a valid agent name: {0:?}")]
    BadAgentName(String),
    #[error("{0} does not hold the Seer role")]
    NotSeer(AgentId),
    #[error("operation not legal in the current phase")]
    WrongPhase,
    #[error("{0} is dead")]
    TargetDead(AgentId),
    #[error("already divined this night")]
    DuplicateDivination,
    #[error("the seer cannot divine itself")]
    SelfDivination,
    #[error("missing ballot from {0}")]
    MissingVote(AgentId),
    #[error("ballot from {0}, who is not a living voter")]
    IllegalVoter(AgentId),
    #[error("{voter} voted for dead agent {target}")]
    VoteForDead { voter: AgentId, target: AgentId },
    #[error("{0} voted for itself")]
    SelfVote(AgentId),
    #[error("the werewolf cannot attack itself")]
    SelfAttack,
}

/// One stored divination: `(night day, seer, target, result)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divination {
    pub day: u32,
    pub seer: AgentId,
    pub target: AgentId,
    pub species: Species,
}

/// A complete 2/1/1/1 role assignment over the five seats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAssignment(BTreeMap<AgentId, Role>);

impl RoleAssignment {
    pub fn new(roles: BTreeMap<AgentId, Role>) -> Result<Self, GameError> {
        let count = |r: Role| roles.values().filter(|&&x| x == r).count();
        if roles.len() == 5
            && count(Role::Villager) == 2
            && count(Role::Seer) == 1
            && count(Role::Possessed) == 1
            && count(Role::Werewolf) == 1
        {
            Ok(RoleAssignment(roles))
        } else {
            Err(GameError::InvalidComposition)
        }
    }

    pub fn role(&self, id: AgentId) -> Role {
        self.0[&id]
    }

    /// All 60 distinct assignments, ordered by (seer, possessed, werewolf)
    /// seat positions.
    pub fn all() -> Vec<RoleAssignment> {
        let mut out = Vec::with_capacity(60);
        for seer in AgentId::all() {
            for possessed in AgentId::all() {
                if possessed == seer {
                    continue;
                }
                for wolf in AgentId::all() {
                    if wolf == seer || wolf == possessed {
                        continue;
                    }
                    let mut map = BTreeMap::new();
                    for id in AgentId::all() {
                        let role = if id == seer {
                            Role::Seer
                        } else if id == possessed {
                            Role::Possessed
                        } else if id == wolf {
                            Role::Werewolf
                        } else {
                            Role::Villager
                        };
                        map.insert(id, role);
                    }
                    out.push(RoleAssignment(map));
                }
            }
        }
        out
    }
}

/// Full authoritative record of one game.
#[derive(Debug, Clone)]
pub struct GameState {
    seed: u64,
    roles: BTreeMap<AgentId, Role>,
    phase: Phase,
    alive: BTreeSet<AgentId>,
    dead: BTreeSet<AgentId>,
    talks: Vec<TalkEntry>,
    divinations: Vec<Divination>,
    votes: BTreeMap<u32, BTreeMap<AgentId, AgentId>>,
    attacks: BTreeMap<u32, AgentId>,
    rng: StdRng,
}

impl GameState {
    /// Starts a game in [`Phase::NightZero`]. Without an explicit
    /// assignment, roles are drawn uniformly from the 60 distinct
    /// assignments using `seed`.
    pub fn new(seed: u64, assignment: Option<RoleAssignment>) -> Result<Self, GameError> {
        let mut rng = StdRng::seed_from_u64(seed);
        let assignment = match assignment {
            Some(a) => a,
            None => {
                let all = RoleAssignment::all();
                let idx = rng.random_range(0..all.len());
                all[idx].clone()
            }
        };
        Ok(GameState {
            seed,
            roles: assignment.0,
            phase: Phase::NightZero,
            alive: AgentId::all().into_iter().collect(),
            dead: BTreeSet::new(),
            talks: Vec::new(),
            divinations: Vec::new(),
            votes: BTreeMap::new(),
            attacks: BTreeMap::new(),
            rng,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn day(&self) -> u32 {
        self.phase.day()
    }

    pub fn role_of(&self, id: AgentId) -> Role {
        self.roles[&id]
    }

    pub fn roles(&self) -> &BTreeMap<AgentId, Role> {
        &self.roles
    }

    pub fn is_alive(&self, id: AgentId) -> bool {
        self.alive.contains(&id)
    }

    pub fn alive(&self) -> &BTreeSet<AgentId> {
        &self.alive
    }

    pub fn dead(&self) -> &BTreeSet<AgentId> {
        &self.dead
    }

    pub fn talks(&self) -> &[TalkEntry] {
        &self.talks
    }

    pub fn divinations(&self) -> &[Divination] {
        &self.divinations
    }

    pub fn votes(&self) -> &BTreeMap<u32, BTreeMap<AgentId, AgentId>> {
        &self.votes
    }

    pub fn attacks(&self) -> &BTreeMap<u32, AgentId> {
        &self.attacks
    }

    pub fn seer(&self) -> AgentId {
        self.with_role(Role::Seer)
    }

    pub fn werewolf(&self) -> AgentId {
        self.with_role(Role::Werewolf)
    }

    fn with_role(&self, role: Role) -> AgentId {
        *self
            .roles
            .iter()
            .find(|(_, &r)| r == role)
            .map(|(id, _)| id)
            .expect("composition guarantees one of each special role")
    }

    /// Alive and dead partition the five seats.
    pub fn partition_ok(&self) -> bool {
        self.alive.is_disjoint(&self.dead) && self.alive.union(&self.dead).count() == AgentId::COUNT
    }

    fn kill(&mut self, id: AgentId) {
        self.alive.remove(&id);
        self.dead.insert(id);
        debug_assert!(self.partition_ok());
    }

    /// Village side wins once no werewolf lives; the wolf side wins once
    /// living werewolves are at least as many as living humans (the
    /// possessed counts as human here). `None` while the game continues.
    pub fn check_winner(&self) -> Option<Side> {
        let wolves = self
            .alive
            .iter()
            .filter(|id| self.roles[id] == Role::Werewolf)
            .count();
        let humans = self.alive.len() - wolves;
        if wolves == 0 {
            Some(Side::VillageSide)
        } else if wolves >= humans {
            Some(Side::WolfSide)
        } else {
            None
        }
    }

    /// The seer learns one living player's species. Legal on night zero
    /// and on later nights, once per night.
    pub fn divine(&mut self, seer: AgentId, target: AgentId) -> Result<Species, GameError> {
        let night_day = match self.phase {
            Phase::NightZero => 0,
            Phase::Night(d) => d,
            _ => return Err(GameError::WrongPhase),
        };
        if self.roles[&seer] != Role::Seer {
            return Err(GameError::NotSeer(seer));
        }
        if seer == target {
            return Err(GameError::SelfDivination);
        }
        if !self.is_alive(target) {
            return Err(GameError::TargetDead(target));
        }
        if self.divinations.iter().any(|d| d.day == night_day) {
            return Err(GameError::DuplicateDivination);
        }
        let species = self.roles[&target].species();
        self.divinations.push(Divination {
            day: night_day,
            seer,
            target,
            species,
        });
        Ok(species)
    }

    /// Ends night zero and opens the first day's talk.
    pub fn end_night_zero(&mut self) -> Result<(), GameError> {
        match self.phase {
            Phase::NightZero => {
                self.phase = Phase::DayTalk(1);
                Ok(())
            }
            _ => Err(GameError::WrongPhase),
        }
    }

    /// Appends one utterance to the game history. Legal during day talk.
    pub fn push_talk(&mut self, entry: TalkEntry) -> Result<(), GameError> {
        match self.phase {
            Phase::DayTalk(_) => {
                self.talks.push(entry);
                Ok(())
            }
            _ => Err(GameError::WrongPhase),
        }
    }

    /// Closes the talk phase and opens voting.
    pub fn end_talk(&mut self) -> Result<(), GameError> {
        match self.phase {
            Phase::DayTalk(d) => {
                self.phase = Phase::DayVote(d);
                Ok(())
            }
            _ => Err(GameError::WrongPhase),
        }
    }

    /// Resolves the day's exile from one ballot per living agent. The
    /// plurality target is exiled; ties break uniformly using the state
    /// seed. Advances to night, or finishes the game.
    pub fn resolve_vote(
        &mut self,
        ballots: &BTreeMap<AgentId, AgentId>,
    ) -> Result<AgentId, GameError> {
        let day = match self.phase {
            Phase::DayVote(d) => d,
            _ => return Err(GameError::WrongPhase),
        };
        for (&voter, &target) in ballots {
            if !self.is_alive(voter) {
                return Err(GameError::IllegalVoter(voter));
            }
            if voter == target {
                return Err(GameError::SelfVote(voter));
            }
            if !self.is_alive(target) {
                return Err(GameError::VoteForDead { voter, target });
            }
        }
        for &id in &self.alive {
            if !ballots.contains_key(&id) {
                return Err(GameError::MissingVote(id));
            }
        }

        let mut tally: BTreeMap<AgentId, usize> = BTreeMap::new();
        for &target in ballots.values() {
            *tally.entry(target).or_default() += 1;
        }
        let top = *tally.values().max().expect("at least one ballot");
        let tied: Vec<AgentId> = tally
            .iter()
            .filter(|(_, &n)| n == top)
            .map(|(&id, _)| id)
            .collect();
        let exiled = tied[self.rng.random_range(0..tied.len())];

        self.votes.insert(day, ballots.clone());
        self.kill(exiled);
        self.phase = match self.check_winner() {
            Some(side) => Phase::Finished(side),
            None => Phase::Night(day),
        };
        Ok(exiled)
    }

    /// Resolves the werewolf's night attack, then runs the win check and
    /// either finishes the game or opens the next day's talk.
    pub fn resolve_attack(&mut self, target: AgentId) -> Result<(), GameError> {
        let day = match self.phase {
            Phase::Night(d) => d,
            _ => return Err(GameError::WrongPhase),
        };
        if self.roles[&target] == Role::Werewolf {
            return Err(GameError::SelfAttack);
        }
        if !self.is_alive(target) {
            return Err(GameError::TargetDead(target));
        }
        self.attacks.insert(day, target);
        self.kill(target);
        self.phase = match self.check_winner() {
            Some(side) => Phase::Finished(side),
            None => Phase::DayTalk(day + 1),
        };
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assignment(seer: u8, possessed: u8, wolf: u8) -> RoleAssignment {
        let mut map = BTreeMap::new();
        for id in AgentId::all() {
            let role = if id.index() == seer {
                Role::Seer
            } else if id.index() == possessed {
                Role::Possessed
            } else if id.index() == wolf {
                Role::Werewolf
            } else {
                Role::Villager
            };
            map.insert(id, role);
        }
        RoleAssignment::new(map).unwrap()
    }

    fn agent(i: u8) -> AgentId {
        AgentId::new(i).unwrap()
    }

    #[test]
    fn agent_id_renders_zero_padded_and_round_trips() {
        for id in AgentId::all() {
            let rendered = id.to_string();
            assert_eq!(rendered.len(), "Agent[01]".len());
            assert_eq!(rendered.parse::<AgentId>().unwrap(), id);
        }
        assert_eq!(agent(2).to_string(), "Agent[02]");
        assert!("Agent[00]".parse::<AgentId>().is_err());
        assert!("Agent[06]".parse::<AgentId>().is_err());
        assert!("Agent[1]".parse::<AgentId>().is_err());
        assert!("agent[01]".parse::<AgentId>().is_err());
    }

    #[test]
    fn new_game_has_forced_composition() {
        let state = GameState::new(7, None).unwrap();
        let count = |r: Role| state.roles().values().filter(|&&x| x == r).count();
        assert_eq!(count(Role::Villager), 2);
        assert_eq!(count(Role::Seer), 1);
        assert_eq!(count(Role::Possessed), 1);
        assert_eq!(count(Role::Werewolf), 1);
        assert_eq!(state.phase(), Phase::NightZero);
        assert!(state.dead().is_empty());
        assert!(state.talks().is_empty());
    }

    #[test]
    fn explicit_assignment_accepted() {
        let state = GameState::new(1, Some(assignment(2, 4, 5))).unwrap();
        assert_eq!(state.role_of(agent(2)), Role::Seer);
        assert_eq!(state.phase(), Phase::NightZero);
    }

    #[test]
    fn two_seers_rejected() {
        let mut map = BTreeMap::new();
        map.insert(agent(1), Role::Seer);
        map.insert(agent(2), Role::Seer);
        map.insert(agent(3), Role::Villager);
        map.insert(agent(4), Role::Possessed);
        map.insert(agent(5), Role::Werewolf);
        assert_eq!(
            RoleAssignment::new(map).unwrap_err(),
            GameError::InvalidComposition
        );
    }

    #[test]
    fn sixty_distinct_assignments() {
        let all = RoleAssignment::all();
        assert_eq!(all.len(), 60);
        let unique: BTreeSet<Vec<(AgentId, Role)>> = all
            .iter()
            .map(|a| a.0.iter().map(|(&id, &r)| (id, r)).collect())
            .collect();
        assert_eq!(unique.len(), 60);
    }

    #[test]
    fn divination_matches_species_over_all_assignments() {
        // Brute force: every assignment, every legal target.
        for a in RoleAssignment::all() {
            let seer = AgentId::all()
                .into_iter()
                .find(|&id| a.role(id) == Role::Seer)
                .unwrap();
            for target in AgentId::all() {
                if target == seer {
                    continue;
                }
                let mut state = GameState::new(0, Some(a.clone())).unwrap();
                let got = state.divine(seer, target).unwrap();
                let expected = match a.role(target) {
                    Role::Werewolf => Species::Werewolf,
                    _ => Species::Human,
                };
                assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn possessed_divines_human() {
        let mut state = GameState::new(3, Some(assignment(2, 4, 5))).unwrap();
        assert_eq!(state.divine(agent(2), agent(4)).unwrap(), Species::Human);
    }

    #[test]
    fn divine_preconditions() {
        let mut state = GameState::new(3, Some(assignment(2, 4, 5))).unwrap();
        assert_eq!(
            state.divine(agent(1), agent(3)).unwrap_err(),
            GameError::NotSeer(agent(1))
        );
        assert_eq!(
            state.divine(agent(2), agent(2)).unwrap_err(),
            GameError::SelfDivination
        );
        state.divine(agent(2), agent(3)).unwrap();
        assert_eq!(
            state.divine(agent(2), agent(4)).unwrap_err(),
            GameError::DuplicateDivination
        );
        state.end_night_zero().unwrap();
        assert_eq!(
            state.divine(agent(2), agent(4)).unwrap_err(),
            GameError::WrongPhase
        );
    }

    fn ballots(pairs: &[(u8, u8)]) -> BTreeMap<AgentId, AgentId> {
        pairs.iter().map(|&(v, t)| (agent(v), agent(t))).collect()
    }

    fn start_day_vote(state: &mut GameState) {
        state.end_night_zero().unwrap();
        state.end_talk().unwrap();
    }

    #[test]
    fn strict_plurality_exiles() {
        let mut state = GameState::new(9, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        let exiled = state
            .resolve_vote(&ballots(&[(1, 4), (2, 4), (3, 4), (4, 1), (5, 1)]))
            .unwrap();
        assert_eq!(exiled, agent(4));
        assert!(!state.is_alive(agent(4)));
    }

    #[test]
    fn tie_break_is_deterministic_per_seed() {
        let run = || {
            let mut state = GameState::new(7, Some(assignment(2, 4, 5))).unwrap();
            start_day_vote(&mut state);
            // 2-2-1 split between agents 1 and 3.
            state
                .resolve_vote(&ballots(&[(1, 3), (2, 3), (3, 1), (4, 1), (5, 2)]))
                .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn ballot_legality_checks() {
        let mut state = GameState::new(5, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        let missing = ballots(&[(1, 2), (2, 1), (3, 1), (4, 1)]);
        assert_eq!(
            state.resolve_vote(&missing).unwrap_err(),
            GameError::MissingVote(agent(5))
        );
        let selfish = ballots(&[(1, 1), (2, 1), (3, 1), (4, 1), (5, 1)]);
        assert_eq!(
            state.resolve_vote(&selfish).unwrap_err(),
            GameError::SelfVote(agent(1))
        );

        // Kill agent 1, then a ballot listing it as a voter is illegal.
        let mut state = GameState::new(5, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        state
            .resolve_vote(&ballots(&[(1, 2), (2, 1), (3, 1), (4, 1), (5, 1)]))
            .unwrap();
        assert!(!state.is_alive(agent(1)));
        state.resolve_attack(agent(3)).unwrap();
        state.end_talk().unwrap();
        let dead_voter = ballots(&[(1, 2), (2, 4), (4, 2), (5, 2)]);
        assert_eq!(
            state.resolve_vote(&dead_voter).unwrap_err(),
            GameError::IllegalVoter(agent(1))
        );
        let dead_target = ballots(&[(2, 1), (4, 2), (5, 2)]);
        assert_eq!(
            state.resolve_vote(&dead_target).unwrap_err(),
            GameError::VoteForDead {
                voter: agent(2),
                target: agent(1)
            }
        );
    }

    #[test]
    fn full_trace_exile_villager_then_attack_seer() {
        let mut state = GameState::new(11, Some(assignment(2, 4, 5))).unwrap();
        state.divine(agent(2), agent(1)).unwrap();
        start_day_vote(&mut state);
        state
            .resolve_vote(&ballots(&[(1, 3), (2, 3), (3, 1), (4, 3), (5, 3)]))
            .unwrap();
        assert_eq!(state.phase(), Phase::Night(1));
        state.resolve_attack(agent(2)).unwrap();
        assert!(state.dead().contains(&agent(2)));
        assert_eq!(state.alive().len(), 3);
        assert_eq!(state.phase(), Phase::DayTalk(2));
        assert!(state.partition_ok());
    }

    #[test]
    fn attack_preconditions() {
        let mut state = GameState::new(11, Some(assignment(2, 4, 5))).unwrap();
        assert_eq!(
            state.resolve_attack(agent(1)).unwrap_err(),
            GameError::WrongPhase
        );
        start_day_vote(&mut state);
        state
            .resolve_vote(&ballots(&[(1, 3), (2, 3), (3, 1), (4, 3), (5, 3)]))
            .unwrap();
        assert_eq!(
            state.resolve_attack(agent(3)).unwrap_err(),
            GameError::TargetDead(agent(3))
        );
        assert_eq!(
            state.resolve_attack(agent(5)).unwrap_err(),
            GameError::SelfAttack
        );
    }

    #[test]
    fn winner_counting_rule() {
        // Werewolf exiled: village wins immediately.
        let mut state = GameState::new(2, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        state
            .resolve_vote(&ballots(&[(1, 5), (2, 5), (3, 5), (4, 5), (5, 1)]))
            .unwrap();
        assert_eq!(state.phase(), Phase::Finished(Side::VillageSide));

        // Wolf + villager: 1 >= 1, wolf side wins.
        let mut state = GameState::new(2, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        state
            .resolve_vote(&ballots(&[(1, 2), (2, 1), (3, 2), (4, 2), (5, 2)]))
            .unwrap();
        state.resolve_attack(agent(4)).unwrap();
        state.end_talk().unwrap();
        state
            .resolve_vote(&ballots(&[(1, 3), (3, 1), (5, 3)]))
            .unwrap();
        assert_eq!(state.phase(), Phase::Finished(Side::WolfSide));
    }

    #[test]
    fn winner_none_while_wolf_outnumbered() {
        // Werewolf, villager, seer alive: game continues.
        let mut state = GameState::new(2, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        state
            .resolve_vote(&ballots(&[(1, 4), (2, 4), (3, 4), (4, 1), (5, 1)]))
            .unwrap();
        assert_eq!(state.check_winner(), None);
        state.resolve_attack(agent(1)).unwrap();
        assert_eq!(state.check_winner(), None);
        assert_eq!(state.phase(), Phase::DayTalk(2));
    }

    #[test]
    fn death_is_monotone_and_partition_holds() {
        let mut state = GameState::new(4, Some(assignment(2, 4, 5))).unwrap();
        start_day_vote(&mut state);
        let mut dead = state.dead().len();
        state
            .resolve_vote(&ballots(&[(1, 3), (2, 3), (3, 1), (4, 3), (5, 3)]))
            .unwrap();
        assert!(state.dead().len() >= dead);
        dead = state.dead().len();
        assert!(state.partition_ok());
        state.resolve_attack(agent(1)).unwrap();
        assert!(state.dead().len() >= dead);
        assert!(state.partition_ok());
    }
}
