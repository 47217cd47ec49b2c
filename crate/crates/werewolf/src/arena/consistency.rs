//! Per-agent contradiction detection over finished game logs.

use std::collections::BTreeMap;
use std::fmt;

use crate::analysis::{extract_divinations, extract_role_claims, extract_votes};
use crate::game::{AgentId, Role, Species};
use crate::protocol::GameLog;

use super::ArenaError;

/// One inconsistency in a single agent's statements or actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contradiction {
    /// The same claimant reported the same target as two different
    /// species.
    ConflictingClaims {
        claimant: AgentId,
        target: AgentId,
        first: Species,
        second: Species,
    },
    /// A declared vote followed by a ballot for someone else, with no
    /// re-declaration in between.
    VoteMismatch {
        agent: AgentId,
        day: u32,
        declared: AgentId,
        ballot: AgentId,
    },
    /// A seer CO after an explicit non-seer self-statement.
    CoAfterRoleClaim { agent: AgentId, earlier_claim: Role },
}

impl fmt::Display for Contradiction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contradiction::ConflictingClaims {
                claimant,
                target,
                first,
                second,
            } => write!(f, "{claimant} claimed {target} was {first}, later {second}"),
            Contradiction::VoteMismatch {
                agent,
                day,
                declared,
                ballot,
            } => write!(
                f,
                "day {day}: {agent} declared a vote for {declared} but balloted {ballot}"
            ),
            Contradiction::CoAfterRoleClaim {
                agent,
                earlier_claim,
            } => write!(
                f,
                "{agent} came out as seer after stating it was a {earlier_claim}"
            ),
        }
    }
}

/// Scans a finished log for the three contradiction types. The log must
/// carry its header and finish records.
pub fn consistency_check(log: &GameLog) -> Result<Vec<Contradiction>, ArenaError> {
    if log.header().is_none() {
        return Err(ArenaError::MalformedLog(
            "missing game header record".into(),
        ));
    }
    if log.finish().is_none() {
        return Err(ArenaError::MalformedLog("missing finish record".into()));
    }
    let talks = log.talks();
    let mut found = Vec::new();

    // (a) Conflicting divination claims about the same target.
    let mut first_species: BTreeMap<(AgentId, AgentId), Species> = BTreeMap::new();
    let mut flagged: Vec<(AgentId, AgentId)> = Vec::new();
    for claim in extract_divinations(&talks) {
        let key = (claim.claimant, claim.target);
        match first_species.get(&key) {
            None => {
                first_species.insert(key, claim.claimed);
            }
            Some(&first) if first != claim.claimed && !flagged.contains(&key) => {
                flagged.push(key);
                found.push(Contradiction::ConflictingClaims {
                    claimant: claim.claimant,
                    target: claim.target,
                    first,
                    second: claim.claimed,
                });
            }
            Some(_) => {}
        }
    }

    // (b) Final declared vote vs the recorded ballot, per day.
    let ballots = log.ballots();
    let days: Vec<u32> = {
        let mut days: Vec<u32> = ballots.iter().map(|&(d, _, _)| d).collect();
        days.dedup();
        days
    };
    for day in days {
        let today: Vec<_> = talks.iter().filter(|t| t.day == day).cloned().collect();
        for intent in extract_votes(&today) {
            if let Some(&(_, _, ballot)) = ballots
                .iter()
                .find(|&&(d, voter, _)| d == day && voter == intent.source)
            {
                if ballot != intent.target {
                    found.push(Contradiction::VoteMismatch {
                        agent: intent.source,
                        day,
                        declared: intent.target,
                        ballot,
                    });
                }
            }
        }
    }

    // (c) Seer CO after an explicit non-seer self-statement.
    let role_claims = extract_role_claims(&talks);
    let claims = extract_divinations(&talks);
    let mut co_flagged: Vec<AgentId> = Vec::new();
    for (agent, role, ordinal) in role_claims {
        if role == Role::Seer || co_flagged.contains(&agent) {
            continue;
        }
        if claims
            .iter()
            .any(|c| c.claimant == agent && c.turn > ordinal)
        {
            co_flagged.push(agent);
            found.push(Contradiction::CoAfterRoleClaim {
                agent,
                earlier_claim: role,
            });
        }
    }

    Ok(found)
}
