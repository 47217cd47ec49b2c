//! Renders a finished game log as a day-by-day transcript.

use std::fmt::Write;

use crate::game::PhaseKind;
use crate::protocol::{GameLog, LogRecord, TalkEntry};

use super::ArenaError;

/// Produces a human-readable transcript: roles, each day's substantive
/// talk, ballots, the exile, night results, and the winner on the final
/// line. Skipped turns are omitted from the talk sections.
pub fn replay(log: &GameLog) -> Result<String, ArenaError> {
    let (seed, roles) = log
        .header()
        .ok_or_else(|| ArenaError::MalformedLog("missing game header record".into()))?;
    if log.finish().is_none() {
        return Err(ArenaError::MalformedLog("missing finish record".into()));
    }

    let mut out = String::new();
    writeln!(out, "Seed: {seed}").unwrap();
    let roles_line = roles
        .iter()
        .map(|(id, role)| format!("{id}={role}"))
        .collect::<Vec<_>>()
        .join(", ");
    writeln!(out, "Roles: {roles_line}").unwrap();

    let mut in_votes = false;
    for record in log.records() {
        match record {
            LogRecord::Game { .. } => {}
            LogRecord::Status { day, phase, .. } => {
                in_votes = false;
                match phase {
                    PhaseKind::NightZero => writeln!(out, "Night 0:").unwrap(),
                    PhaseKind::DayTalk => {
                        writeln!(out, "=== Day {day} ===").unwrap();
                        writeln!(out, "Talk:").unwrap();
                    }
                    PhaseKind::Night => writeln!(out, "Night {day}:").unwrap(),
                    _ => {}
                }
            }
            LogRecord::Talk {
                day,
                turn,
                speaker,
                text,
                tag,
            } => {
                let entry = TalkEntry::new(*day, *turn, *speaker, text.clone(), *tag);
                if !entry.is_pass() {
                    writeln!(out, "  {}", entry.render_line()).unwrap();
                }
            }
            LogRecord::Vote { voter, target, .. } => {
                if !in_votes {
                    writeln!(out, "Votes:").unwrap();
                    in_votes = true;
                }
                writeln!(out, "  {voter} -> {target}").unwrap();
            }
            LogRecord::Exile { target, .. } => {
                writeln!(out, "  Exiled: {target}").unwrap();
            }
            LogRecord::Divine {
                seer,
                target,
                species,
                ..
            } => {
                writeln!(out, "  Divined: {seer} -> {target} ({species})").unwrap();
            }
            LogRecord::Attack { target, .. } => {
                writeln!(out, "  Attacked: {target}").unwrap();
            }
            LogRecord::Finish {
                day,
                winner,
                forfeit,
            } => match forfeit {
                Some(agent) => {
                    writeln!(out, "Winner: {winner} (day {day}, forfeit by {agent})").unwrap()
                }
                None => writeln!(out, "Winner: {winner} (day {day})").unwrap(),
            },
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::template_roster;
    use crate::protocol::{run_game, GameConfig};
    use crate::rules::RuleConfig;

    #[test]
    fn transcript_ends_with_the_winner_line() {
        let mut agents = template_roster(4, RuleConfig::default());
        let outcome = run_game(4, None, &mut agents, &GameConfig::default()).unwrap();
        let transcript = replay(&outcome.log).unwrap();
        let last = transcript.lines().last().unwrap();
        assert!(last.starts_with("Winner: "), "{last}");
        assert!(transcript.contains("=== Day 1 ==="));
        assert!(transcript.contains("Votes:"));
    }

    #[test]
    fn reparsed_log_reserializes_byte_exact() {
        let mut agents = template_roster(8, RuleConfig::default());
        let outcome = run_game(8, None, &mut agents, &GameConfig::default()).unwrap();
        let serialized = outcome.log.to_jsonl();
        let reparsed = GameLog::from_jsonl(&serialized).unwrap();
        assert_eq!(reparsed.to_jsonl(), serialized);
        // And the transcript of the reparsed log matches too.
        assert_eq!(replay(&outcome.log).unwrap(), replay(&reparsed).unwrap());
    }

    #[test]
    fn missing_finish_is_malformed() {
        let mut agents = template_roster(4, RuleConfig::default());
        let outcome = run_game(4, None, &mut agents, &GameConfig::default()).unwrap();
        let serialized = outcome.log.to_jsonl();
        let truncated: String = serialized
            .lines()
            .filter(|l| !l.contains("\"finish\""))
            .collect::<Vec<_>>()
            .join("\n");
        let log = GameLog::from_jsonl(&truncated).unwrap();
        assert!(matches!(replay(&log), Err(ArenaError::MalformedLog(_))));
    }
}
