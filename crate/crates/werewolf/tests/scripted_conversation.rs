//! The bundled scripted roster reproduces a fixed day-one conversation
//! verbatim: five substantive lines, in speaker order 2, 1, 5, 4, 3, with
//! the skips that schedule them filtered out of transcripts.

use werewolf::arena::{replay, RosterSpec, TournamentConfig};
use werewolf::protocol::GameLog;

const EXPECTED_LINES: [&str; 5] = [
    "Agent[02]: Good morning. It seems we have to look for werewolf. First of all, I would like to know the results of the seer.",
    "Agent[01]: Good morning. So our task is to find the werewolf. Indeed, I am looking forward to getting the results of the seer.",
    "Agent[05]: I am a seer. As a result of the divination, Agent[02] was a werewolf.",
    "Agent[04]: Agent[05], thanks for presenting your divination results. Let me also be suspicious of Agent[02]. Then, I will vote for Agent[02] tonight.",
    "Agent[03]: According to Agent[05]'s result, it looks like Agent[02] is a werewolf. I will also vote for Agent[02] tonight.",
];

fn run_sample() -> GameLog {
    let roster_path =
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_scripts/roster.toml");
    let roster = RosterSpec::from_file(&roster_path).unwrap();
    let out = tempfile::tempdir().unwrap();
    let config = TournamentConfig::new(1, 1, out.path());
    werewolf::arena::run_tournament(&roster, &config).unwrap();
    GameLog::read_file(&out.path().join("game_00000.jsonl")).unwrap()
}

#[test]
fn day_one_history_matches_the_script_verbatim() {
    let log = run_sample();
    let substantive: Vec<String> = log
        .talks()
        .iter()
        .filter(|t| t.day == 1 && !t.is_pass())
        .map(|t| t.render_line())
        .collect();
    assert_eq!(substantive, EXPECTED_LINES);
}

#[test]
fn replay_day_one_talk_section_matches_the_script() {
    let log = run_sample();
    let transcript = replay(&log).unwrap();
    let day1 = transcript
        .split("=== Day 1 ===\nTalk:\n")
        .nth(1)
        .and_then(|rest| rest.split("Votes:").next())
        .expect("day 1 talk section present");
    let lines: Vec<&str> = day1
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    assert_eq!(lines, EXPECTED_LINES);
}

#[test]
fn scripted_game_has_no_contradictions() {
    let log = run_sample();
    assert!(werewolf::arena::consistency_check(&log).unwrap().is_empty());
}
