//! Extraction of structured facts from conversation history: vote intents,
//! divination claims, silence, and who has been asked for a vote target.
//!
//! Two backends sit behind one interface. The pattern backend is exact on
//! talk generated by this crate (template utterances carry a machine tag)
//! and covers common free-text phrasings with a small grammar. The LLM
//! backend prompts a gateway with a few-shot exemplar and parses the
//! fixed-format completion, degrading to the pattern backend whenever the
//! completion does not parse.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::game::{AgentId, Species};
use crate::gateway::{Gateway, GatewayError, GenerationParams};
use crate::protocol::{render_history, TalkEntry, TalkTag};

/// A declared voting intention. The latest declaration per source wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteIntent {
    pub source: AgentId,
    pub target: AgentId,
    /// Ordinal of the winning declaration within the analyzed history.
    pub turn: usize,
}

/// A divination result claimed in talk. Claiming one implies coming out
/// as seer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivinationClaim {
    pub claimant: AgentId,
    pub target: AgentId,
    pub claimed: Species,
    pub turn: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisResult {
    pub votes: Vec<VoteIntent>,
    pub claims: Vec<DivinationClaim>,
    pub silent: BTreeSet<AgentId>,
    pub asked: BTreeSet<AgentId>,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("llm analysis backend failed with fallback disabled: {0}")]
    GatewayUnavailable(#[from] GatewayError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisKind {
    Vote,
    Seer,
}

/// Analysis backend selector.
pub enum Backend<'a> {
    Pattern,
    Llm {
        gateway: &'a dyn Gateway,
        fallback: bool,
    },
}

static RESULT_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)Agent ?\[(\d{2})\] (?:was|is) a (werewolf|human)").expect("valid regex")
});
static VOTE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)vot(?:e|ing) (?:for|to exile) Agent ?\[(\d{2})\]").expect("valid regex")
});
static ARROW_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^Agent\[(\d{2})\] -> Agent\[(\d{2})\]$").expect("valid regex"));
static CLAIM_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Agent\[(\d{2})\],Agent\[(\d{2})\],(Werewolf|Human)$").expect("valid regex")
});

const CO_PHRASES: [&str; 3] = ["i am a seer", "i am the seer", "i am the real seer"];

fn has_seer_co(text: &str) -> bool {
    let lower = text.to_lowercase();
    CO_PHRASES.iter().any(|p| lower.contains(p))
}

fn capture_agent(caps: &regex::Captures<'_>, group: usize) -> Option<AgentId> {
    let index: u8 = caps.get(group)?.as_str().parse().ok()?;
    AgentId::new(index).ok()
}

/// A question is not a declaration.
fn pattern_vote_target(text: &str) -> Option<AgentId> {
    if text.contains('?') {
        return None;
    }
    let caps = VOTE_RE.captures_iter(text).last()?;
    capture_agent(&caps, 1)
}

fn pattern_claim(text: &str) -> Option<(AgentId, Species)> {
    if !has_seer_co(text) {
        return None;
    }
    let caps = RESULT_RE.captures(text)?;
    let target = capture_agent(&caps, 1)?;
    let species = match caps.get(2)?.as_str().to_lowercase().as_str() {
        "werewolf" => Species::Werewolf,
        _ => Species::Human,
    };
    Some((target, species))
}

/// A directed question about someone's vote target.
pub fn is_vote_question(entry: &TalkEntry) -> bool {
    if matches!(entry.tag, Some(TalkTag::AskVote { .. })) {
        return true;
    }
    entry.mention.is_some()
        && entry.text.contains('?')
        && entry.text.to_lowercase().contains("vote")
}

/// One vote intent per declaring agent, latest declaration wins, ordered
/// by the turn of the winning declaration.
pub fn extract_votes(history: &[TalkEntry]) -> Vec<VoteIntent> {
    let mut latest: std::collections::BTreeMap<AgentId, VoteIntent> = Default::default();
    for (ordinal, entry) in history.iter().enumerate() {
        if entry.is_pass() {
            continue;
        }
        let target = match entry.tag {
            Some(TalkTag::VoteDeclaration { target }) => Some(target),
            Some(_) => None,
            None => pattern_vote_target(&entry.text),
        };
        if let Some(target) = target {
            if target != entry.speaker {
                latest.insert(
                    entry.speaker,
                    VoteIntent {
                        source: entry.speaker,
                        target,
                        turn: ordinal,
                    },
                );
            }
        }
    }
    let mut votes: Vec<VoteIntent> = latest.into_values().collect();
    votes.sort_by_key(|v| v.turn);
    votes
}

/// Every claimed divination result in talk order. Requires a seer CO
/// phrase in the same utterance on the free-text path, so reported
/// hearsay ("according to X, ...") does not count as a claim.
pub fn extract_divinations(history: &[TalkEntry]) -> Vec<DivinationClaim> {
    let mut claims = Vec::new();
    for (ordinal, entry) in history.iter().enumerate() {
        if entry.is_pass() {
            continue;
        }
        let found = match entry.tag {
            Some(TalkTag::DivinationClaim { target, species }) => Some((target, species)),
            Some(_) => None,
            None => pattern_claim(&entry.text),
        };
        if let Some((target, claimed)) = found {
            if target != entry.speaker {
                claims.push(DivinationClaim {
                    claimant: entry.speaker,
                    target,
                    claimed,
                    turn: ordinal,
                });
            }
        }
    }
    claims
}

/// Agents someone has directly asked for a vote target.
pub fn extract_asked(history: &[TalkEntry]) -> BTreeSet<AgentId> {
    let mut asked = BTreeSet::new();
    for entry in history {
        match entry.tag {
            Some(TalkTag::AskVote { target }) => {
                asked.insert(target);
            }
            Some(_) => {}
            None => {
                if is_vote_question(entry) {
                    if let Some(target) = entry.mention {
                        asked.insert(target);
                    }
                }
            }
        }
    }
    asked
}

/// Explicit self role statements ("I am a villager"), tagged or phrased.
/// Used by the consistency checker to catch a seer CO that follows an
/// earlier non-seer self-statement.
pub fn extract_role_claims(history: &[TalkEntry]) -> Vec<(AgentId, crate::game::Role, usize)> {
    let mut out = Vec::new();
    for (ordinal, entry) in history.iter().enumerate() {
        if entry.is_pass() {
            continue;
        }
        let role = match entry.tag {
            Some(TalkTag::RoleClaim { role }) => Some(role),
            Some(_) => None,
            None => {
                let lower = entry.text.to_lowercase();
                if lower.contains("i am a villager") || lower.contains("i am just a villager") {
                    Some(crate::game::Role::Villager)
                } else {
                    None
                }
            }
        };
        if let Some(role) = role {
            out.push((entry.speaker, role, ordinal));
        }
    }
    out
}

/// Agents who have stopped talking on the latest day in the history:
/// their last turn was a skip, or they declared themselves done.
pub fn detect_silence(
    history: &[TalkEntry],
    alive: &BTreeSet<AgentId>,
    _current_round: u32,
) -> BTreeSet<AgentId> {
    let Some(day) = history.iter().map(|e| e.day).max() else {
        return BTreeSet::new();
    };
    let mut silent = BTreeSet::new();
    for &agent in alive {
        let mut last: Option<&TalkEntry> = None;
        let mut declared_over = false;
        for entry in history
            .iter()
            .filter(|e| e.day == day && e.speaker == agent)
        {
            declared_over |= entry.is_over();
            last = Some(entry);
        }
        if declared_over || last.is_some_and(|e| e.skipped) {
            silent.insert(agent);
        }
    }
    silent
}

/// Exact output line formats.
pub fn render_votes(votes: &[VoteIntent]) -> String {
    votes
        .iter()
        .map(|v| format!("{} -> {}", v.source, v.target))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn render_claims(claims: &[DivinationClaim]) -> String {
    claims
        .iter()
        .map(|c| format!("{},{},{}", c.claimant, c.target, c.claimed))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses `Agent[0a] -> Agent[0b]` lines. `None` if any nonempty line
/// does not fit, which signals an unusable completion.
pub fn parse_votes_output(text: &str) -> Option<Vec<VoteIntent>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().map(str::trim).enumerate() {
        if line.is_empty() {
            continue;
        }
        let caps = ARROW_RE.captures(line)?;
        let source = capture_agent(&caps, 1)?;
        let target = capture_agent(&caps, 2)?;
        if source == target {
            return None;
        }
        out.push(VoteIntent {
            source,
            target,
            turn: i,
        });
    }
    // Latest wins, mirroring the extractor's invariant.
    let mut latest: std::collections::BTreeMap<AgentId, VoteIntent> = Default::default();
    for vote in out {
        latest.insert(vote.source, vote);
    }
    let mut votes: Vec<VoteIntent> = latest.into_values().collect();
    votes.sort_by_key(|v| v.turn);
    Some(votes)
}

/// Parses `Agent[0a],Agent[0b],{Werewolf|Human}` lines.
pub fn parse_claims_output(text: &str) -> Option<Vec<DivinationClaim>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().map(str::trim).enumerate() {
        if line.is_empty() {
            continue;
        }
        let caps = CLAIM_RE.captures(line)?;
        let claimant = capture_agent(&caps, 1)?;
        let target = capture_agent(&caps, 2)?;
        if claimant == target {
            return None;
        }
        let claimed = if caps.get(3)?.as_str() == "Werewolf" {
            Species::Werewolf
        } else {
            Species::Human
        };
        out.push(DivinationClaim {
            claimant,
            target,
            claimed,
            turn: i,
        });
    }
    Some(out)
}

/// Few-shot exemplar embedded in the analysis prompts.
const EXAMPLE_INPUT: &str = "Agent[01]: Good morning. Let us hear from the seer first.\n\
Agent[03]: I am a seer. As a result of the divination, Agent[04] was a werewolf.\n\
Agent[02]: Then I will vote for Agent[04] tonight.\n\
Agent[04]: I do not trust that result, but I will vote for Agent[03].";

const EXAMPLE_VOTES: &str = "Agent[02] -> Agent[04]\nAgent[04] -> Agent[03]";
const EXAMPLE_CLAIMS: &str = "Agent[03],Agent[04],Werewolf";

/// Builds the extraction prompt: task instruction, one worked
/// Input/Output example, then the history to analyze. Deterministic for
/// fixed inputs.
pub fn build_analysis_prompt(history: &[TalkEntry], kind: AnalysisKind) -> String {
    let (instruction, example_output) = match kind {
        AnalysisKind::Vote => (
            "Extract every declared voting intention from the werewolf-game conversation.\n\
             Output one line per declaring agent in the form `Agent[0a] -> Agent[0b]`,\n\
             keeping only each agent's latest declaration. Output nothing else.",
            EXAMPLE_VOTES,
        ),
        AnalysisKind::Seer => (
            "Extract every divination result claimed by a self-declared seer from the\n\
             werewolf-game conversation. Output one line per claim in the form\n\
             `Agent[0a],Agent[0b],Species` where Species is Werewolf or Human.\n\
             Output nothing else.",
            EXAMPLE_CLAIMS,
        ),
    };
    format!(
        "{instruction}\n\n## Task\n### Input\n{}\n### Output\n{}\n\n## Task\n### Input\n{}\n### Output\n",
        EXAMPLE_INPUT,
        example_output,
        render_history(history),
    )
}

/// Runs the full analysis over a history. `alive` scopes the silence set.
pub fn analyze(
    history: &[TalkEntry],
    alive: &BTreeSet<AgentId>,
    backend: Backend<'_>,
) -> Result<AnalysisResult, AnalysisError> {
    let pattern = AnalysisResult {
        votes: extract_votes(history),
        claims: extract_divinations(history),
        silent: detect_silence(history, alive, 0),
        asked: extract_asked(history),
    };
    match backend {
        Backend::Pattern => Ok(pattern),
        Backend::Llm { gateway, fallback } => {
            let params = GenerationParams::default();
            let vote_prompt = build_analysis_prompt(history, AnalysisKind::Vote);
            let seer_prompt = build_analysis_prompt(history, AnalysisKind::Seer);
            let completions = gateway
                .complete(&vote_prompt, &params)
                .and_then(|v| gateway.complete(&seer_prompt, &params).map(|c| (v, c)));
            let (vote_text, seer_text) = match completions {
                Ok(pair) => pair,
                Err(_) if fallback => return Ok(pattern),
                Err(e) => return Err(e.into()),
            };
            match (
                parse_votes_output(&vote_text),
                parse_claims_output(&seer_text),
            ) {
                (Some(votes), Some(claims)) => Ok(AnalysisResult {
                    votes,
                    claims,
                    silent: pattern.silent,
                    asked: pattern.asked,
                }),
                // Unparseable completions degrade to the pattern result.
                _ => Ok(pattern),
            }
        }
    }
}

/// View-building variant used by agents during play: vote intents, asked
/// agents, and silence are scoped to `day`'s talk, while divination claims
/// persist across the whole game.
pub fn analyze_for_day(
    history: &[TalkEntry],
    alive: &BTreeSet<AgentId>,
    day: u32,
    backend: Backend<'_>,
) -> Result<AnalysisResult, AnalysisError> {
    let start = history.partition_point(|e| e.day < day);
    let today = &history[start..];
    let mut result = analyze(today, alive, backend)?;
    result.claims = extract_divinations(history);
    Ok(result)
}
