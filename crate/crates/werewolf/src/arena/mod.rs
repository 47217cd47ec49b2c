//! Tournament harness: rosters, seeded batches, statistics, the
//! consistency checker, and log replay.

mod consistency;
mod replay;

pub use consistency::{consistency_check, Contradiction};
pub use replay::replay;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{LlmOnlyAgent, PolicyAgent, PolicyKind, ScriptedAgent};
use crate::game::{AgentId, Side};
use crate::gateway::{
    Gateway, GatewayError, HttpGateway, HttpGatewayConfig, MockGateway, MockScript,
};
use crate::protocol::{run_game, Agent, GameConfig, GameLog, ProtocolError, ServerError};
use crate::rules::RuleConfig;
use crate::util;
use crate::utterance::{UtteranceEngine, UtteranceError};

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("config: {0}")]
    Config(String),
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Utterance(#[from] UtteranceError),
}

impl From<ProtocolError> for ArenaError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::MalformedLog(m) => ArenaError::MalformedLog(m),
            other => ArenaError::Config(other.to_string()),
        }
    }
}

impl From<ServerError> for ArenaError {
    fn from(e: ServerError) -> Self {
        ArenaError::Config(e.to_string())
    }
}

/// One seat in a roster: the policy driving it and the persona it speaks
/// with. Scripted seats carry their utterance list, loaded eagerly so a
/// bad path fails at roster build time.
#[derive(Debug, Clone)]
pub struct RosterEntry {
    pub policy: PolicyKind,
    pub persona: String,
    pub script: Option<Vec<String>>,
}

impl RosterEntry {
    pub fn policy(kind: PolicyKind) -> Self {
        RosterEntry {
            policy: kind,
            persona: "Plain".to_string(),
            script: None,
        }
    }

    pub fn with_persona(mut self, persona: impl Into<String>) -> Self {
        self.persona = persona.into();
        self
    }
}

/// A full five-seat roster plus the rule configuration all rule-based
/// seats share.
#[derive(Debug, Clone)]
pub struct RosterSpec {
    pub agents: Vec<RosterEntry>,
    pub rules: RuleConfig,
}

#[derive(Debug, Deserialize)]
struct RosterFile {
    #[serde(default)]
    rules: RuleConfig,
    #[serde(rename = "agents")]
    agents: Vec<RosterFileEntry>,
}

#[derive(Debug, Deserialize)]
struct RosterFileEntry {
    policy: PolicyKind,
    #[serde(default = "default_persona")]
    persona: String,
    script: Option<PathBuf>,
}

fn default_persona() -> String {
    "Plain".to_string()
}

impl RosterSpec {
    /// Five seats of one policy, plain personas.
    pub fn uniform(policy: PolicyKind, rules: RuleConfig) -> Self {
        RosterSpec {
            agents: (0..5).map(|_| RosterEntry::policy(policy)).collect(),
            rules,
        }
    }

    pub fn new(agents: Vec<RosterEntry>, rules: RuleConfig) -> Result<Self, ArenaError> {
        if agents.len() != AgentId::COUNT {
            return Err(ArenaError::Config(format!(
                "a roster needs exactly five agents, got {}",
                agents.len()
            )));
        }
        Ok(RosterSpec { agents, rules })
    }

    /// Reads a roster TOML file. Script paths resolve relative to the
    /// roster file's directory and are loaded (and validated) here.
    pub fn from_file(path: &Path) -> Result<Self, ArenaError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ArenaError::Config(format!("{}: {e}", path.display())))?;
        let parsed: RosterFile =
            toml::from_str(&text).map_err(|e| ArenaError::Config(e.to_string()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut agents = Vec::with_capacity(parsed.agents.len());
        for entry in parsed.agents {
            let script = match (&entry.policy, entry.script) {
                (PolicyKind::Scripted, Some(rel)) => {
                    let full = base.join(rel);
                    let text = std::fs::read_to_string(&full)
                        .map_err(|e| ArenaError::Config(format!("{}: {e}", full.display())))?;
                    Some(
                        text.lines()
                            .map(str::trim_end)
                            .filter(|l| !l.is_empty())
                            .map(String::from)
                            .collect(),
                    )
                }
                (PolicyKind::Scripted, None) => {
                    return Err(ArenaError::Config(
                        "scripted agents need a script = \"file\" entry".into(),
                    ));
                }
                (_, _) => None,
            };
            agents.push(RosterEntry {
                policy: entry.policy,
                persona: entry.persona,
                script,
            });
        }
        Self::new(agents, parsed.rules)
    }
}

/// Batch settings for [`run_tournament`].
#[derive(Clone)]
pub struct TournamentConfig {
    pub games: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub parallel: usize,
    pub game: GameConfig,
    pub mock: Option<MockScript>,
    pub llm: Option<HttpGatewayConfig>,
}

impl TournamentConfig {
    pub fn new(games: u32, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        TournamentConfig {
            games,
            seed,
            out_dir: out_dir.into(),
            parallel: 1,
            game: GameConfig::default(),
            mock: None,
            llm: None,
        }
    }

    pub fn with_mock(mut self, script: MockScript) -> Self {
        self.mock = Some(script);
        self
    }

    pub fn with_parallel(mut self, workers: usize) -> Self {
        self.parallel = workers.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyStats {
    /// Seats in the roster running this policy.
    pub slots: u32,
    /// Seat-games whose side won.
    pub wins: u64,
    /// Seat-games played (slots x games).
    pub seat_games: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TournamentStats {
    pub games: u64,
    pub village_wins: u64,
    pub wolf_wins: u64,
    pub mean_days: f64,
    pub contradictions: u64,
    pub crashes: u64,
    pub per_policy: BTreeMap<String, PolicyStats>,
}

impl TournamentStats {
    pub fn wolf_rate(&self) -> f64 {
        if self.games == 0 {
            0.0
        } else {
            self.wolf_wins as f64 / self.games as f64
        }
    }

    /// The human-readable table printed by the CLI.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "Games: {}   Village: {} ({:.1}%)   Wolf: {} ({:.1}%)\n\
             Mean game length: {:.2} days\n\
             Contradictions: {}   Crashes: {}\n",
            self.games,
            self.village_wins,
            100.0 * self.village_wins as f64 / self.games.max(1) as f64,
            self.wolf_wins,
            100.0 * self.wolf_wins as f64 / self.games.max(1) as f64,
            self.mean_days,
            self.contradictions,
            self.crashes,
        );
        out.push_str(&format!(
            "{:<16} {:>5} {:>12} {:>9}\n",
            "Policy", "Seats", "Seat wins", "Rate"
        ));
        for (name, stats) in &self.per_policy {
            out.push_str(&format!(
                "{name:<16} {:>5} {:>7}/{:<5} {:>8.3}\n",
                stats.slots, stats.wins, stats.seat_games, stats.rate
            ));
        }
        out
    }
}

struct GameSummary {
    winner: Side,
    days: u32,
    forfeit: bool,
    contradictions: u64,
    seat_sides: [Side; 5],
}

fn build_gateway(
    config: &TournamentConfig,
    shared_http: &Option<Arc<HttpGateway>>,
) -> Option<Arc<dyn Gateway>> {
    if let Some(script) = &config.mock {
        // Fresh per game so usage counters and behavior stay per-game
        // deterministic under any parallelism.
        return Some(Arc::new(MockGateway::new(script.clone())));
    }
    shared_http
        .as_ref()
        .map(|g| Arc::clone(g) as Arc<dyn Gateway>)
}

fn build_agents(
    roster: &RosterSpec,
    game_seed: u64,
    utterances: &Arc<UtteranceEngine>,
    gateway: Option<Arc<dyn Gateway>>,
) -> Result<Vec<Box<dyn Agent>>, ArenaError> {
    let mut agents: Vec<Box<dyn Agent>> = Vec::with_capacity(AgentId::COUNT);
    for (slot, entry) in roster.agents.iter().enumerate() {
        let id = AgentId::new(slot as u8 + 1).expect("five slots");
        let agent_seed = util::mix(&[game_seed, slot as u64 + 1]);
        let persona = utterances.personas().get(&entry.persona)?.clone();
        let agent: Box<dyn Agent> = match entry.policy {
            PolicyKind::TemplateOnly => Box::new(PolicyAgent::template_only(
                id,
                agent_seed,
                Arc::clone(utterances),
                persona,
                roster.rules,
            )),
            PolicyKind::Hybrid => Box::new(PolicyAgent::hybrid(
                id,
                agent_seed,
                Arc::clone(utterances),
                persona,
                roster.rules,
                gateway.clone(),
            )),
            PolicyKind::LlmOnly => Box::new(LlmOnlyAgent::new(
                id,
                agent_seed,
                Arc::clone(utterances),
                gateway.clone(),
            )),
            PolicyKind::Scripted => {
                Box::new(ScriptedAgent::new(entry.script.clone().unwrap_or_default()))
            }
        };
        agents.push(agent);
    }
    Ok(agents)
}

fn log_path(out_dir: &Path, index: u32) -> PathBuf {
    out_dir.join(format!("game_{index:05}.jsonl"))
}

fn play_one(
    index: u32,
    roster: &RosterSpec,
    config: &TournamentConfig,
    utterances: &Arc<UtteranceEngine>,
    shared_http: &Option<Arc<HttpGateway>>,
) -> Result<GameSummary, ArenaError> {
    let game_seed = util::mix(&[config.seed, index as u64]);
    let gateway = build_gateway(config, shared_http);
    let mut agents = build_agents(roster, game_seed, utterances, gateway)?;
    let outcome = run_game(game_seed, None, &mut agents, &config.game)?;
    outcome.log.write_file(&log_path(&config.out_dir, index))?;
    let contradictions = consistency_check(&outcome.log)?.len() as u64;
    let (_, roles) = outcome
        .log
        .header()
        .ok_or_else(|| ArenaError::MalformedLog("game log lacks a header".into()))?;
    let mut seat_sides = [Side::VillageSide; 5];
    for (i, id) in AgentId::all().into_iter().enumerate() {
        seat_sides[i] = roles[&id].side();
    }
    Ok(GameSummary {
        winner: outcome.winner,
        days: outcome.days,
        forfeit: outcome.forfeit.is_some(),
        contradictions,
        seat_sides,
    })
}

/// Runs a seeded batch of complete games: one log file per game plus a
/// `stats.json`, and the aggregate statistics returned. Fully
/// deterministic for fixed inputs with the mock gateway, at any level of
/// parallelism.
pub fn run_tournament(
    roster: &RosterSpec,
    config: &TournamentConfig,
) -> Result<TournamentStats, ArenaError> {
    if config.games == 0 {
        return Err(ArenaError::Config(
            "a tournament needs at least one game".into(),
        ));
    }
    if roster.agents.len() != AgentId::COUNT {
        return Err(ArenaError::Config(
            "a roster needs exactly five agents".into(),
        ));
    }
    std::fs::create_dir_all(&config.out_dir)?;
    let utterances = Arc::new(UtteranceEngine::builtin());
    let shared_http = match &config.llm {
        Some(llm_config) if config.mock.is_none() => {
            Some(Arc::new(HttpGateway::new(llm_config.clone())?))
        }
        _ => None,
    };

    let n = config.games as usize;
    let mut summaries: Vec<Option<Result<GameSummary, ArenaError>>> = Vec::new();
    summaries.resize_with(n, || None);
    if config.parallel <= 1 {
        for (i, slot) in summaries.iter_mut().enumerate() {
            *slot = Some(play_one(
                i as u32,
                roster,
                config,
                &utterances,
                &shared_http,
            ));
        }
    } else {
        let results = Mutex::new(&mut summaries);
        std::thread::scope(|scope| {
            for tid in 0..config.parallel {
                let results = &results;
                let utterances = &utterances;
                let shared_http = &shared_http;
                scope.spawn(move || {
                    let mut i = tid;
                    while i < n {
                        let summary = play_one(i as u32, roster, config, utterances, shared_http);
                        results.lock().expect("results lock")[i] = Some(summary);
                        i += config.parallel;
                    }
                });
            }
        });
    }

    let mut stats = TournamentStats {
        games: config.games as u64,
        ..Default::default()
    };
    let mut total_days = 0u64;
    for (name, slots) in roster_slots(roster) {
        stats.per_policy.insert(
            name,
            PolicyStats {
                slots,
                seat_games: slots as u64 * stats.games,
                ..Default::default()
            },
        );
    }
    for summary in summaries {
        let summary = summary.expect("every game scheduled")?;
        match summary.winner {
            Side::VillageSide => stats.village_wins += 1,
            Side::WolfSide => stats.wolf_wins += 1,
        }
        total_days += summary.days as u64;
        stats.contradictions += summary.contradictions;
        stats.crashes += summary.forfeit as u64;
        for (slot, entry) in roster.agents.iter().enumerate() {
            if summary.seat_sides[slot] == summary.winner {
                stats
                    .per_policy
                    .get_mut(entry.policy.name())
                    .expect("policy counted")
                    .wins += 1;
            }
        }
    }
    for policy in stats.per_policy.values_mut() {
        policy.rate = if policy.seat_games == 0 {
            0.0
        } else {
            policy.wins as f64 / policy.seat_games as f64
        };
    }
    stats.mean_days = total_days as f64 / stats.games as f64;

    let json = serde_json::to_string_pretty(&stats).expect("stats serialize");
    std::fs::write(config.out_dir.join("stats.json"), json)?;
    Ok(stats)
}

fn roster_slots(roster: &RosterSpec) -> BTreeMap<String, u32> {
    let mut slots: BTreeMap<String, u32> = BTreeMap::new();
    for entry in &roster.agents {
        *slots.entry(entry.policy.name().to_string()).or_default() += 1;
    }
    slots
}

/// Reads a log file and renders the requested analysis, exactly as the
/// extraction formats specify.
pub fn analyze_log(
    path: &Path,
    kind: Option<crate::analysis::AnalysisKind>,
) -> Result<String, ArenaError> {
    use crate::analysis::{
        extract_divinations, extract_votes, render_claims, render_votes, AnalysisKind,
    };
    let log = GameLog::read_file(path)?;
    let talks = log.talks();
    let votes = || render_votes(&extract_votes(&talks));
    let claims = || render_claims(&extract_divinations(&talks));
    Ok(match kind {
        Some(AnalysisKind::Vote) => votes(),
        Some(AnalysisKind::Seer) => claims(),
        None => format!("Vote analysis:\n{}\nSeer analysis:\n{}", votes(), claims()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn single_template_game_produces_log_and_stats() {
        let dir = tempdir().unwrap();
        let roster = RosterSpec::uniform(PolicyKind::TemplateOnly, RuleConfig::default());
        let config = TournamentConfig::new(1, 1, dir.path());
        let stats = run_tournament(&roster, &config).unwrap();
        assert_eq!(stats.games, 1);
        assert_eq!(stats.village_wins + stats.wolf_wins, 1);
        assert!(log_path(dir.path(), 0).exists());
        assert!(dir.path().join("stats.json").exists());
        let policy = &stats.per_policy["template_only"];
        assert_eq!(policy.slots, 5);
        assert_eq!(policy.seat_games, 5);
        assert!(policy.rate >= 0.0 && policy.rate <= 1.0);
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let roster = RosterSpec::uniform(PolicyKind::TemplateOnly, RuleConfig::default());
        let run = |out: &Path| {
            let config = TournamentConfig::new(4, 99, out);
            run_tournament(&roster, &config).unwrap();
            (0..4)
                .map(|i| std::fs::read_to_string(log_path(out, i)).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(dir_a.path()), run(dir_b.path()));
    }

    #[test]
    fn parallel_matches_serial() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let roster = RosterSpec::uniform(PolicyKind::TemplateOnly, RuleConfig::default());
        let serial = run_tournament(&roster, &TournamentConfig::new(6, 5, dir_a.path())).unwrap();
        let parallel = run_tournament(
            &roster,
            &TournamentConfig::new(6, 5, dir_b.path()).with_parallel(3),
        )
        .unwrap();
        assert_eq!(serial, parallel);
        for i in 0..6 {
            assert_eq!(
                std::fs::read_to_string(log_path(dir_a.path(), i)).unwrap(),
                std::fs::read_to_string(log_path(dir_b.path(), i)).unwrap(),
            );
        }
    }

    #[test]
    fn zero_games_is_a_config_error() {
        let dir = tempdir().unwrap();
        let roster = RosterSpec::uniform(PolicyKind::TemplateOnly, RuleConfig::default());
        let err = run_tournament(&roster, &TournamentConfig::new(0, 1, dir.path())).unwrap_err();
        assert!(matches!(err, ArenaError::Config(_)));
    }

    #[test]
    fn roster_file_parses_and_validates() {
        let dir = tempdir().unwrap();
        std::fs::write(dir.path().join("script.txt"), "hello\nSkip\n").unwrap();
        let roster_path = dir.path().join("roster.toml");
        std::fs::write(
            &roster_path,
            "[rules]\ncounter_co = false\n\n\
             [[agents]]\npolicy = \"template_only\"\npersona = \"Princess\"\n\
             [[agents]]\npolicy = \"hybrid\"\n\
             [[agents]]\npolicy = \"llm_only\"\n\
             [[agents]]\npolicy = \"scripted\"\nscript = \"script.txt\"\n\
             [[agents]]\npolicy = \"template_only\"\n",
        )
        .unwrap();
        let roster = RosterSpec::from_file(&roster_path).unwrap();
        assert_eq!(roster.agents.len(), 5);
        assert!(!roster.rules.counter_co);
        assert_eq!(roster.agents[0].persona, "Princess");
        assert_eq!(roster.agents[3].script.as_ref().unwrap().len(), 2);

        std::fs::write(
            dir.path().join("bad.toml"),
            "[[agents]]\npolicy = \"scripted\"\nscript = \"missing.txt\"\n",
        )
        .unwrap();
        assert!(RosterSpec::from_file(&dir.path().join("bad.toml")).is_err());
    }

    #[test]
    fn mixed_roster_reports_per_policy_rates() {
        let dir = tempdir().unwrap();
        let roster = RosterSpec::new(
            vec![
                RosterEntry::policy(PolicyKind::TemplateOnly),
                RosterEntry::policy(PolicyKind::TemplateOnly),
                RosterEntry::policy(PolicyKind::Hybrid),
                RosterEntry::policy(PolicyKind::Hybrid),
                RosterEntry::policy(PolicyKind::LlmOnly),
            ],
            RuleConfig::default(),
        )
        .unwrap();
        let config = TournamentConfig::new(3, 17, dir.path())
            .with_mock(MockScript::with_default("Let me think."));
        let stats = run_tournament(&roster, &config).unwrap();
        assert_eq!(stats.per_policy.len(), 3);
        assert_eq!(stats.per_policy["template_only"].slots, 2);
        assert_eq!(stats.per_policy["hybrid"].slots, 2);
        assert_eq!(stats.per_policy["llm_only"].slots, 1);
        let table = stats.render_table();
        assert!(table.contains("Games: 3"));
    }
}
