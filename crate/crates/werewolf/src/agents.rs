//! Ready-made agent policies.
//!
//! - [`PolicyAgent`] — the rule layer over templates, optionally fed by an
//!   LLM gateway (the hybrid agent) or running pure templates.
//! - [`LlmOnlyAgent`] — the unfiltered baseline: raw gateway output, no
//!   rules, no persona.
//! - [`ScriptedAgent`] — replays a fixed list of utterances; handy for
//!   reproducing known conversations in tests and logs.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_for_day, Backend};
use crate::game::{AgentId, Side, Species};
use crate::gateway::{Gateway, GenerationParams};
use crate::protocol::{Agent, AgentError, StatusMessage, TalkEntry, TalkResponse, SKIP_TOKEN};
use crate::rules::{AgentView, Choice, RuleConfig, RuleEngine};
use crate::utterance::{build_generation_prompt, Persona, TemplateId, UtteranceEngine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Hybrid,
    LlmOnly,
    TemplateOnly,
    Scripted,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Hybrid => "hybrid",
            PolicyKind::LlmOnly => "llm_only",
            PolicyKind::TemplateOnly => "template_only",
            PolicyKind::Scripted => "scripted",
        }
    }
}

/// First nonempty line of a completion, or nothing.
fn first_line(completion: &str) -> Option<String> {
    completion
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .map(str::to_string)
}

/// The hybrid agent (and its template-only ablation): talk analysis feeds
/// the rule engine, which picks a template, the LLM candidate, or the
/// close; personas style whatever goes out.
pub struct PolicyAgent {
    me: AgentId,
    kind: PolicyKind,
    persona: Persona,
    engine: RuleEngine,
    utterances: Arc<UtteranceEngine>,
    gateway: Option<Arc<dyn Gateway>>,
    params: GenerationParams,
    status: Option<StatusMessage>,
    history: Vec<TalkEntry>,
    divinations: Vec<(AgentId, Species)>,
    seed: u64,
}

impl PolicyAgent {
    pub fn template_only(
        me: AgentId,
        seed: u64,
        utterances: Arc<UtteranceEngine>,
        persona: Persona,
        config: RuleConfig,
    ) -> Self {
        PolicyAgent {
            me,
            kind: PolicyKind::TemplateOnly,
            persona,
            engine: RuleEngine::new(config),
            utterances,
            gateway: None,
            params: GenerationParams::default(),
            status: None,
            history: Vec::new(),
            divinations: Vec::new(),
            seed,
        }
    }

    /// Without a gateway the hybrid degrades to template-only behavior.
    pub fn hybrid(
        me: AgentId,
        seed: u64,
        utterances: Arc<UtteranceEngine>,
        persona: Persona,
        config: RuleConfig,
        gateway: Option<Arc<dyn Gateway>>,
    ) -> Self {
        PolicyAgent {
            gateway,
            kind: PolicyKind::Hybrid,
            ..Self::template_only(me, seed, utterances, persona, config)
        }
    }

    fn status(&self) -> Result<&StatusMessage, AgentError> {
        self.status
            .as_ref()
            .ok_or_else(|| AgentError::Crashed("no status received".into()))
    }

    fn view(&self, round: u32) -> Result<AgentView, AgentError> {
        let status = self.status()?.clone();
        let alive: BTreeSet<AgentId> = status.alive.iter().copied().collect();
        let backend = match (&self.gateway, self.kind) {
            (Some(gateway), PolicyKind::Hybrid) => Backend::Llm {
                gateway: gateway.as_ref(),
                fallback: true,
            },
            _ => Backend::Pattern,
        };
        let analysis = analyze_for_day(&self.history, &alive, status.day.max(1), backend)
            .map_err(|e| AgentError::Crashed(e.to_string()))?;
        Ok(AgentView {
            me: self.me,
            my_role: status.role,
            status,
            history: self.history.clone(),
            analysis,
            my_divinations: self.divinations.clone(),
            round,
            seed: self.seed,
        })
    }

    fn style_gateway(&self) -> Option<&dyn Gateway> {
        if self.persona.is_plain() {
            return None;
        }
        self.gateway.as_deref()
    }

    fn pick_candidate(&self, view: &AgentView) -> Option<String> {
        let gateway = self.gateway.as_ref()?;
        if self.kind != PolicyKind::Hybrid {
            return None;
        }
        let prompt = build_generation_prompt(&self.utterances, view);
        gateway
            .complete(&prompt, &self.params)
            .ok()
            .and_then(|c| first_line(&c))
    }

    fn pick_in(&self, choice: Option<AgentId>, candidates: &[AgentId]) -> AgentId {
        choice
            .filter(|c| candidates.contains(c))
            .unwrap_or(candidates[0])
    }
}

impl Agent for PolicyAgent {
    fn policy_name(&self) -> String {
        self.kind.name().to_string()
    }

    fn on_status(&mut self, status: &StatusMessage) -> Result<(), AgentError> {
        self.status = Some(status.clone());
        Ok(())
    }

    fn on_talk(&mut self, entry: &TalkEntry) -> Result<(), AgentError> {
        self.history.push(entry.clone());
        Ok(())
    }

    fn talk(&mut self, day: u32, round: u32, _turn: u32) -> Result<TalkResponse, AgentError> {
        // Close finality: once closed, the rest of the day is skips.
        if self.engine.memory().closed_day == Some(day) {
            return Ok(TalkResponse::skip());
        }
        let view = self.view(round)?;
        let candidate = self.pick_candidate(&view);
        let decision = self.engine.decide_utterance(&view, candidate.as_deref());
        let (text, tag) = match decision.choice {
            Choice::Close => {
                let rendered = self
                    .utterances
                    .render_template(TemplateId::Closing, &Default::default())
                    .map_err(|e| AgentError::Crashed(e.to_string()))?;
                (rendered.text, Some(rendered.tag))
            }
            Choice::UseTemplate { id, bindings } => {
                let rendered = self
                    .utterances
                    .render_template(id, &bindings)
                    .map_err(|e| AgentError::Crashed(e.to_string()))?;
                (rendered.text, Some(rendered.tag))
            }
            Choice::UseLlm => (candidate.unwrap_or_else(|| SKIP_TOKEN.to_string()), None),
        };
        let styled = self
            .utterances
            .stylize(&self.persona, &text, self.style_gateway());
        Ok(TalkResponse { text: styled, tag })
    }

    fn vote(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        let view = self.view(0)?;
        // Vote what was last declared; silence on the subject falls back
        // to the policy target.
        let declared = view
            .analysis
            .votes
            .iter()
            .find(|v| v.source == self.me)
            .map(|v| v.target)
            .filter(|t| candidates.contains(t));
        let target = declared.or_else(|| self.engine.choose_vote(&view).ok());
        Ok(self.pick_in(target, candidates))
    }

    fn divine(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        let view = self.view(0)?;
        Ok(self.pick_in(self.engine.choose_night_action(&view), candidates))
    }

    fn on_divine_result(
        &mut self,
        _day: u32,
        target: AgentId,
        species: Species,
    ) -> Result<(), AgentError> {
        self.divinations.push((target, species));
        Ok(())
    }

    fn attack(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        let view = self.view(0)?;
        Ok(self.pick_in(self.engine.choose_night_action(&view), candidates))
    }

    fn on_finish(&mut self, _day: u32, _winner: Side) -> Result<(), AgentError> {
        Ok(())
    }
}

/// The baseline: whatever the model says, verbatim. No rule layer, no
/// persona, no templates. Without a gateway it passes every turn.
pub struct LlmOnlyAgent {
    me: AgentId,
    gateway: Option<Arc<dyn Gateway>>,
    params: GenerationParams,
    utterances: Arc<UtteranceEngine>,
    status: Option<StatusMessage>,
    history: Vec<TalkEntry>,
    seed: u64,
}

impl LlmOnlyAgent {
    pub fn new(
        me: AgentId,
        seed: u64,
        utterances: Arc<UtteranceEngine>,
        gateway: Option<Arc<dyn Gateway>>,
    ) -> Self {
        LlmOnlyAgent {
            me,
            gateway,
            params: GenerationParams::default(),
            utterances,
            status: None,
            history: Vec::new(),
            seed,
        }
    }

    fn view(&self, round: u32) -> Result<AgentView, AgentError> {
        let status = self
            .status
            .clone()
            .ok_or_else(|| AgentError::Crashed("no status received".into()))?;
        Ok(AgentView {
            me: self.me,
            my_role: status.role,
            status,
            history: self.history.clone(),
            analysis: Default::default(),
            my_divinations: Vec::new(),
            round,
            seed: self.seed,
        })
    }

    fn completion(&self, prompt: &str) -> Option<String> {
        let gateway = self.gateway.as_ref()?;
        gateway
            .complete(prompt, &self.params)
            .ok()
            .and_then(|c| first_line(&c))
    }

    /// Earliest candidate name appearing in the completion.
    fn parse_target(completion: &str, candidates: &[AgentId]) -> Option<AgentId> {
        candidates
            .iter()
            .filter_map(|c| completion.find(&c.to_string()).map(|pos| (pos, *c)))
            .min_by_key(|&(pos, _)| pos)
            .map(|(_, c)| c)
    }

    fn choose(&self, round_prompt: &str, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        let view = self.view(0)?;
        let prompt = format!(
            "{}\n{round_prompt}",
            build_generation_prompt(&self.utterances, &view)
        );
        let target = self
            .completion(&prompt)
            .and_then(|c| Self::parse_target(&c, candidates))
            .unwrap_or(candidates[0]);
        Ok(target)
    }
}

impl Agent for LlmOnlyAgent {
    fn policy_name(&self) -> String {
        PolicyKind::LlmOnly.name().to_string()
    }

    fn on_status(&mut self, status: &StatusMessage) -> Result<(), AgentError> {
        self.status = Some(status.clone());
        Ok(())
    }

    fn on_talk(&mut self, entry: &TalkEntry) -> Result<(), AgentError> {
        self.history.push(entry.clone());
        Ok(())
    }

    fn talk(&mut self, _day: u32, round: u32, _turn: u32) -> Result<TalkResponse, AgentError> {
        let view = self.view(round)?;
        let prompt = build_generation_prompt(&self.utterances, &view);
        let text = self
            .completion(&prompt)
            .unwrap_or_else(|| SKIP_TOKEN.to_string());
        Ok(TalkResponse { text, tag: None })
    }

    fn vote(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        self.choose(
            "Name the one living agent you vote to exile, written exactly as Agent[0k].",
            candidates,
        )
    }

    fn divine(&mut self, _day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        self.choose(
            "Name the one living agent you divine tonight, written exactly as Agent[0k].",
            candidates,
        )
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
        self.choose(
            "Name the one living agent you attack tonight, written exactly as Agent[0k].",
            candidates,
        )
    }

    fn on_finish(&mut self, _day: u32, _winner: Side) -> Result<(), AgentError> {
        Ok(())
    }
}

/// Replays fixed utterances in order, then skips forever. Ballots follow
/// whatever the script last declared (so a scripted conversation stays
/// self-consistent); everything else defaults to the lowest-id candidate.
pub struct ScriptedAgent {
    lines: VecDeque<String>,
    me: Option<AgentId>,
    history: Vec<TalkEntry>,
}

impl ScriptedAgent {
    pub fn new(lines: Vec<String>) -> Self {
        ScriptedAgent {
            lines: lines.into(),
            me: None,
            history: Vec::new(),
        }
    }

    pub fn from_file(path: &std::path::Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::new(
            text.lines()
                .map(str::trim_end)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect(),
        ))
    }
}

impl Agent for ScriptedAgent {
    fn policy_name(&self) -> String {
        PolicyKind::Scripted.name().to_string()
    }

    fn on_status(&mut self, status: &StatusMessage) -> Result<(), AgentError> {
        self.me = Some(status.id);
        Ok(())
    }

    fn on_talk(&mut self, entry: &TalkEntry) -> Result<(), AgentError> {
        self.history.push(entry.clone());
        Ok(())
    }

    fn talk(&mut self, _day: u32, _round: u32, _turn: u32) -> Result<TalkResponse, AgentError> {
        let text = self
            .lines
            .pop_front()
            .unwrap_or_else(|| SKIP_TOKEN.to_string());
        Ok(TalkResponse { text, tag: None })
    }

    fn vote(&mut self, day: u32, candidates: &[AgentId]) -> Result<AgentId, AgentError> {
        let today: Vec<TalkEntry> = self
            .history
            .iter()
            .filter(|e| e.day == day)
            .cloned()
            .collect();
        let declared = self.me.and_then(|me| {
            crate::analysis::extract_votes(&today)
                .into_iter()
                .find(|v| v.source == me)
                .map(|v| v.target)
                .filter(|t| candidates.contains(t))
        });
        Ok(declared.unwrap_or(candidates[0]))
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

/// Convenience roster: five template-only agents with plain personas.
pub fn template_roster(seed: u64, config: RuleConfig) -> Vec<Box<dyn Agent>> {
    let utterances = Arc::new(UtteranceEngine::builtin());
    AgentId::all()
        .into_iter()
        .map(|id| {
            let agent_seed = crate::util::mix(&[seed, id.index() as u64]);
            Box::new(PolicyAgent::template_only(
                id,
                agent_seed,
                Arc::clone(&utterances),
                utterances.personas().plain().clone(),
                config,
            )) as Box<dyn Agent>
        })
        .collect()
}
