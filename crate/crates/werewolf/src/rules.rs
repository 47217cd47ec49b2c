//! Situation detection and decision making.
//!
//! The engine turns an [`AgentView`] into one of three verdicts: speak the
//! LLM's candidate utterance, speak a named template, or close the
//! conversation. It also picks vote and night-action targets. Everything
//! is a deterministic function of the view, the rule configuration, and a
//! small per-agent memory (the one-shot counter-CO flag and the closed-day
//! marker), so identical games replay identically.

use thiserror::Error;

use crate::analysis::{is_vote_question, AnalysisResult, DivinationClaim};
use crate::game::{AgentId, Role, Side, Species};
use crate::protocol::{StatusMessage, TalkEntry, TalkTag};
use crate::util;
use crate::utterance::{Bindings, TemplateId};

/// Tournament-level knobs for the rule layer.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RuleConfig {
    /// A werewolf accused by a lone seer claim counter-claims to be the
    /// real seer. Survival-critical; disable only for ablation runs.
    pub counter_co: bool,
    /// Probability that the possessed fakes a seer CO in its first talk
    /// round, drawn from the agent seed.
    pub fake_co_probability: f64,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            counter_co: true,
            fake_co_probability: 0.5,
        }
    }
}

/// Everything an agent knows when it decides: its own seat and role, the
/// latest status, the full talk history, the analysis (vote intents,
/// asked, and silence scoped to the current day; divination claims over
/// the whole game), its private divination results, the talk round, and
/// its decision seed. Never contains another agent's true role.
#[derive(Debug, Clone)]
pub struct AgentView {
    pub me: AgentId,
    pub my_role: Role,
    pub status: StatusMessage,
    pub history: Vec<TalkEntry>,
    pub analysis: AnalysisResult,
    pub my_divinations: Vec<(AgentId, Species)>,
    pub round: u32,
    pub seed: u64,
}

impl AgentView {
    pub fn day(&self) -> u32 {
        self.status.day
    }

    pub fn is_alive(&self, id: AgentId) -> bool {
        self.status.alive.contains(&id)
    }

    pub fn others_alive(&self) -> Vec<AgentId> {
        self.status
            .alive
            .iter()
            .copied()
            .filter(|&id| id != self.me)
            .collect()
    }

    fn today(&self) -> impl Iterator<Item = &TalkEntry> {
        let day = self.day();
        self.history.iter().filter(move |e| e.day == day)
    }

    fn my_claims(&self) -> Vec<&DivinationClaim> {
        self.analysis
            .claims
            .iter()
            .filter(|c| c.claimant == self.me)
            .collect()
    }

    /// Claims that I am a werewolf, in claim order.
    fn accusations_against_me(&self) -> Vec<&DivinationClaim> {
        self.analysis
            .claims
            .iter()
            .filter(|c| c.target == self.me && c.claimed == Species::Werewolf)
            .collect()
    }

    /// Distinct claimants other than me, in first-claim order.
    fn other_claimants(&self) -> Vec<AgentId> {
        let mut seen = Vec::new();
        for claim in &self.analysis.claims {
            if claim.claimant != self.me && !seen.contains(&claim.claimant) {
                seen.push(claim.claimant);
            }
        }
        seen
    }

    fn my_declared_vote(&self) -> Option<AgentId> {
        self.analysis
            .votes
            .iter()
            .find(|v| v.source == self.me)
            .map(|v| v.target)
    }

    /// The latest directed utterance at me today that I have not yet
    /// answered with a substantive turn.
    fn unanswered_mention(&self) -> Option<&TalkEntry> {
        let today: Vec<&TalkEntry> = self.today().collect();
        let at_me = today
            .iter()
            .rposition(|e| e.mention == Some(self.me) && e.speaker != self.me)?;
        let answered = today[at_me + 1..]
            .iter()
            .any(|e| e.speaker == self.me && !e.is_pass());
        if answered {
            None
        } else {
            Some(today[at_me])
        }
    }

    /// Position of the last substantive thing I said, as an ordinal into
    /// the full history (the scale divination-claim turns use).
    fn my_last_talk_ordinal(&self) -> Option<usize> {
        self.history
            .iter()
            .enumerate()
            .filter(|(_, e)| e.speaker == self.me && !e.is_pass())
            .map(|(i, _)| i)
            .next_back()
    }

    /// True once I have already called this rival's claim fake, either
    /// with the denunciation template or with my own counter-claim.
    fn already_denounced(&self, rival: AgentId) -> bool {
        self.history.iter().any(|e| {
            e.speaker == self.me
                && matches!(
                    e.tag,
                    Some(TalkTag::AccuseFake { rival: r }) if r == rival
                )
        }) || self
            .my_claims()
            .iter()
            .any(|c| c.target == rival && c.claimed == Species::Werewolf)
    }

    fn defended_today(&self) -> bool {
        self.today().any(|e| {
            e.speaker == self.me && matches!(e.tag, Some(TalkTag::DivinedHumanDefense { .. }))
        })
    }
}

/// The fourteen detectable situations, in fixed priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SituationTag {
    /// 1: nothing has been said yet; open with a greeting.
    NoHistory,
    /// 2: the seer holds a result it has never disclosed.
    SeerCo { target: AgentId, species: Species },
    /// 3: the seer has a newer result than its last disclosure.
    SeerResultUpdate { target: AgentId, species: Species },
    /// 4: a lone seer claim calls me (the werewolf) a werewolf.
    AccusedAsWolf { rival: AgentId },
    /// 5: a claim calls me (a human) a werewolf; refute in free text.
    AccusedInnocent { accuser: AgentId },
    /// 6: I claimed seer and someone else also claims it.
    RivalSeerPresent { rival: AgentId },
    /// 7: I was divined human; cite it while under suspicion.
    DivinedHumanDefense { by: AgentId },
    /// 8: someone has not given a vote target; ask them directly.
    AskVote { target: AgentId },
    /// 9: a directed utterance at me awaits a reply.
    MentionedDirectly { by: AgentId },
    /// 10: every other player has declared, been asked, or gone silent.
    AllDecided,
    /// 11: state (or restate) my own vote target.
    VoteDeclaration { target: AgentId },
    /// 12: the possessed fakes a seer CO in its first round.
    PossessedFakeCo { target: AgentId },
    /// 13: every other player is voting for me and I am human.
    BandwagonCheck,
    /// 14: nothing specific; free talk.
    Fallback,
}

/// What to say this turn.
#[derive(Debug, Clone, PartialEq)]
pub enum Choice {
    /// Speak the LLM candidate as-is.
    UseLlm,
    /// Speak a rendered template.
    UseTemplate { id: TemplateId, bindings: Bindings },
    /// Terminate the conversation (the closing template is the last word).
    Close,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceDecision {
    pub choice: Choice,
    pub rationale: Vec<SituationTag>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("no legal target: nobody else is alive")]
    NoLegalTarget,
}

/// Per-agent, per-game memory.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleMemory {
    pub counter_co_used: bool,
    pub closed_day: Option<u32>,
}

pub struct RuleEngine {
    config: RuleConfig,
    memory: RuleMemory,
}

impl RuleEngine {
    pub fn new(config: RuleConfig) -> Self {
        RuleEngine {
            config,
            memory: RuleMemory::default(),
        }
    }

    pub fn config(&self) -> &RuleConfig {
        &self.config
    }

    pub fn memory(&self) -> &RuleMemory {
        &self.memory
    }

    /// The werewolf counter-CO condition: exactly one claimant says I am
    /// a werewolf, I hold the werewolf role, and I have not claimed seer
    /// myself yet. Returns the rival claimant.
    pub fn counter_co_trigger(&self, view: &AgentView) -> Option<AgentId> {
        if view.my_role != Role::Werewolf || !view.my_claims().is_empty() {
            return None;
        }
        let accusers: Vec<AgentId> = {
            let mut seen = Vec::new();
            for claim in view.accusations_against_me() {
                if !seen.contains(&claim.claimant) {
                    seen.push(claim.claimant);
                }
            }
            seen
        };
        match accusers.as_slice() {
            [lone] => Some(*lone),
            _ => None,
        }
    }

    /// True when every other living agent has declared a vote target,
    /// been asked for one, or gone silent.
    pub fn closing_trigger(&self, view: &AgentView) -> bool {
        let sources: Vec<AgentId> = view.analysis.votes.iter().map(|v| v.source).collect();
        view.others_alive().into_iter().all(|other| {
            sources.contains(&other)
                || view.analysis.asked.contains(&other)
                || view.analysis.silent.contains(&other)
        })
    }

    /// Lowest-id living agent (other than me) that has neither declared
    /// nor been asked nor gone silent.
    pub fn pick_mention_target(&self, view: &AgentView) -> Option<AgentId> {
        let sources: Vec<AgentId> = view.analysis.votes.iter().map(|v| v.source).collect();
        view.others_alive().into_iter().find(|other| {
            !sources.contains(other)
                && !view.analysis.asked.contains(other)
                && !view.analysis.silent.contains(other)
        })
    }

    fn fake_co_draw(&self, view: &AgentView) -> bool {
        self.config.fake_co_probability > 0.0
            && util::unit(&[view.seed, 0xFA_CE, view.day() as u64])
                < self.config.fake_co_probability
    }

    /// All matching situations in fixed priority order.
    pub fn detect_situations(&self, view: &AgentView) -> Vec<SituationTag> {
        let mut tags = Vec::new();

        if view.history.is_empty() {
            tags.push(SituationTag::NoHistory);
        }

        if view.my_role == Role::Seer {
            if let Some(&(target, species)) = view.my_divinations.last() {
                let mine = view.my_claims();
                let already = mine
                    .iter()
                    .any(|c| c.target == target && c.claimed == species);
                if mine.is_empty() {
                    tags.push(SituationTag::SeerCo { target, species });
                } else if !already {
                    tags.push(SituationTag::SeerResultUpdate { target, species });
                }
            }
        }

        if let Some(rival) = self.counter_co_trigger(view) {
            tags.push(SituationTag::AccusedAsWolf { rival });
        }

        if view.my_role.species() == Species::Human && view.my_claims().is_empty() {
            if let Some(accusation) = view.accusations_against_me().last() {
                let unanswered = view
                    .my_last_talk_ordinal()
                    .is_none_or(|mine| mine < accusation.turn);
                if unanswered {
                    tags.push(SituationTag::AccusedInnocent {
                        accuser: accusation.claimant,
                    });
                }
            }
        }

        if !view.my_claims().is_empty() {
            if let Some(rival) = view
                .other_claimants()
                .into_iter()
                .find(|&c| view.is_alive(c) && !view.already_denounced(c))
            {
                tags.push(SituationTag::RivalSeerPresent { rival });
            }
        }

        if !view.defended_today() {
            let divined_human = view
                .analysis
                .claims
                .iter()
                .rfind(|c| c.target == view.me && c.claimed == Species::Human);
            if let Some(claim) = divined_human {
                let suspected = !view.accusations_against_me().is_empty()
                    || view.analysis.votes.iter().any(|v| v.target == view.me);
                if suspected {
                    tags.push(SituationTag::DivinedHumanDefense { by: claim.claimant });
                }
            }
        }

        let closing = self.closing_trigger(view);
        if !closing {
            if let Some(target) = self.pick_mention_target(view) {
                tags.push(SituationTag::AskVote { target });
            }
        }

        if let Some(entry) = view.unanswered_mention() {
            tags.push(SituationTag::MentionedDirectly { by: entry.speaker });
        }

        if closing {
            tags.push(SituationTag::AllDecided);
        }

        if let Ok(target) = self.choose_vote(view) {
            let asked_me = view
                .unanswered_mention()
                .map(is_vote_question)
                .unwrap_or(false);
            let evidence = !view.analysis.claims.is_empty()
                || view.analysis.votes.iter().any(|v| v.source != view.me);
            let stale = view.my_declared_vote() != Some(target);
            if asked_me || (evidence && stale) {
                tags.push(SituationTag::VoteDeclaration { target });
            }
        }

        if view.my_role == Role::Possessed
            && view.day() == 1
            && view.round == 1
            && view.my_claims().is_empty()
            && self.fake_co_draw(view)
        {
            if let Some(&target) = view.others_alive().first() {
                tags.push(SituationTag::PossessedFakeCo { target });
            }
        }

        if view.my_role.species() == Species::Human {
            let others = view.others_alive();
            let all_on_me = !others.is_empty()
                && others.iter().all(|other| {
                    view.analysis
                        .votes
                        .iter()
                        .any(|v| v.source == *other && v.target == view.me)
                });
            if all_on_me {
                tags.push(SituationTag::BandwagonCheck);
            }
        }

        tags.push(SituationTag::Fallback);
        tags
    }

    /// Picks what to say. Priority: the counter-CO lie, then a first seer
    /// disclosure, then closing, then answering a directed utterance,
    /// then the remaining template situations, then the LLM candidate.
    /// Without a candidate, LLM turns fall back to the generic template.
    pub fn decide_utterance(
        &mut self,
        view: &AgentView,
        llm_candidate: Option<&str>,
    ) -> UtteranceDecision {
        let rationale = self.detect_situations(view);
        let decide = |choice: Choice| UtteranceDecision {
            choice,
            rationale: rationale.clone(),
        };
        let llm_or_generic = |candidate: Option<&str>| match candidate {
            Some(_) => Choice::UseLlm,
            None => Choice::UseTemplate {
                id: TemplateId::Generic,
                bindings: Bindings::default(),
            },
        };

        if self.config.counter_co && !self.memory.counter_co_used {
            if let Some(rival) = self.counter_co_trigger(view) {
                self.memory.counter_co_used = true;
                return decide(Choice::UseTemplate {
                    id: TemplateId::CounterCo,
                    bindings: Bindings::default().me(view.me).rival(rival),
                });
            }
        }

        if let Some(SituationTag::SeerCo { target, species }) = rationale
            .iter()
            .find(|t| matches!(t, SituationTag::SeerCo { .. }))
        {
            return decide(Choice::UseTemplate {
                id: TemplateId::SeerCo,
                bindings: Bindings::default()
                    .me(view.me)
                    .target(*target)
                    .species(*species),
            });
        }

        if self.closing_trigger(view) && self.memory.closed_day != Some(view.day()) {
            self.memory.closed_day = Some(view.day());
            return decide(Choice::Close);
        }

        if let Some(entry) = view.unanswered_mention() {
            if is_vote_question(entry) {
                if let Ok(target) = self.choose_vote(view) {
                    return decide(Choice::UseTemplate {
                        id: TemplateId::VoteDeclaration,
                        bindings: Bindings::default().me(view.me).target(target),
                    });
                }
            }
            return decide(llm_or_generic(llm_candidate));
        }

        // Remaining template situations. The possessed's fake CO mirrors
        // the real seer's disclosure and must beat the greeting; own
        // declarations come before asking others so the asked chain does
        // not stall the closing condition.
        for tag in &rationale {
            if let SituationTag::PossessedFakeCo { target } = *tag {
                return decide(Choice::UseTemplate {
                    id: TemplateId::FakeCo,
                    bindings: Bindings::default()
                        .me(view.me)
                        .target(target)
                        .species(Species::Human),
                });
            }
        }
        for tag in &rationale {
            let choice = match *tag {
                SituationTag::NoHistory => Choice::UseTemplate {
                    id: TemplateId::Greeting,
                    bindings: Bindings::default().me(view.me),
                },
                SituationTag::SeerResultUpdate { target, species } => Choice::UseTemplate {
                    id: TemplateId::SeerResultUpdate,
                    bindings: Bindings::default()
                        .me(view.me)
                        .target(target)
                        .species(species),
                },
                SituationTag::RivalSeerPresent { rival } => Choice::UseTemplate {
                    id: TemplateId::RivalSeerFake,
                    bindings: Bindings::default().me(view.me).rival(rival),
                },
                SituationTag::DivinedHumanDefense { by } => Choice::UseTemplate {
                    id: TemplateId::DivinedHumanDefense,
                    bindings: Bindings::default().me(view.me).rival(by),
                },
                SituationTag::AccusedInnocent { .. } => llm_or_generic(llm_candidate),
                _ => continue,
            };
            return decide(choice);
        }
        if let Some(SituationTag::VoteDeclaration { target }) = rationale
            .iter()
            .find(|t| matches!(t, SituationTag::VoteDeclaration { .. }))
        {
            return decide(Choice::UseTemplate {
                id: TemplateId::VoteDeclaration,
                bindings: Bindings::default().me(view.me).target(*target),
            });
        }
        if let Some(SituationTag::AskVote { target }) = rationale
            .iter()
            .find(|t| matches!(t, SituationTag::AskVote { .. }))
        {
            return decide(Choice::UseTemplate {
                id: TemplateId::AskVote,
                bindings: Bindings::default().me(view.me).target(*target),
            });
        }

        decide(llm_or_generic(llm_candidate))
    }

    /// Vote policy. Village side: trust divination/claim evidence, then
    /// the declared plurality, then the lowest id. Wolf side: remove the
    /// rival claimant, then follow the plurality, then the lowest id. The
    /// possessed infers which claimant to protect once a rival claimant
    /// has been eliminated (a dead claimant cannot be the werewolf, so a
    /// sole surviving claimant most likely is).
    pub fn choose_vote(&self, view: &AgentView) -> Result<AgentId, RuleError> {
        let others = view.others_alive();
        if others.is_empty() {
            return Err(RuleError::NoLegalTarget);
        }
        let fallback = others[0];

        let target = match view.my_role.side() {
            Side::VillageSide => self
                .village_evidence_target(view)
                .or_else(|| self.declared_plurality(view))
                .unwrap_or(fallback),
            Side::WolfSide => self
                .wolf_side_target(view)
                .or_else(|| self.declared_plurality(view))
                .unwrap_or(fallback),
        };
        Ok(target)
    }

    /// For the village side: my own werewolf divination first, then the
    /// set of living agents claimed werewolf, picked uniformly (seeded)
    /// when rival claims disagree.
    fn village_evidence_target(&self, view: &AgentView) -> Option<AgentId> {
        if view.my_role == Role::Seer {
            if let Some(&(target, _)) = view
                .my_divinations
                .iter()
                .rev()
                .find(|&&(t, s)| s == Species::Werewolf && view.is_alive(t) && t != view.me)
            {
                return Some(target);
            }
        }
        let mut candidates: Vec<AgentId> = Vec::new();
        for claim in &view.analysis.claims {
            if claim.claimed == Species::Werewolf
                && claim.target != view.me
                && view.is_alive(claim.target)
                && !candidates.contains(&claim.target)
            {
                candidates.push(claim.target);
            }
        }
        match candidates.len() {
            0 => None,
            1 => Some(candidates[0]),
            n => {
                let idx = util::pick(
                    &[view.seed, 0x707E, view.day() as u64, view.me.index() as u64],
                    n,
                );
                Some(candidates[idx])
            }
        }
    }

    fn wolf_side_target(&self, view: &AgentView) -> Option<AgentId> {
        match view.my_role {
            Role::Werewolf => {
                if let Some(claim) = view.accusations_against_me().into_iter().next_back() {
                    if view.is_alive(claim.claimant) {
                        return Some(claim.claimant);
                    }
                }
                view.other_claimants()
                    .into_iter()
                    .find(|&c| view.is_alive(c))
            }
            Role::Possessed => {
                let claimants = view.other_claimants();
                let alive: Vec<AgentId> = claimants
                    .iter()
                    .copied()
                    .filter(|&c| view.is_alive(c))
                    .collect();
                let any_dead = claimants.iter().any(|&c| !view.is_alive(c));
                if any_dead && alive.len() == 1 {
                    // The dead claimant was proven human by surviving the
                    // reveal, so the live one is almost surely the wolf.
                    // Support it: follow its declared vote, never vote it.
                    let wolf = alive[0];
                    if let Some(vote) = view.analysis.votes.iter().find(|v| v.source == wolf) {
                        if vote.target != view.me && view.is_alive(vote.target) {
                            return Some(vote.target);
                        }
                    }
                    return view.others_alive().into_iter().find(|&id| id != wolf);
                }
                alive.first().copied()
            }
            _ => None,
        }
    }

    /// Plurality target of the other agents' declared votes, skipping me
    /// and the dead; ties break to the lowest id.
    fn declared_plurality(&self, view: &AgentView) -> Option<AgentId> {
        let mut tally: std::collections::BTreeMap<AgentId, usize> = Default::default();
        for vote in &view.analysis.votes {
            if vote.source != view.me && vote.target != view.me && view.is_alive(vote.target) {
                *tally.entry(vote.target).or_default() += 1;
            }
        }
        let top = tally.values().copied().max()?;
        tally.into_iter().find(|&(_, n)| n == top).map(|(id, _)| id)
    }

    /// Night targeting. The seer divines the lowest-id living agent it
    /// has not divined yet; the werewolf removes the claimant threatening
    /// it, else the lowest id. Roles without a night action return none.
    pub fn choose_night_action(&self, view: &AgentView) -> Option<AgentId> {
        let others = view.others_alive();
        match view.my_role {
            Role::Seer => {
                let divined: Vec<AgentId> = view.my_divinations.iter().map(|&(t, _)| t).collect();
                others
                    .iter()
                    .copied()
                    .find(|t| !divined.contains(t))
                    .or_else(|| others.first().copied())
            }
            Role::Werewolf => {
                if let Some(claim) = view.accusations_against_me().into_iter().next_back() {
                    if view.is_alive(claim.claimant) {
                        return Some(claim.claimant);
                    }
                }
                view.other_claimants()
                    .into_iter()
                    .find(|&c| view.is_alive(c))
                    .or_else(|| others.first().copied())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::VoteIntent;
    use crate::game::PhaseKind;
    use std::collections::BTreeSet;

    fn agent(i: u8) -> AgentId {
        AgentId::new(i).unwrap()
    }

    fn status(me: u8, role: Role, alive: &[u8], day: u32) -> StatusMessage {
        let alive: Vec<AgentId> = alive.iter().map(|&i| agent(i)).collect();
        let dead = AgentId::all()
            .into_iter()
            .filter(|id| !alive.contains(id))
            .collect();
        StatusMessage {
            id: agent(me),
            role,
            alive,
            dead,
            day,
            phase: PhaseKind::DayTalk,
        }
    }

    fn view(me: u8, role: Role) -> AgentView {
        AgentView {
            me: agent(me),
            my_role: role,
            status: status(me, role, &[1, 2, 3, 4, 5], 1),
            history: vec![],
            analysis: AnalysisResult::default(),
            my_divinations: vec![],
            round: 1,
            seed: 7,
        }
    }

    fn claim(claimant: u8, target: u8, species: Species, turn: usize) -> DivinationClaim {
        DivinationClaim {
            claimant: agent(claimant),
            target: agent(target),
            claimed: species,
            turn,
        }
    }

    fn vote(source: u8, target: u8, turn: usize) -> VoteIntent {
        VoteIntent {
            source: agent(source),
            target: agent(target),
            turn,
        }
    }

    fn talk(day: u32, turn: u32, speaker: u8, text: &str) -> TalkEntry {
        TalkEntry::new(day, turn, agent(speaker), text, None)
    }

    fn engine() -> RuleEngine {
        RuleEngine::new(RuleConfig::default())
    }

    #[test]
    fn empty_history_detects_the_greeting_situation() {
        let tags = engine().detect_situations(&view(1, Role::Villager));
        assert!(tags.contains(&SituationTag::NoHistory));
        assert_eq!(*tags.last().unwrap(), SituationTag::Fallback);
    }

    #[test]
    fn lone_accusation_triggers_counter_co_for_the_wolf_only() {
        let mut v = view(2, Role::Werewolf);
        v.history.push(talk(
            1,
            1,
            5,
            "I am a seer. As a result of the divination, Agent[02] was a werewolf.",
        ));
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        let e = engine();
        assert_eq!(e.counter_co_trigger(&v), Some(agent(5)));
        assert!(e
            .detect_situations(&v)
            .contains(&SituationTag::AccusedAsWolf { rival: agent(5) }));

        // Same accusation against a villager: no counter-CO.
        let mut innocent = view(2, Role::Villager);
        innocent.history = v.history.clone();
        innocent.analysis = v.analysis.clone();
        assert_eq!(e.counter_co_trigger(&innocent), None);
        assert!(e
            .detect_situations(&innocent)
            .contains(&SituationTag::AccusedInnocent { accuser: agent(5) }));
    }

    #[test]
    fn no_claims_means_no_counter_co() {
        assert_eq!(engine().counter_co_trigger(&view(2, Role::Werewolf)), None);
    }

    #[test]
    fn two_accusers_do_not_trigger_counter_co() {
        let mut v = view(2, Role::Werewolf);
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        v.analysis.claims.push(claim(3, 2, Species::Werewolf, 1));
        assert_eq!(engine().counter_co_trigger(&v), None);
    }

    #[test]
    fn counter_co_fires_once_per_game() {
        let mut v = view(2, Role::Werewolf);
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        let mut e = engine();
        let first = e.decide_utterance(&v, None);
        assert!(matches!(
            first.choice,
            Choice::UseTemplate {
                id: TemplateId::CounterCo,
                ..
            }
        ));
        // Wolf's own claim now exists in the analysis; even without it,
        // the memory flag blocks a second counter-CO.
        let second = e.decide_utterance(&v, None);
        assert!(!matches!(
            second.choice,
            Choice::UseTemplate {
                id: TemplateId::CounterCo,
                ..
            }
        ));
    }

    #[test]
    fn counter_co_respects_the_config_switch() {
        let mut v = view(2, Role::Werewolf);
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        let mut e = RuleEngine::new(RuleConfig {
            counter_co: false,
            ..RuleConfig::default()
        });
        let decision = e.decide_utterance(&v, None);
        assert!(!matches!(
            decision.choice,
            Choice::UseTemplate {
                id: TemplateId::CounterCo,
                ..
            }
        ));
    }

    #[test]
    fn seer_disclosure_beats_everything_but_counter_co() {
        let mut v = view(2, Role::Seer);
        v.my_divinations.push((agent(5), Species::Werewolf));
        let mut e = engine();
        let decision = e.decide_utterance(&v, None);
        assert!(matches!(
            decision.choice,
            Choice::UseTemplate {
                id: TemplateId::SeerCo,
                ..
            }
        ));
    }

    #[test]
    fn closing_trigger_counts_declared_asked_and_silent() {
        let mut v = view(1, Role::Villager);
        v.analysis.votes.push(vote(2, 5, 0));
        v.analysis.votes.push(vote(3, 5, 1));
        v.analysis.votes.push(vote(4, 5, 2));
        v.analysis.silent.insert(agent(5));
        assert!(engine().closing_trigger(&v));

        v.analysis.silent.clear();
        assert!(
            !engine().closing_trigger(&v),
            "agent 5 undeclared and talking"
        );
        let mut e = engine();
        let decision = e.decide_utterance(&v, None);
        assert!(!matches!(decision.choice, Choice::Close));
    }

    #[test]
    fn closing_brute_force_over_all_combinations() {
        // Each of the four others is declared, silent, or
        // undeclared-and-talking; the trigger must be true exactly when
        // nobody is undeclared-and-talking.
        for mask in 0..81u32 {
            let mut v = view(1, Role::Villager);
            let mut states = mask;
            let mut any_undeclared = false;
            for (slot, other) in [2u8, 3, 4, 5].into_iter().enumerate() {
                match states % 3 {
                    0 => v
                        .analysis
                        .votes
                        .push(vote(other, if other == 5 { 4 } else { 5 }, slot)),
                    1 => {
                        v.analysis.silent.insert(agent(other));
                    }
                    _ => any_undeclared = true,
                }
                states /= 3;
            }
            assert_eq!(engine().closing_trigger(&v), !any_undeclared, "mask {mask}");
        }
    }

    #[test]
    fn closing_decision_is_close_with_the_all_decided_rationale() {
        let mut v = view(1, Role::Villager);
        for (i, other) in [2u8, 3, 4, 5].into_iter().enumerate() {
            v.analysis
                .votes
                .push(vote(other, if other == 5 { 1 } else { 5 }, i));
        }
        // Agent 5 votes me; others vote 5. All declared, so close.
        let mut e = engine();
        let decision = e.decide_utterance(&v, None);
        assert_eq!(decision.choice, Choice::Close);
        assert!(decision.rationale.contains(&SituationTag::AllDecided));
    }

    #[test]
    fn mention_target_walks_lowest_ids_through_the_asked_set() {
        let mut v = view(1, Role::Villager);
        v.analysis.votes.push(vote(2, 5, 0));
        assert_eq!(engine().pick_mention_target(&v), Some(agent(3)));
        v.analysis.asked.insert(agent(3));
        assert_eq!(engine().pick_mention_target(&v), Some(agent(4)));
        v.analysis.asked.insert(agent(4));
        v.analysis.silent.insert(agent(5));
        assert_eq!(engine().pick_mention_target(&v), None);
    }

    #[test]
    fn vote_question_at_me_is_answered_with_a_declaration() {
        let mut v = view(3, Role::Villager);
        v.history
            .push(talk(1, 1, 2, ">>Agent[03] whom will you vote for?"));
        v.analysis.asked.insert(agent(3));
        v.analysis.claims.push(claim(5, 4, Species::Werewolf, 0));
        let mut e = engine();
        let decision = e.decide_utterance(&v, None);
        match decision.choice {
            Choice::UseTemplate {
                id: TemplateId::VoteDeclaration,
                bindings,
            } => {
                assert_eq!(bindings.target, Some(agent(4)));
            }
            other => panic!("expected a declaration, got {other:?}"),
        }
    }

    #[test]
    fn non_vote_mention_uses_the_llm_with_generic_fallback() {
        let mut v = view(3, Role::Villager);
        v.history.push(talk(1, 1, 2, ">>Agent[03] say something."));
        let mut e = engine();
        assert_eq!(e.decide_utterance(&v, Some("fine.")).choice, Choice::UseLlm);
        let decision = e.decide_utterance(&v, None);
        assert!(matches!(
            decision.choice,
            Choice::UseTemplate {
                id: TemplateId::Generic,
                ..
            }
        ));
    }

    #[test]
    fn answered_mentions_stop_triggering() {
        let mut v = view(3, Role::Villager);
        v.history.push(talk(1, 1, 2, ">>Agent[03] say something."));
        v.history.push(talk(1, 2, 3, "I already did."));
        assert!(v.unanswered_mention().is_none());
    }

    #[test]
    fn uncovered_agents_get_asked_before_free_talk() {
        let mut v = view(1, Role::Villager);
        v.history.push(talk(1, 1, 2, "Morning."));
        let mut e = engine();
        let decision = e.decide_utterance(&v, Some("thinking..."));
        match decision.choice {
            Choice::UseTemplate {
                id: TemplateId::AskVote,
                bindings,
            } => {
                assert_eq!(bindings.target, Some(agent(2)));
            }
            other => panic!("expected an ask, got {other:?}"),
        }
    }

    #[test]
    fn default_branch_uses_the_candidate_after_closing_once() {
        let mut v = view(1, Role::Villager);
        v.history.push(talk(1, 1, 2, "Morning."));
        for other in [2u8, 3, 4, 5] {
            v.analysis.asked.insert(agent(other));
        }
        let mut e = engine();
        assert_eq!(
            e.decide_utterance(&v, Some("thinking...")).choice,
            Choice::Close
        );
        // Already closed today: nothing specific is left, so the next
        // turn falls through to the candidate (or the generic template).
        assert_eq!(
            e.decide_utterance(&v, Some("thinking...")).choice,
            Choice::UseLlm
        );
        let decision = e.decide_utterance(&v, None);
        assert!(matches!(
            decision.choice,
            Choice::UseTemplate {
                id: TemplateId::Generic,
                ..
            }
        ));
    }

    #[test]
    fn village_vote_trusts_claims_then_plurality_then_lowest() {
        // A claim marks agent 2 as werewolf.
        let mut v = view(1, Role::Villager);
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(2));

        // No claims: follow the declared plurality (4, 4, 3 -> 4).
        let mut v = view(1, Role::Villager);
        v.analysis.votes.push(vote(2, 4, 0));
        v.analysis.votes.push(vote(3, 4, 1));
        v.analysis.votes.push(vote(5, 3, 2));
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(4));

        // Nothing at all: lowest-id other.
        let v = view(3, Role::Villager);
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(1));
    }

    #[test]
    fn wolf_votes_its_accuser() {
        let mut v = view(2, Role::Werewolf);
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(5));
    }

    #[test]
    fn seer_votes_its_own_divination_over_claims() {
        let mut v = view(2, Role::Seer);
        v.my_divinations.push((agent(4), Species::Werewolf));
        v.analysis.claims.push(claim(4, 2, Species::Werewolf, 1));
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(4));
    }

    #[test]
    fn villager_splits_between_rival_claims_deterministically() {
        let make = |seed| {
            let mut v = view(3, Role::Villager);
            v.seed = seed;
            v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
            v.analysis.claims.push(claim(2, 5, Species::Werewolf, 1));
            v
        };
        let e = engine();
        let picks: BTreeSet<AgentId> = (0..64).map(|s| e.choose_vote(&make(s)).unwrap()).collect();
        assert_eq!(
            picks,
            BTreeSet::from([agent(2), agent(5)]),
            "both claimants reachable"
        );
        assert_eq!(
            e.choose_vote(&make(9)).unwrap(),
            e.choose_vote(&make(9)).unwrap()
        );
    }

    #[test]
    fn possessed_votes_the_first_claimant_while_all_claimants_live() {
        let mut v = view(4, Role::Possessed);
        v.analysis.claims.push(claim(2, 5, Species::Werewolf, 0));
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 1));
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(2));
    }

    #[test]
    fn possessed_supports_the_surviving_claimant_after_an_elimination() {
        let mut v = view(4, Role::Possessed);
        v.status = status(4, Role::Possessed, &[3, 4, 5], 2);
        // Agent 2 (a claimant) is dead; agent 5 counter-claimed and lives.
        v.analysis.claims.push(claim(2, 5, Species::Werewolf, 0));
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 1));
        // The survivor declared its vote: follow it.
        v.analysis.votes.push(vote(5, 3, 0));
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(3));
        // Without a declaration, never vote the survivor.
        v.analysis.votes.clear();
        assert_eq!(engine().choose_vote(&v).unwrap(), agent(3));
    }

    #[test]
    fn choose_vote_never_picks_self_or_dead() {
        let mut v = view(3, Role::Villager);
        v.status = status(3, Role::Villager, &[1, 3, 5], 2);
        v.analysis.claims.push(claim(5, 3, Species::Werewolf, 0)); // accuses me
        v.analysis.claims.push(claim(1, 4, Species::Werewolf, 1)); // dead target
        let target = engine().choose_vote(&v).unwrap();
        assert_ne!(target, agent(3));
        assert!(v.is_alive(target));
    }

    #[test]
    fn seer_divines_lowest_undivined() {
        let mut v = view(2, Role::Seer);
        assert_eq!(engine().choose_night_action(&v), Some(agent(1)));
        v.my_divinations.push((agent(1), Species::Human));
        assert_eq!(engine().choose_night_action(&v), Some(agent(3)));
    }

    #[test]
    fn seer_in_seat_one_divines_seat_two_first() {
        let v = view(1, Role::Seer);
        assert_eq!(engine().choose_night_action(&v), Some(agent(2)));
    }

    #[test]
    fn wolf_attacks_the_living_claimant() {
        let mut v = view(2, Role::Werewolf);
        v.analysis.claims.push(claim(5, 1, Species::Human, 0));
        assert_eq!(engine().choose_night_action(&v), Some(agent(5)));
    }

    #[test]
    fn villager_has_no_night_action() {
        assert_eq!(engine().choose_night_action(&view(3, Role::Villager)), None);
        assert_eq!(
            engine().choose_night_action(&view(3, Role::Possessed)),
            None
        );
    }

    #[test]
    fn fake_co_draw_respects_probability_extremes() {
        let mut v = view(4, Role::Possessed);
        v.history.push(talk(1, 1, 1, "Morning."));
        let always = RuleEngine::new(RuleConfig {
            fake_co_probability: 1.0,
            ..Default::default()
        });
        assert!(always
            .detect_situations(&v)
            .iter()
            .any(|t| matches!(t, SituationTag::PossessedFakeCo { .. })));
        let never = RuleEngine::new(RuleConfig {
            fake_co_probability: 0.0,
            ..Default::default()
        });
        assert!(!never
            .detect_situations(&v)
            .iter()
            .any(|t| matches!(t, SituationTag::PossessedFakeCo { .. })));
    }

    #[test]
    fn fake_co_decision_renders_a_human_claim() {
        let mut v = view(4, Role::Possessed);
        v.history.push(talk(1, 1, 1, "Morning."));
        let mut e = RuleEngine::new(RuleConfig {
            fake_co_probability: 1.0,
            ..Default::default()
        });
        let decision = e.decide_utterance(&v, None);
        match decision.choice {
            Choice::UseTemplate {
                id: TemplateId::FakeCo,
                bindings,
            } => {
                assert_eq!(bindings.target, Some(agent(1)));
                assert_eq!(bindings.species, Some(Species::Human));
            }
            other => panic!("expected a fake CO, got {other:?}"),
        }
    }

    #[test]
    fn identical_views_yield_identical_decisions() {
        let mut v = view(3, Role::Villager);
        v.analysis.claims.push(claim(5, 2, Species::Werewolf, 0));
        let mut a = engine();
        let mut b = engine();
        assert_eq!(a.decide_utterance(&v, None), b.decide_utterance(&v, None));
    }

    #[test]
    fn bandwagon_against_a_human_is_detected() {
        let mut v = view(3, Role::Villager);
        for (i, other) in [1u8, 2, 4, 5].into_iter().enumerate() {
            v.analysis.votes.push(vote(other, 3, i));
        }
        assert!(engine()
            .detect_situations(&v)
            .contains(&SituationTag::BandwagonCheck));
    }
}
