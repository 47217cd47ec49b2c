//! The template catalog: fixed utterances with placeholder substitution
//! and the machine-readable tag each one carries into the log.

use std::collections::BTreeMap;
use std::fmt;

use crate::game::{AgentId, Species};
use crate::protocol::TalkTag;

use super::UtteranceError;

/// One template per rule-engine situation that speaks through a fixed
/// text. Situations that answer through the LLM have no template and fall
/// back to [`TemplateId::Generic`] when no candidate is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateId {
    Greeting,
    SeerCo,
    SeerResultUpdate,
    CounterCo,
    FakeCo,
    RivalSeerFake,
    DivinedHumanDefense,
    AskVote,
    VoteDeclaration,
    Closing,
    Generic,
}

impl TemplateId {
    pub const ALL: [TemplateId; 11] = [
        TemplateId::Greeting,
        TemplateId::SeerCo,
        TemplateId::SeerResultUpdate,
        TemplateId::CounterCo,
        TemplateId::FakeCo,
        TemplateId::RivalSeerFake,
        TemplateId::DivinedHumanDefense,
        TemplateId::AskVote,
        TemplateId::VoteDeclaration,
        TemplateId::Closing,
        TemplateId::Generic,
    ];

    pub fn key(self) -> &'static str {
        match self {
            TemplateId::Greeting => "greeting",
            TemplateId::SeerCo => "seer_co",
            TemplateId::SeerResultUpdate => "seer_result_update",
            TemplateId::CounterCo => "counter_co",
            TemplateId::FakeCo => "fake_co",
            TemplateId::RivalSeerFake => "rival_seer_fake",
            TemplateId::DivinedHumanDefense => "divined_human_defense",
            TemplateId::AskVote => "ask_vote",
            TemplateId::VoteDeclaration => "vote_declaration",
            TemplateId::Closing => "closing",
            TemplateId::Generic => "generic",
        }
    }

    pub fn from_key(key: &str) -> Option<TemplateId> {
        TemplateId::ALL.into_iter().find(|id| id.key() == key)
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Values substituted into a template's placeholders.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bindings {
    pub me: Option<AgentId>,
    pub target: Option<AgentId>,
    pub rival: Option<AgentId>,
    pub species: Option<Species>,
}

impl Bindings {
    pub fn me(mut self, id: AgentId) -> Self {
        self.me = Some(id);
        self
    }

    pub fn target(mut self, id: AgentId) -> Self {
        self.target = Some(id);
        self
    }

    pub fn rival(mut self, id: AgentId) -> Self {
        self.rival = Some(id);
        self
    }

    pub fn species(mut self, species: Species) -> Self {
        self.species = Some(species);
        self
    }
}

/// A rendered template: the text to say and the tag that travels with it
/// in the log record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub text: String,
    pub tag: TalkTag,
}

#[derive(Debug)]
pub struct TemplateCatalog {
    texts: BTreeMap<TemplateId, String>,
}

impl TemplateCatalog {
    pub fn builtin() -> Self {
        Self::from_toml(include_str!("../../data/templates.toml"))
            .expect("builtin catalog is complete")
    }

    pub fn from_toml(text: &str) -> Result<Self, UtteranceError> {
        let raw: BTreeMap<String, String> =
            toml::from_str(text).map_err(|e| UtteranceError::BadCatalog(e.to_string()))?;
        let mut texts = BTreeMap::new();
        for (key, value) in raw {
            let id = TemplateId::from_key(&key)
                .ok_or_else(|| UtteranceError::UnknownTemplate(key.clone()))?;
            texts.insert(id, value);
        }
        for id in TemplateId::ALL {
            if !texts.contains_key(&id) {
                return Err(UtteranceError::BadCatalog(format!("missing template {id}")));
            }
        }
        Ok(TemplateCatalog { texts })
    }

    pub fn text(&self, id: TemplateId) -> &str {
        &self.texts[&id]
    }

    pub fn render(&self, id: TemplateId, bindings: &Bindings) -> Result<Utterance, UtteranceError> {
        let mut text = self.texts[&id].clone();
        let missing = |placeholder| UtteranceError::MissingBinding {
            template: id,
            placeholder,
        };

        let substitutions: [(&str, Option<String>); 4] = [
            ("{me}", bindings.me.map(|a| a.to_string())),
            ("{target}", bindings.target.map(|a| a.to_string())),
            ("{rival}", bindings.rival.map(|a| a.to_string())),
            (
                "{species}",
                bindings.species.map(|s| s.to_string().to_lowercase()),
            ),
        ];
        for (placeholder, value) in substitutions {
            if text.contains(placeholder) {
                match value {
                    Some(v) => text = text.replace(placeholder, &v),
                    None => {
                        return Err(missing(placeholder.trim_matches(['{', '}'])));
                    }
                }
            }
        }

        let tag = match id {
            TemplateId::Greeting => TalkTag::Greeting,
            TemplateId::SeerCo | TemplateId::SeerResultUpdate | TemplateId::FakeCo => {
                TalkTag::DivinationClaim {
                    target: bindings.target.ok_or(missing("target"))?,
                    species: bindings.species.ok_or(missing("species"))?,
                }
            }
            TemplateId::CounterCo => TalkTag::DivinationClaim {
                target: bindings.rival.ok_or(missing("rival"))?,
                species: Species::Werewolf,
            },
            TemplateId::RivalSeerFake => TalkTag::AccuseFake {
                rival: bindings.rival.ok_or(missing("rival"))?,
            },
            TemplateId::DivinedHumanDefense => TalkTag::DivinedHumanDefense {
                by: bindings.rival.ok_or(missing("rival"))?,
            },
            TemplateId::AskVote => TalkTag::AskVote {
                target: bindings.target.ok_or(missing("target"))?,
            },
            TemplateId::VoteDeclaration => TalkTag::VoteDeclaration {
                target: bindings.target.ok_or(missing("target"))?,
            },
            TemplateId::Closing => TalkTag::Closing,
            TemplateId::Generic => TalkTag::Generic,
        };
        Ok(Utterance { text, tag })
    }
}
