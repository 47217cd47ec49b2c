//! Utterance production: the template catalog, generation prompts for the
//! LLM path, and persona style transformation.

mod persona;
mod prompts;
mod templates;

pub use persona::{Persona, PersonaCatalog};
pub use prompts::{build_generation_prompt, build_style_prompt, DEFAULT_RULES_TEXT};
pub use templates::{Bindings, TemplateCatalog, TemplateId, Utterance};

use thiserror::Error;

use crate::gateway::{Gateway, GenerationParams};
use crate::protocol::{OVER_TOKEN, SKIP_TOKEN};

#[derive(Debug, Error, PartialEq)]
pub enum UtteranceError {
    #[error("template {template} is missing a binding for {{{placeholder}}}")]
    MissingBinding {
        template: TemplateId,
        placeholder: &'static str,
    },
    #[error("unknown template id {0:?}")]
    UnknownTemplate(String),
    #[error("unknown persona {0:?}")]
    UnknownPersona(String),
    #[error("bad catalog file: {0}")]
    BadCatalog(String),
}

/// Loaded template and persona data plus the static prompt sections.
/// Construct once and share; everything here is immutable.
pub struct UtteranceEngine {
    templates: TemplateCatalog,
    personas: PersonaCatalog,
    tips: String,
}

impl UtteranceEngine {
    /// The catalog compiled into the binary.
    pub fn builtin() -> Self {
        UtteranceEngine {
            templates: TemplateCatalog::builtin(),
            personas: PersonaCatalog::builtin(),
            tips: include_str!("../../data/tips.txt").trim_end().to_string(),
        }
    }

    /// Same data, loaded from editable files.
    pub fn from_files(
        templates: &std::path::Path,
        personas: &std::path::Path,
        tips: Option<&std::path::Path>,
    ) -> Result<Self, UtteranceError> {
        let read = |p: &std::path::Path| {
            std::fs::read_to_string(p)
                .map_err(|e| UtteranceError::BadCatalog(format!("{}: {e}", p.display())))
        };
        let tips = match tips {
            Some(path) => read(path)?.trim_end().to_string(),
            None => include_str!("../../data/tips.txt").trim_end().to_string(),
        };
        Ok(UtteranceEngine {
            templates: TemplateCatalog::from_toml(&read(templates)?)?,
            personas: PersonaCatalog::from_toml(&read(personas)?)?,
            tips,
        })
    }

    pub fn templates(&self) -> &TemplateCatalog {
        &self.templates
    }

    pub fn personas(&self) -> &PersonaCatalog {
        &self.personas
    }

    pub fn tips(&self) -> &str {
        &self.tips
    }

    pub fn render_template(
        &self,
        id: TemplateId,
        bindings: &Bindings,
    ) -> Result<Utterance, UtteranceError> {
        self.templates.render(id, bindings)
    }

    /// Applies the persona's style to an utterance. With a gateway, the
    /// style-transformation prompt is sent there; without one (or when the
    /// completion is unusable) the deterministic fallback substitutes the
    /// first-person token and appends the sentence ending. The plain
    /// persona and the reserved pass tokens are returned untouched.
    pub fn stylize(&self, persona: &Persona, text: &str, gateway: Option<&dyn Gateway>) -> String {
        if persona.is_plain() || text == SKIP_TOKEN || text == OVER_TOKEN {
            return text.to_string();
        }
        if let Some(gateway) = gateway {
            if let Some(prompt) = build_style_prompt(persona, text) {
                if let Ok(completion) = gateway.complete(&prompt, &GenerationParams::default()) {
                    let completion = completion.trim();
                    if !completion.is_empty()
                        && completion != SKIP_TOKEN
                        && completion != OVER_TOKEN
                    {
                        return completion.to_string();
                    }
                }
            }
        }
        persona.fallback_stylize(text)
    }
}

impl Default for UtteranceEngine {
    fn default() -> Self {
        Self::builtin()
    }
}
