//! Persona profiles and the deterministic fallback stylization.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::UtteranceError;

/// A character profile. `first_person` and `sentence_end` drive the
/// fallback token substitution; `example_lines` seed the style prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Persona {
    #[serde(default)]
    pub name: String,
    pub gender: String,
    pub age: String,
    pub first_person: String,
    pub sentence_end: String,
    #[serde(default)]
    pub example_lines: Vec<String>,
}

static FIRST_PERSON_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\bI\b").expect("valid regex"));

impl Persona {
    /// The plain persona is the identity transformation.
    pub fn is_plain(&self) -> bool {
        self.name.eq_ignore_ascii_case("plain")
    }

    /// Token substitution only: first-person tokens become the persona's
    /// appellation and the sentence ending is appended. Best effort by
    /// design; full dialect rendering needs the LLM path.
    pub fn fallback_stylize(&self, text: &str) -> String {
        let mut styled = if self.first_person != "I" {
            FIRST_PERSON_RE
                .replace_all(text, regex::NoExpand(&self.first_person))
                .into_owned()
        } else {
            text.to_string()
        };
        styled.push_str(&self.sentence_end);
        styled
    }
}

pub struct PersonaCatalog {
    personas: BTreeMap<String, Persona>,
}

impl PersonaCatalog {
    pub fn builtin() -> Self {
        Self::from_toml(include_str!("../../data/personas.toml")).expect("builtin personas parse")
    }

    pub fn from_toml(text: &str) -> Result<Self, UtteranceError> {
        let raw: BTreeMap<String, Persona> =
            toml::from_str(text).map_err(|e| UtteranceError::BadCatalog(e.to_string()))?;
        let mut personas = BTreeMap::new();
        for (key, mut persona) in raw {
            let key = key.to_lowercase();
            if persona.name.is_empty() {
                // Capitalized display name from the table key.
                let mut chars = key.chars();
                persona.name = match chars.next() {
                    Some(first) => first.to_uppercase().chain(chars).collect(),
                    None => key.clone(),
                };
            }
            personas.insert(key, persona);
        }
        if !personas.contains_key("plain") {
            return Err(UtteranceError::BadCatalog(
                "missing the plain persona".into(),
            ));
        }
        Ok(PersonaCatalog { personas })
    }

    pub fn get(&self, name: &str) -> Result<&Persona, UtteranceError> {
        self.personas
            .get(&name.to_lowercase())
            .ok_or_else(|| UtteranceError::UnknownPersona(name.to_string()))
    }

    pub fn plain(&self) -> &Persona {
        &self.personas["plain"]
    }

    pub fn names(&self) -> Vec<&str> {
        self.personas.values().map(|p| p.name.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_has_the_six_personas() {
        let catalog = PersonaCatalog::builtin();
        for name in [
            "Plain",
            "Princess",
            "Kansai",
            "Hiroshima",
            "Anya",
            "Zundamon",
        ] {
            let persona = catalog.get(name).unwrap();
            assert_eq!(persona.name, name);
        }
        assert!(catalog.get("nonexistent").is_err());
    }

    #[test]
    fn first_person_substitution_respects_word_boundaries() {
        let persona = Persona {
            name: "Anya".into(),
            gender: "female".into(),
            age: "child".into(),
            first_person: "Anya".into(),
            sentence_end: String::new(),
            example_lines: vec![],
        };
        assert_eq!(
            persona.fallback_stylize("I think I'll vote."),
            "Anya think Anya'll vote."
        );
        // "I" inside identifiers stays put.
        assert_eq!(
            persona.fallback_stylize("ID: Agent[01], I agree"),
            "ID: Agent[01], Anya agree"
        );
    }

    #[test]
    fn lookup_is_case_insensitive() {
        let catalog = PersonaCatalog::builtin();
        assert_eq!(catalog.get("zundamon").unwrap().name, "Zundamon");
        assert_eq!(catalog.get("ZUNDAMON").unwrap().name, "Zundamon");
    }
}
