//! Immutable engine configuration: lexicon, rules, thesaurus, adapters and
//! the suits merged into them.

use std::sync::Arc;

use crate::executor::AdapterRegistry;
use crate::learner::Thesaurus;
use crate::lexicon::Lexicon;
use crate::rewrite::{RuleSet, TempClasses};
use crate::suit::{Suit, SuitError};

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub lexicon: Lexicon,
    pub rules: RuleSet,
    pub thesaurus: Thesaurus,
    pub registry: Arc<AdapterRegistry>,
    pub suits: Vec<Suit>,
}

impl EngineConfig {
    pub fn new(lexicon: Lexicon, rules: RuleSet, thesaurus: Thesaurus, registry: Arc<AdapterRegistry>) -> Self {
        EngineConfig { lexicon, rules, thesaurus, registry, suits: Vec::new() }
    }

    pub fn suit(&self, id: &str) -> Option<&Suit> {
        self.suits.iter().find(|s| s.meta.id == id)
    }

    fn classes_of(suits: &[Suit]) -> TempClasses {
        let mut classes = TempClasses::new();
        for s in suits {
            for (k, v) in s.classes() {
                classes.entry(k).or_default().extend(v);
            }
        }
        classes
    }
}

/// A new configuration with the suit's entries and rules added.
/// The suit's rules run after every general rule.
pub fn merge_suit(config: &EngineConfig, suit: &Suit) -> Result<EngineConfig, SuitError> {
    if config.suit(&suit.meta.id).is_some() {
        return Err(SuitError::AlreadyMerged(suit.meta.id.clone()));
    }
    suit.validate(&config.lexicon, &config.registry)?;
    let lexicon = suit.extend_lexicon(&config.lexicon)?;
    let rules = config.rules.extended(suit.compile_rules(&lexicon)?, &suit.classes());
    let mut suits = config.suits.clone();
    suits.push(suit.clone());
    Ok(EngineConfig { lexicon, rules, suits, ..config.clone() })
}

/// Removes a merged suit; unknown ids leave the configuration unchanged.
pub fn unload_suit(config: &EngineConfig, id: &str) -> EngineConfig {
    let Some(suit) = config.suit(id) else {
        return config.clone();
    };
    let suits: Vec<Suit> = config.suits.iter().filter(|s| s.meta.id != id).cloned().collect();
    let classes = EngineConfig::classes_of(&suits);
    EngineConfig {
        lexicon: config.lexicon.without_scope(&suit.scope()),
        rules: config.rules.without_scope(&suit.rule_scope(), classes),
        suits,
        ..config.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::pipeline::parse_frame;
    use crate::suit::parse_suit;

    #[test]
    fn merge_then_unload_restores_the_config() {
        let base = demo::english_config();
        let suit = parse_suit(demo::SHAPES_SUIT.as_bytes()).unwrap();
        let merged = merge_suit(&base, &suit).unwrap();
        assert_ne!(merged, base);
        assert!(merged.lexicon.lookup("sphere").is_some());
        assert_eq!(unload_suit(&merged, "shapes"), base);
        assert_eq!(unload_suit(&base, "nope"), base);
        assert!(matches!(merge_suit(&merged, &suit), Err(SuitError::AlreadyMerged(_))));
    }

    #[test]
    fn merge_and_unload_keep_corpus_frames() {
        let base = demo::english_config();
        let merged = merge_suit(&base, &parse_suit(demo::SHAPES_SUIT.as_bytes()).unwrap()).unwrap();
        let back = unload_suit(&merged, "shapes");
        for text in demo::CORPUS {
            let a = parse_frame(text, &base.lexicon, &base.rules);
            assert_eq!(a, parse_frame(text, &back.lexicon, &back.rules), "{text}");
        }
    }

    #[test]
    fn specific_rules_follow_general_rules() {
        let merged = merge_suit(&demo::english_config(), &parse_suit(demo::SHAPES_SUIT.as_bytes()).unwrap()).unwrap();
        let first_specific = merged.rules.rules().iter().position(|r| r.scope != crate::rewrite::RuleScope::General);
        let last_general = merged.rules.rules().iter().rposition(|r| r.scope == crate::rewrite::RuleScope::General);
        assert!(first_specific.unwrap() > last_general.unwrap());
    }
}
