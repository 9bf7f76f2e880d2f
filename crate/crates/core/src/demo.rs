//! Shipped fixtures: the English and unsegmented demo lexicons, the general
//! rules, the thesaurus, the shapes suit and a command corpus.

use std::sync::Arc;

use crate::config::EngineConfig;
use crate::executor::{builtin_registry, EditorState};
use crate::learner::Thesaurus;
use crate::lexicon::Lexicon;
use crate::rewrite::{compile_rules, RuleScope, RuleSet, TempClasses};

pub const ENGLISH_LEXICON: &str = include_str!("../data/en.lexicon.json");
pub const UNSEGMENTED_LEXICON: &str = include_str!("../data/zh-toy.lexicon.json");
pub const GENERAL_RULES: &str = include_str!("../data/general.rules");
pub const THESAURUS: &str = include_str!("../data/thesaurus.json");
pub const SHAPES_SUIT: &str = include_str!("../data/shapes.suit.json");

/// The worked example: a conditional replace with two conditions.
pub const GOLDEN_COMMAND: &str = r#"replace "apple" with "peach" in lines 1 - 10 that contain "orange" and "bread""#;

/// Commands the English demo configuration parses to a frame.
pub const CORPUS: &[&str] = &[
    GOLDEN_COMMAND,
    r#"replace "apple" with "peach""#,
    r#"replace "a" with "b" in line 3"#,
    r#"replace "x" with "y" in lines 2-4 that contain "z""#,
    r#"please replace "cat" with "dog" in the first 3 lines."#,
    r#"delete "x""#,
    r#"remove "foo" in the last 2 lines"#,
    r#"delete "x" in lines 1, 3 and 5"#,
    "delete carriage returns in each line",
    "remove the line breaks in paragraph 2",
    "remove the carriage returns in the last two paragraphs",
    "transform numbers in lines 1-3 to inferior characters",
    "convert the digits in every line to subscript",
    "make an outline of the last 2 paragraphs",
    r#"replace "1" with "one" in the third line"#,
    r#"delete "old" in lines twenty - twenty two"#,
];

/// Pairs of equivalent commands: English and the unsegmented toy language.
pub const CROSS_LANGUAGE: &[(&str, &str)] = &[
    (GOLDEN_COMMAND, "替换\"apple\"为\"peach\"在1-10行且包含\"orange\"和\"bread\""),
    ("delete carriage returns in each line", "删除回车在每行"),
    ("transform numbers in lines 1-3 to subscript", "转换数字在1-3行成下标"),
    (r#"replace "a" with "b""#, "替换\"a\"为\"b\""),
    (r#"delete "x" in the last 2 lines"#, "删除\"x\"在最后2行"),
];

pub fn english_lexicon() -> Lexicon {
    Lexicon::from_json(ENGLISH_LEXICON).expect("shipped English lexicon is valid")
}

pub fn unsegmented_lexicon() -> Lexicon {
    Lexicon::from_json(UNSEGMENTED_LEXICON).expect("shipped unsegmented lexicon is valid")
}

/// The general rules, compiled against the English lexicon. Rules are
/// indices, so the same set serves every lexicon sharing those indices.
pub fn general_rules() -> RuleSet {
    RuleSet::new(
        compile_rules(GENERAL_RULES, &english_lexicon(), &TempClasses::new(), RuleScope::General)
            .expect("shipped rules compile"),
    )
}

pub fn thesaurus() -> Thesaurus {
    Thesaurus::from_json(THESAURUS).expect("shipped thesaurus is valid")
}

pub fn config_for(lexicon: Lexicon) -> EngineConfig {
    EngineConfig::new(lexicon, general_rules(), thesaurus(), Arc::new(builtin_registry()))
}

pub fn english_config() -> EngineConfig {
    config_for(english_lexicon())
}

pub fn unsegmented_config() -> EngineConfig {
    config_for(unsegmented_lexicon())
}

/// A twelve-line document with numbers, fruit and two paragraphs.
pub fn sample_document() -> EditorState {
    EditorState::from_text(
        "apple pie with orange and bread\n\
         H2O and CO2 are molecules\n\
         apple orange bread\n\
         plain line\n\
         \n\
         second paragraph starts here\n\
         apple tart, orange peel, bread crumbs\n\
         it continues on this line\n\
         and on this one with 42\n\
         \n\
         apple only\n\
         the end",
    )
}
