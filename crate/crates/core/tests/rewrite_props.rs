use proptest::prelude::*;

use nlcmd_core::demo;
use nlcmd_core::lexicon::analyze;
use nlcmd_core::numformat::parse_numbers;
use nlcmd_core::pipeline::parse_frame;
use nlcmd_core::rewrite::{apply_rules, compile_rule, RewriteError, RuleSet};

#[test]
fn general_rules_reach_a_fixpoint_in_one_application() {
    let lex = demo::english_lexicon();
    let rules = demo::general_rules();
    for text in demo::CORPUS {
        let (numbered, _) = parse_numbers(&analyze(text, &lex).unwrap().stream).unwrap();
        let once = apply_rules(&rules, &numbered, &lex).unwrap();
        let twice = apply_rules(&rules, &once.stream, &lex).unwrap();
        assert!(twice.trace.is_empty(), "{text}: {:?}", twice.trace);
        assert_eq!(twice.stream.index_list(), once.stream.index_list());
    }
}

#[test]
fn growing_rule_hits_the_pass_limit() {
    let lex = demo::english_lexicon();
    let rules = RuleSet::new(vec![compile_rule("grow: @1011 -> @1011 @1001", &lex).unwrap()]);
    let (numbered, _) = parse_numbers(&analyze("replace", &lex).unwrap().stream).unwrap();
    match apply_rules(&rules, &numbered, &lex) {
        Err(RewriteError::FixpointExceeded { passes, last_rule }) => {
            assert_eq!(passes, 100);
            assert_eq!(last_rule, "grow");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn identity_rules_never_fire() {
    let lex = demo::english_lexicon();
    let mut rules: Vec<_> = demo::general_rules().rules().to_vec();
    rules.push(compile_rule("?1 -> $1", &lex).unwrap());
    let rules = RuleSet::new(rules);
    for text in demo::CORPUS {
        let with_identity = parse_frame(text, &lex, &rules);
        assert_eq!(with_identity, parse_frame(text, &lex, &demo::general_rules()), "{text}");
    }
}

proptest! {
    #[test]
    fn unused_synonyms_leave_frames_alone(surface in "[a-z]{3,9}", target in prop::sample::select(vec![1001u32, 1011, 2015, 2050, 3002])) {
        let lex = demo::english_lexicon();
        let in_corpus = demo::CORPUS.iter().any(|t| t.split(|c: char| !c.is_alphanumeric()).any(|w| w == surface));
        prop_assume!(!in_corpus && !lex.is_form(&surface));
        let learned = lex.add_synonym(target, &surface).unwrap();
        prop_assert_eq!(learned.lookup(&surface), Some(target));
        let rules = demo::general_rules();
        for text in demo::CORPUS {
            prop_assert_eq!(parse_frame(text, &lex, &rules), parse_frame(text, &learned, &rules));
        }
    }
}
