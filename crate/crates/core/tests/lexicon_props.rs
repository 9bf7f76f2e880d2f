use std::collections::BTreeSet;

use proptest::prelude::*;

use nlcmd_core::lexicon::{extract_quotations, forward_maximum_match, Lexicon};

const ALPHABET: [char; 5] = ['甲', '乙', '丙', '丁', '戊'];

fn lexicon_of(forms: &BTreeSet<String>) -> Lexicon {
    let entries: Vec<_> = forms
        .iter()
        .enumerate()
        .map(|(i, f)| serde_json::json!({"index": 2000 + i, "class": "Noun", "forms": [f], "pos": "Noun"}))
        .collect();
    Lexicon::from_json(&serde_json::json!({"language_id": "toy", "entries": entries}).to_string()).unwrap()
}

/// Greedy longest-prefix segmentation, checking every prefix length.
fn fmm_oracle(text: &str, forms: &BTreeSet<String>) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out: Vec<String> = Vec::new();
    let mut pending = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if !pending.is_empty() {
                out.push(std::mem::take(&mut pending));
            }
            out.push(chars[i..j].iter().collect());
            i = j;
            continue;
        }
        let mut best = 0;
        for len in 1..=chars.len() - i {
            if forms.contains(&chars[i..i + len].iter().collect::<String>()) {
                best = len;
            }
        }
        if best == 0 {
            pending.push(chars[i]);
            i += 1;
        } else {
            if !pending.is_empty() {
                out.push(std::mem::take(&mut pending));
            }
            out.push(chars[i..i + best].iter().collect());
            i += best;
        }
    }
    if !pending.is_empty() {
        out.push(pending);
    }
    out
}

fn toy_char() -> impl Strategy<Value = char> {
    prop_oneof![4 => prop::sample::select(ALPHABET.to_vec()), 1 => prop::sample::select(vec!['1', '2', '7'])]
}

fn toy_form() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(ALPHABET.to_vec()), 1..4).prop_map(|c| c.into_iter().collect())
}

proptest! {
    #[test]
    fn fmm_matches_exhaustive_longest_prefix(
        forms in prop::collection::btree_set(toy_form(), 0..8),
        text in prop::collection::vec(toy_char(), 0..20).prop_map(|c| c.into_iter().collect::<String>()),
    ) {
        let lex = lexicon_of(&forms);
        let got = forward_maximum_match(&text, &lex);
        prop_assert_eq!(&got, &fmm_oracle(&text, &forms));
        prop_assert_eq!(got.concat(), text);
    }

    #[test]
    fn quotations_are_conserved(
        parts in prop::collection::vec(("[a-z]{1,6}", prop::option::of("[a-z0-9 ]{0,8}")), 0..6),
    ) {
        let mut text = String::new();
        let mut quoted = Vec::new();
        for (word, quote) in &parts {
            text.push_str(word);
            text.push(' ');
            if let Some(q) = quote {
                text.push_str(&format!("\"{q}\" "));
                quoted.push(q.clone());
            }
        }
        let masked = extract_quotations(&text).unwrap();
        prop_assert_eq!(&masked.quotes, &quoted);
        for (i, _) in quoted.iter().enumerate() {
            prop_assert_eq!(masked.text.matches(&format!("⟨Q{i}⟩")).count(), 1);
        }
        prop_assert!(!masked.text.contains('"'));
    }
}

#[test]
fn unbalanced_quote_reports_the_opener() {
    let err = extract_quotations(r#"delete "apple"#).unwrap_err();
    assert_eq!(err.to_string(), "unbalanced quote '\"' at character 7");
}
