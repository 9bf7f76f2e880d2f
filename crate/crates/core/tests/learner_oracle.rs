use std::collections::BTreeSet;

use proptest::prelude::*;

use nlcmd_core::demo;
use nlcmd_core::learner::{edit_score, levenshtein, suggest, Thesaurus};
use nlcmd_core::lexicon::{WordClass, WordIndex};
use nlcmd_core::par::Strategy as Par;

/// Full-matrix edit distance.
fn lev_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// All-pairs shortest paths by Floyd-Warshall.
fn floyd(nodes: &[WordIndex], edges: &[(WordIndex, WordIndex, f64)]) -> Vec<Vec<f64>> {
    let pos = |x: WordIndex| nodes.iter().position(|&n| n == x).unwrap();
    let n = nodes.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in edges {
        let (i, j) = (pos(a), pos(b));
        d[i][j] = d[i][j].min(w);
        d[j][i] = d[j][i].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

#[test]
fn known_scores() {
    assert!((edit_score("replcae", "replace") - 2.0 / 7.0).abs() < 1e-12);
    assert!((edit_score("sphere", "line") - 5.0 / 6.0).abs() < 1e-12);
    assert_eq!(edit_score("", ""), 0.0);
    assert_eq!(levenshtein("kitten", "sitting"), 3);
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-e]{0,7}",
        prop::sample::select(vec!["replcae", "erase", "lnie", "paragraf", "radius", "delet", "with"]).prop_map(String::from),
    ]
}

proptest! {
    #[test]
    fn levenshtein_matches_the_full_matrix(a in "[a-d]{0,9}", b in "[a-d]{0,9}") {
        let d = levenshtein(&a, &b);
        prop_assert_eq!(d, lev_oracle(&a, &b));
        prop_assert_eq!(d, levenshtein(&b, &a));
        let s = edit_score(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, edit_score(&b, &a));
    }

    #[test]
    fn levenshtein_triangle(a in "[ab]{0,6}", b in "[ab]{0,6}", c in "[ab]{0,6}") {
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn thesaurus_matches_all_pairs(
        edges in prop::collection::vec((0u32..6, 0u32..6, 1u32..4), 0..10),
        max_hops in 1u32..5,
    ) {
        let edges: Vec<(WordIndex, WordIndex, f64)> =
            edges.into_iter().filter(|(a, b, _)| a != b).map(|(a, b, w)| (a, b, f64::from(w) * 0.5)).collect();
        let nodes: Vec<WordIndex> = (0..6).collect();
        let th = Thesaurus::new(max_hops, &edges).unwrap();
        let d = floyd(&nodes, &edges);
        for a in 0..6 {
            for b in 0..6 {
                let want = Some(d[a][b]).filter(|&x| x <= f64::from(max_hops));
                let got = th.distance(a as WordIndex, b as WordIndex);
                prop_assert_eq!(got.is_some(), want.is_some());
                if let (Some(g), Some(w)) = (got, want) {
                    prop_assert!((g - w).abs() < 1e-9);
                    prop_assert!(th.score(a as WordIndex, b as WordIndex).unwrap() < 1.0);
                }
            }
        }
    }

    #[test]
    fn suggestions_match_brute_force(surface in word(), k in 1usize..8) {
        let lex = demo::english_lexicon();
        let th = demo::thesaurus();
        let nodes: Vec<WordIndex> = lex.entries().map(|e| e.index).collect::<BTreeSet<_>>().into_iter().collect();
        let raw: Vec<(WordIndex, WordIndex, f64)> = serde_json::from_str::<serde_json::Value>(demo::THESAURUS).unwrap()["edges"]
            .as_array().unwrap().iter()
            .map(|e| (e[0].as_u64().unwrap() as WordIndex, e[1].as_u64().unwrap() as WordIndex, e[2].as_f64().unwrap()))
            .collect();
        let all_pairs = floyd(&nodes, &raw);
        let at = |x: WordIndex| nodes.iter().position(|&n| n == x).unwrap();
        let known = lex.lookup(&surface);

        let mut expected: Vec<(f64, WordIndex)> = lex
            .entries()
            .filter(|e| matches!(e.class, WordClass::Action | WordClass::Noun | WordClass::Unit | WordClass::Preposition | WordClass::SwitchPreposition))
            .map(|e| {
                let edit = e.forms.iter().map(|f| {
                    let f = f.to_lowercase();
                    lev_oracle(&surface, &f) as f64 / surface.chars().count().max(f.chars().count()).max(1) as f64
                }).fold(1.0, f64::min);
                let hops = known
                    .map(|a| all_pairs[at(a)][at(e.index)])
                    .filter(|&d| d <= f64::from(th.max_hops()))
                    .map(|d| d / (f64::from(th.max_hops()) + 1.0));
                (hops.map_or(edit, |h| edit.min(h)), e.index)
            })
            .collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        expected.truncate(k);

        for strategy in [Par::Sequential, Par::Parallel] {
            let got = suggest(&surface, &lex, &th, k, strategy);
            prop_assert_eq!(got.len(), expected.len());
            for (g, (score, index)) in got.iter().zip(&expected) {
                prop_assert_eq!(g.index, *index);
                prop_assert!((g.score - score).abs() < 1e-12, "{} vs {}", g.score, score);
            }
        }
    }
}
