//! Acceptance checks. Each criterion prints one PASS or FAIL line and the
//! binary exits non-zero if any fails.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use nlcmd_core::executor::{AppState, EditorState};
use nlcmd_core::explainer::{CommandFrame, FrameCondition, ObjectRef};
use nlcmd_core::learner::SpecialExpression;
use nlcmd_core::lexicon::{analyze, ElementKind, IndexStream, IndexedElement, Lexicon, WordIndex};
use nlcmd_core::numformat::{parse_numbers, NumFormat};
use nlcmd_core::pipeline::parse_frame;
use nlcmd_core::rewrite::{apply_rules, compile_rule, RewriteError, RuleSet};
use nlcmd_core::session::{LearnerStage, Outcome, Session};
use nlcmd_core::suit::{export_suit, load_suit, parse_suit};
use nlcmd_core::{demo, merge_suit};

const FAST: Duration = Duration::from_secs(1);
const SCORE_TOLERANCE: f64 = 1e-9;
const RANDOM_DOCUMENTS: usize = 100;
const MAX_DOCUMENT_LINES: usize = 50;
const FUZZ_CASES: usize = 1000;
const MAX_PASSES: usize = 100;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn editor_session(doc: EditorState) -> Session {
    let mut s = Session::new(Arc::new(demo::english_config()), "editor").expect("editor adapter");
    s.set_document(doc);
    s
}

fn editor(s: &Session) -> &EditorState {
    match s.state() {
        AppState::Editor(e) => e,
        other => panic!("not an editor state: {other:?}"),
    }
}

fn golden_frame() -> Check {
    let start = Instant::now();
    let lex = demo::english_lexicon();
    let frame = parse_frame(demo::GOLDEN_COMMAND, &lex, &demo::general_rules()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = CommandFrame {
        action: 1011,
        primary: ObjectRef { index: 5000, quote: Some("apple".into()) },
        secondary: Some(ObjectRef { index: 5001, quote: Some("peach".into()) }),
        conditions: vec![
            FrameCondition {
                prep: 3002,
                indices: vec![3002, 6000, 2015],
                numformat: Some(NumFormat::range(1, 10)),
                quotes: None,
            },
            FrameCondition {
                prep: 3005,
                indices: vec![3005, 5002, 5003],
                numformat: None,
                quotes: Some(vec!["orange".into(), "bread".into()]),
            },
        ],
        language_id: "en".into(),
    };
    ensure(frame == expected, || format!("got {frame:?}"))?;
    ensure(elapsed < FAST, || format!("took {elapsed:?}"))
}

fn semantic_order() -> Check {
    let lex = demo::english_lexicon();
    let analyzed = analyze(demo::GOLDEN_COMMAND, &lex).map_err(|e| e.to_string())?;
    let (numbered, _) = parse_numbers(&analyzed.stream).map_err(|e| e.to_string())?;
    let out = apply_rules(&demo::general_rules(), &numbered, &lex).map_err(|e| e.to_string())?;
    let got = out.stream.index_list();
    let expected: Vec<WordIndex> = vec![1011, 3002, 6000, 2015, 3005, 5002, 5003, 5000, 3004, 5001];
    ensure(got == Some(expected), || format!("got {got:?}"))
}

fn carriage_returns() -> Check {
    let text = "first line\nsecond line\nthird\nfourth line here\nfifth\nsixth and last";
    let doc = EditorState::from_text(text);
    let start = Instant::now();
    let mut s = editor_session(doc);
    let trace = s.process_command("delete carriage returns in each line");
    let elapsed = start.elapsed();
    ensure(matches!(trace.outcome, Outcome::Executed { .. }), || format!("{:?}", trace.outcome))?;
    let after = editor(&s);
    ensure(after.lines.len() == 1, || format!("{} lines remain", after.lines.len()))?;
    ensure(after.lines[0] == text.replace('\n', ""), || format!("content changed: {:?}", after.lines[0]))?;
    ensure(elapsed < FAST, || format!("took {elapsed:?}"))
}

const WORDS: [&str; 5] = ["apple", "peach", "orange", "bread", "filler"];

fn random_document(rng: &mut StdRng) -> Vec<String> {
    let lines = rng.gen_range(1..=MAX_DOCUMENT_LINES);
    (0..lines)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

/// Brute force: each line in the 1-based inclusive range that contains every
/// required word has every occurrence of `find` replaced.
fn replace_oracle(lines: &[String], lo: usize, hi: usize, find: &str, with: &str, required: &[&str]) -> Vec<String> {
    lines
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let n = i + 1;
            if n >= lo && n <= hi && required.iter().all(|w| line.contains(w)) {
                line.replace(find, with)
            } else {
                line.clone()
            }
        })
        .collect()
}

fn conditional_replace() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut mismatches = Vec::new();
    let mut changed = 0;
    for case in 0..RANDOM_DOCUMENTS {
        let lines = random_document(&mut rng);
        let lo = rng.gen_range(1..=lines.len());
        let hi = rng.gen_range(lo..=lines.len());
        let mut s = editor_session(EditorState::from_text(&lines.join("\n")));
        let cmd = format!(r#"replace "apple" with "peach" in lines {lo} - {hi} that contain "orange" and "bread""#);
        let trace = s.process_command(&cmd);
        if !matches!(trace.outcome, Outcome::Executed { .. }) {
            mismatches.push(format!("case {case}: {:?}", trace.outcome));
            continue;
        }
        let expected = replace_oracle(&lines, lo, hi, "apple", "peach", &["orange", "bread"]);
        changed += usize::from(expected != lines);
        if editor(&s).lines != expected {
            mismatches.push(format!("case {case}: lines differ"));
        }
    }
    ensure(mismatches.is_empty(), || format!("{} mismatches, first {}", mismatches.len(), mismatches[0]))?;
    ensure(changed > RANDOM_DOCUMENTS / 4, || format!("only {changed} documents changed"))
}

fn shapes_suit() -> Check {
    let mut s = Session::new(Arc::new(demo::english_config()), "editor").expect("editor adapter");
    let suit = parse_suit(demo::SHAPES_SUIT.as_bytes()).map_err(|e| e.to_string())?;
    s.load_suit(&suit).map_err(|e| e.to_string())?;
    let trace = s.process_command("create a sphere with a 5 radius");
    ensure(matches!(trace.outcome, Outcome::Executed { .. }), || format!("{:?}", trace.outcome))?;
    let AppState::Scene(scene) = s.state() else {
        return Err("session is not on the scene adapter".into());
    };
    let spheres: Vec<_> = scene.objects.iter().filter(|o| o.kind == "sphere").collect();
    ensure(spheres.len() == 1 && scene.objects.len() == 1, || format!("scene {scene:?}"))?;
    ensure(spheres[0].params.get("radius") == Some(&5.0), || format!("sphere {:?}", spheres[0]))
}

fn unmapped_object() -> Check {
    let mut s = editor_session(demo::sample_document());
    let trace = s.process_command("make an outline of the last 2 paragraphs");
    let Outcome::ExecutionFailed { result, .. } = &trace.outcome else {
        return Err(format!("{:?}", trace.outcome));
    };
    let err = result.error.as_ref().ok_or("no error recorded")?;
    ensure(err.kind == "UnmappedObject" && err.detail.contains("\"outline\""), || format!("{err:?}"))
}

fn learner_cascade() -> Check {
    // (a) implicit quotation
    let mut s = editor_session(demo::sample_document());
    let trace = s.process_command("replace apple with peach");
    let quoted = parse_frame(r#"replace "apple" with "peach""#, s.lexicon(), &s.config().rules).map_err(|e| e.to_string())?;
    ensure(matches!(trace.learner.first(), Some(LearnerStage::RetryAsQuotation { ok: true, .. })), || {
        format!("(a) learner {:?}", trace.learner)
    })?;
    ensure(trace.outcome.frame() == Some(&quoted), || format!("(a) outcome {:?}", trace.outcome))?;

    // (b) suggestions with an edit-distance score of 2/7
    let mut s = editor_session(demo::sample_document());
    let trace = s.process_command(r#"replcae "a" with "b""#);
    let Outcome::AwaitingSelection { suggestions } = &trace.outcome else {
        return Err(format!("(b) outcome {:?}", trace.outcome));
    };
    let hit = suggestions
        .iter()
        .filter(|w| w.surface == "replcae")
        .flat_map(|w| &w.candidates)
        .find(|c| c.index == 1011)
        .ok_or("(b) 1011 not suggested")?;
    ensure((hit.score - 2.0 / 7.0).abs() <= SCORE_TOLERANCE, || format!("(b) score {}", hit.score))?;

    // (c) accepting makes the sentence parse without the learner
    let rerun = s.accept_suggestion("replcae", 1011).map_err(|e| e.to_string())?;
    ensure(rerun.learner_free(), || format!("(c) re-run {rerun:?}"))?;
    let again = s.process_command(r#"replcae "a" with "b""#);
    ensure(again.learner_free(), || format!("(c) later run {again:?}"))?;

    // (d) rejection, rephrase, then reuse
    let mut s = editor_session(demo::sample_document());
    let original = r#"frobnicate "apple" with "peach""#;
    s.process_command(original);
    let rejected = s.reject().map_err(|e| e.to_string())?;
    ensure(matches!(rejected.outcome, Outcome::AwaitingRephrase { .. }), || format!("(d) {:?}", rejected.outcome))?;
    let rephrased = s.process_command(r#"replace "apple" with "peach""#);
    ensure(
        rephrased.learner.iter().any(|l| matches!(l, LearnerStage::CaptureSpecialExpression { .. })),
        || format!("(d) rephrase {:?}", rephrased.learner),
    )?;
    let recorded: Vec<&SpecialExpression> = s.store().special.iter().collect();
    ensure(recorded.len() == 1 && recorded[0].original == original, || format!("(d) store {recorded:?}"))?;
    let reused = s.process_command(original);
    ensure(
        reused.stages.first().map(|r| r.stage.as_str()) == Some("special-expression")
            && reused.learner.is_empty()
            && reused.outcome.frame() == rephrased.outcome.frame(),
        || format!("(d) reuse {reused:?}"),
    )?;
    Ok(())
}

const FUZZ_WORDS: [WordIndex; 8] = [1011, 1001, 2015, 3002, 3004, 3010, 4001, 4002];

fn random_rule_text(rng: &mut StdRng) -> String {
    let mut lhs = Vec::new();
    let mut slots = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let slot = slots.len() + 1;
        match rng.gen_range(0..6) {
            0 => {
                lhs.push(format!("?{slot}"));
                slots.push(slot);
            }
            1 => {
                lhs.push(format!("*{slot}"));
                slots.push(slot);
            }
            2 => {
                lhs.push(format!("#{slot}:QUOTE"));
                slots.push(slot);
            }
            _ => lhs.push(format!("@{}", FUZZ_WORDS[rng.gen_range(0..FUZZ_WORDS.len())])),
        }
    }
    let mut rhs = Vec::new();
    for slot in slots {
        if rng.gen_bool(0.7) {
            rhs.push(format!("${slot}"));
        }
        if rng.gen_bool(0.3) {
            rhs.push(format!("@{}", FUZZ_WORDS[rng.gen_range(0..FUZZ_WORDS.len())]));
        }
    }
    if rng.gen_bool(0.5) {
        rhs.reverse();
    }
    format!("{} -> {}", lhs.join(" "), rhs.join(" "))
}

fn random_stream(rng: &mut StdRng, lex: &Lexicon) -> IndexStream {
    let mut quotations = BTreeMap::new();
    let elements = (0..rng.gen_range(0..12))
        .map(|_| {
            if rng.gen_bool(0.25) {
                let i = 5000 + quotations.len() as WordIndex;
                quotations.insert(i, format!("q{i}"));
                IndexedElement::quotation(i, format!("⟨Q{}⟩", i - 5000))
            } else {
                let i = FUZZ_WORDS[rng.gen_range(0..FUZZ_WORDS.len())];
                IndexedElement::word(i, lex.name_of(i))
            }
        })
        .collect();
    IndexStream { elements, quotations, language_id: "en".into() }
}

fn quote_multiset(stream: &IndexStream) -> Vec<WordIndex> {
    let mut q: Vec<WordIndex> = stream
        .elements
        .iter()
        .filter(|e| e.kind == ElementKind::QuotationTemp)
        .filter_map(|e| e.index)
        .collect();
    q.sort_unstable();
    q
}

fn rewrite_properties() -> Check {
    let lex = demo::english_lexicon();
    let mut rng = StdRng::seed_from_u64(42);
    let mut exceeded = 0;
    for case in 0..FUZZ_CASES {
        let rules: Vec<_> = (0..rng.gen_range(1..=4))
            .map(|_| compile_rule(&random_rule_text(&mut rng), &lex))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("case {case}: {e}"))?;
        let rules = RuleSet::new(rules);
        let stream = random_stream(&mut rng, &lex);
        let a = apply_rules(&rules, &stream, &lex);
        let b = apply_rules(&rules, &stream, &lex);
        let bytes = |r: &Result<_, RewriteError>| match r {
            Ok(out) => serde_json::to_vec(out).expect("output serialises"),
            Err(e) => e.to_string().into_bytes(),
        };
        ensure(bytes(&a) == bytes(&b), || format!("case {case}: runs differ"))?;
        match a {
            Ok(out) => ensure(out.passes <= MAX_PASSES, || format!("case {case}: {} passes", out.passes))?,
            Err(RewriteError::FixpointExceeded { .. }) => exceeded += 1,
        }
    }

    let rules = demo::general_rules();
    for text in demo::CORPUS {
        let analyzed = analyze(text, &lex).map_err(|e| e.to_string())?;
        let (numbered, _) = parse_numbers(&analyzed.stream).map_err(|e| e.to_string())?;
        let out = apply_rules(&rules, &numbered, &lex).map_err(|e| format!("{text}: {e}"))?;
        ensure(quote_multiset(&numbered) == quote_multiset(&out.stream), || format!("quotations changed in {text}"))?;
    }
    println!("      ({FUZZ_CASES} fuzz cases, {exceeded} ended in FixpointExceeded)");
    Ok(())
}

fn cross_language() -> Check {
    let en = demo::english_config();
    let zh = demo::unsegmented_config();
    for (a, b) in demo::CROSS_LANGUAGE {
        let fa = parse_frame(a, &en.lexicon, &en.rules).map_err(|e| format!("{a}: {e}"))?;
        let fb = parse_frame(b, &zh.lexicon, &zh.rules).map_err(|e| format!("{b}: {e}"))?;
        ensure(fa == fb, || format!("{a} vs {b}: {fa:?} != {fb:?}"))?;
    }
    ensure(demo::CROSS_LANGUAGE.len() >= 5, || "fewer than five pairs".into())
}

fn suit_round_trip() -> Check {
    let config = demo::english_config();
    let suit = load_suit(demo::SHAPES_SUIT.as_bytes(), &config.lexicon, &config.registry).map_err(|e| e.to_string())?;
    let bytes = export_suit(&suit);
    let again = load_suit(&bytes, &config.lexicon, &config.registry).map_err(|e| e.to_string())?;
    ensure(again == suit, || "re-loaded suit differs".into())?;
    ensure(export_suit(&again) == bytes, || "re-export is not byte-stable".into())?;
    merge_suit(&config, &again).map(|_| ()).map_err(|e| e.to_string())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden command frame", golden_frame),
        ("canonical rewrite order", semantic_order),
        ("carriage-return removal", carriage_returns),
        ("conditional replace oracle", conditional_replace),
        ("shapes suit sphere", shapes_suit),
        ("unmapped object failure", unmapped_object),
        ("learner cascade", learner_cascade),
        ("rewrite engine properties", rewrite_properties),
        ("cross-language frames", cross_language),
        ("suit round trip", suit_round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
