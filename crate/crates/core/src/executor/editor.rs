//! A line-based text editor standing in for a word processor.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{AdapterDescriptor, AppState, Arguments, ConditionKind, ExecError, HandlerMap, StateKind, TEXT_CONCEPT};
use crate::par::{self, Strategy};

pub const ADAPTER_ID: &str = "editor";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Style {
    Subscript,
}

/// A style mark over chars `start..end` of one line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StyleSpan {
    pub line: usize,
    pub start: usize,
    pub end: usize,
    pub style: Style,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditorState {
    pub lines: Vec<String>,
    pub styles: Vec<StyleSpan>,
    /// Zero-based inclusive line range.
    pub selection: Option<(usize, usize)>,
}

impl EditorState {
    pub fn from_text(text: &str) -> Self {
        EditorState { lines: text.lines().map(str::to_owned).collect(), ..Default::default() }
    }

    pub fn text(&self) -> String {
        self.lines.join("\n")
    }

    /// Paragraphs as runs of non-blank lines, each a list of line numbers.
    pub fn paragraphs(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut open = false;
        for (i, line) in self.lines.iter().enumerate() {
            if line.trim().is_empty() {
                open = false;
            } else if open {
                out.last_mut().expect("open paragraph").push(i);
            } else {
                out.push(vec![i]);
                open = true;
            }
        }
        out
    }

    pub fn extent(&self, unit: &str) -> Option<usize> {
        match unit {
            "line" => Some(self.lines.len()),
            "paragraph" => Some(self.paragraphs().len()),
            _ => None,
        }
    }

    /// Line numbers covered by a resolved scope.
    pub fn lines_in(&self, scope: Option<&super::Scope>) -> BTreeSet<usize> {
        match scope {
            None => (0..self.lines.len()).collect(),
            Some(s) if s.unit == "paragraph" => {
                let paras = self.paragraphs();
                s.items.iter().filter_map(|&p| paras.get(p)).flatten().copied().collect()
            }
            Some(s) => s.items.clone(),
        }
    }

    pub fn styled(&self, line: usize, style: Style) -> Vec<(usize, usize)> {
        self.styles.iter().filter(|s| s.line == line && s.style == style).map(|s| (s.start, s.end)).collect()
    }
}

fn doc(state: &mut AppState) -> Result<&mut EditorState, ExecError> {
    match state {
        AppState::Editor(d) if d.lines.is_empty() => Err(ExecError::TargetStateError("the document is empty".into())),
        AppState::Editor(d) => Ok(d),
        AppState::Scene(_) => Err(ExecError::TargetStateError("not an editor state".into())),
    }
}

fn quoted(obj: Option<&super::ResolvedObject>, what: &str) -> Result<String, ExecError> {
    obj.and_then(|o| o.text.clone()).ok_or_else(|| ExecError::MissingArgument(what.to_owned()))
}

/// Rewrites `line` if it satisfies the condition; `None` leaves it alone.
pub fn replace_in_line(line: &str, find: &str, with: &str, must_contain: &[String]) -> Option<String> {
    let eligible = line.contains(find) && must_contain.iter().all(|w| line.contains(w.as_str()));
    eligible.then(|| line.replace(find, with))
}

fn edit_lines(args: &Arguments, state: &mut AppState, with: &str) -> Result<usize, ExecError> {
    let find = quoted(Some(&args.primary), "text to find")?;
    if find.is_empty() {
        return Err(ExecError::InvalidParameter("empty search text".into()));
    }
    let d = doc(state)?;
    let scope = d.lines_in(args.scope.as_ref());
    let numbered: Vec<(usize, &String)> = d.lines.iter().enumerate().collect();
    let edits: Vec<Option<String>> = par::map(Strategy::default(), &numbered, |(i, line)| {
        if scope.contains(i) {
            replace_in_line(line, &find, with, &args.must_contain)
        } else {
            None
        }
    });
    let mut affected = 0;
    for (i, edit) in edits.into_iter().enumerate() {
        if let Some(new) = edit {
            if new != d.lines[i] {
                d.lines[i] = new;
                d.styles.retain(|s| s.line != i);
                affected += 1;
            }
        }
    }
    Ok(affected)
}

fn replace_text(args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
    let with = quoted(args.secondary.as_ref(), "replacement text")?;
    edit_lines(args, state, &with)
}

fn delete_text(args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
    edit_lines(args, state, "")
}

/// Joins adjacent non-blank in-scope lines, removing the breaks between them.
fn delete_returns(args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
    let d = doc(state)?;
    let scope = d.lines_in(args.scope.as_ref());
    let mut lines: Vec<String> = Vec::new();
    let mut new_index = Vec::with_capacity(d.lines.len());
    let mut offset = Vec::with_capacity(d.lines.len());
    let mut joins = 0;
    for (i, line) in d.lines.iter().enumerate() {
        let join = i > 0
            && scope.contains(&(i - 1))
            && scope.contains(&i)
            && !line.trim().is_empty()
            && !d.lines[i - 1].trim().is_empty();
        if join {
            let last = lines.last_mut().expect("a previous line");
            offset.push(last.chars().count());
            last.push_str(line);
            joins += 1;
        } else {
            offset.push(0);
            lines.push(line.clone());
        }
        new_index.push(lines.len() - 1);
    }
    for s in &mut d.styles {
        s.start += offset[s.line];
        s.end += offset[s.line];
        s.line = new_index[s.line];
    }
    d.lines = lines;
    d.selection = None;
    Ok(joins)
}

/// Char ranges of the ASCII digit runs in `line`.
pub fn digit_runs(line: &str) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, c) in line.chars().chain(std::iter::once(' ')).enumerate() {
        match (c.is_ascii_digit(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    runs
}

fn transform_numbers(args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
    match args.target.as_deref() {
        Some("subscript") => {}
        Some(other) => return Err(ExecError::InvalidParameter(format!("cannot turn numbers into {other}"))),
        None => return Err(ExecError::MissingArgument("target style".into())),
    }
    let d = doc(state)?;
    let scope = d.lines_in(args.scope.as_ref());
    let existing: BTreeSet<StyleSpan> = d.styles.iter().cloned().collect();
    let mut affected = 0;
    for &i in &scope {
        let fresh: Vec<StyleSpan> = digit_runs(&d.lines[i])
            .into_iter()
            .map(|(start, end)| StyleSpan { line: i, start, end, style: Style::Subscript })
            .filter(|s| !existing.contains(s))
            .collect();
        if !fresh.is_empty() {
            affected += 1;
            d.styles.extend(fresh);
        }
    }
    d.styles.sort();
    Ok(affected)
}

pub fn descriptor() -> AdapterDescriptor {
    let capabilities = BTreeMap::from([
        ((1011, TEXT_CONCEPT.to_owned()), "replace-text".to_owned()),
        ((1001, TEXT_CONCEPT.to_owned()), "delete-text".to_owned()),
        ((1001, "line-break".to_owned()), "delete-returns".to_owned()),
        ((1030, "number".to_owned()), "transform-numbers".to_owned()),
    ]);
    let concepts = BTreeMap::from([
        (2015, "line".to_owned()),
        (2016, "paragraph".to_owned()),
        (2030, "line-break".to_owned()),
        (2050, "number".to_owned()),
        (2060, "subscript".to_owned()),
    ]);
    let conditions = BTreeMap::from([
        (3002, ConditionKind::Scope),
        (3006, ConditionKind::Scope),
        (3005, ConditionKind::ContainsAll),
        (3007, ConditionKind::ContainsAll),
        (3010, ConditionKind::Target),
    ]);
    AdapterDescriptor { id: ADAPTER_ID.into(), state: StateKind::Editor, capabilities, concepts, conditions }
}

pub fn handlers() -> HandlerMap {
    let mut map = HandlerMap::new();
    map.insert("replace-text".into(), Arc::new(replace_text));
    map.insert("delete-text".into(), Arc::new(delete_text));
    map.insert("delete-returns".into(), Arc::new(delete_returns));
    map.insert("transform-numbers".into(), Arc::new(transform_numbers));
    map
}
