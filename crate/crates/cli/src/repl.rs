use std::io::{self, BufRead, Write};
use std::path::Path;

use nlcmd_core::session::Outcome;
use nlcmd_core::{PipelineTrace, Session};

use crate::render;

pub const PROMPT: &str = "> ";

pub const HELP: &str = "\
type a command, or one of
  :trace on|off      show the full pipeline trace
  :adapter <id>      switch the target application
  :load-suit <path>  merge a suit and switch to its adapter
  :state             print the application state
  :reject            none of the suggestions fit
  :quit              save and leave";

/// Reads commands until `:quit` or end of input, then flushes the store.
pub fn run<R: BufRead, W: Write>(session: &mut Session, input: R, out: &mut W, mut show_trace: bool) -> io::Result<()> {
    write!(out, "{PROMPT}")?;
    out.flush()?;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line == ":quit" {
            break;
        }
        match step(session, line, &mut show_trace) {
            Reply::Text(text) => writeln!(out, "{text}")?,
            Reply::Trace(trace) => {
                if show_trace {
                    writeln!(out, "{}", serde_json::to_string_pretty(&trace).expect("traces serialise"))?;
                }
                writeln!(out, "{}", render::compact(&trace))?;
            }
        }
        write!(out, "{PROMPT}")?;
        out.flush()?;
    }
    writeln!(out)?;
    if let Err(e) = session.flush() {
        writeln!(out, "could not save the learner store: {e}")?;
    }
    Ok(())
}

enum Reply {
    Text(String),
    Trace(Box<PipelineTrace>),
}

fn step(session: &mut Session, line: &str, show_trace: &mut bool) -> Reply {
    let (head, arg) = line.split_once(char::is_whitespace).map_or((line, ""), |(h, a)| (h, a.trim()));
    match head {
        ":help" => Reply::Text(HELP.to_owned()),
        ":trace" => match arg {
            "on" | "off" => {
                *show_trace = arg == "on";
                Reply::Text(format!("trace {arg}"))
            }
            _ => Reply::Text("usage: :trace on|off".into()),
        },
        ":adapter" => match session.set_adapter(arg) {
            Ok(()) => Reply::Text(format!("adapter {arg}")),
            Err(e) => Reply::Text(format!("error {}: {e}", e.kind())),
        },
        ":load-suit" => match session.load_suit_file(Path::new(arg)) {
            Ok(suit) => Reply::Text(format!("loaded {} {}; adapter {}", suit.meta.id, suit.meta.version, suit.adapter_id)),
            Err(e) => Reply::Text(format!("error {}: {e}", e.kind())),
        },
        ":state" => Reply::Text(serde_json::to_string_pretty(session.state()).expect("states serialise")),
        ":reject" => match session.reject() {
            Ok(trace) => Reply::Trace(Box::new(trace)),
            Err(e) => Reply::Text(format!("error {}: {e}", e.kind())),
        },
        _ if head.starts_with(':') => Reply::Text(format!("unknown metacommand {head}; try :help")),
        _ => match selection(session, line) {
            Some(choice) => choice,
            None => Reply::Trace(Box::new(session.process_command(line))),
        },
    }
}

/// A bare number while suggestions are pending picks one of them.
fn selection(session: &mut Session, line: &str) -> Option<Reply> {
    let n: usize = line.parse().ok()?;
    let pending = session.pending_suggestions()?;
    let choice = render::numbered(pending).into_iter().find(|(i, ..)| *i == n);
    let Some((_, surface, index, ..)) = choice else {
        return Some(Reply::Text(format!("no suggestion numbered {n}")));
    };
    let surface = surface.to_owned();
    Some(match session.accept_suggestion(&surface, index) {
        Ok(trace) => Reply::Trace(Box::new(trace)),
        Err(e) => Reply::Text(format!("error {}: {e}", e.kind())),
    })
}

/// Exit status for a one-shot command.
pub fn succeeded(trace: &PipelineTrace) -> bool {
    matches!(trace.outcome, Outcome::Executed { .. })
}
