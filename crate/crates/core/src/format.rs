//! Line-oriented text format for generators.
//!
//! ```text
//! GEN <name>
//! STATES <n>
//! INIT <state>
//! MARKED <state> ...
//! EVENTS <event> ...
//! CONTROLLABLE <event> ...
//! TRANS
//! <src> <event> <dst>
//! END
//! ```
//!
//! Lines starting with `#` are comments. `CONTROLLABLE` is optional; when
//! absent, odd event ids are controllable. `INIT` may be omitted only when
//! `STATES 0`.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::automata::{Alphabet, EventId, Generator, StateId};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    states: Option<usize>,
    init: Option<StateId>,
    marked: Vec<(usize, StateId)>,
    events: Option<BTreeSet<EventId>>,
    controllable: Option<BTreeSet<EventId>>,
}

pub fn parse_generator(text: &str) -> Result<Generator> {
    let mut header = Header::default();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut trans_line = None;
    for (no, line) in lines.by_ref() {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        let seen = match key {
            "GEN" => header.name.replace(rest.join(" ")).is_some(),
            "STATES" => {
                let [n] = rest[..] else {
                    return Err(parse_err(no, "STATES takes one count"));
                };
                header
                    .states
                    .replace(parse_num(no, n, "state count")?)
                    .is_some()
            }
            "INIT" => {
                let [s] = rest[..] else {
                    return Err(parse_err(no, "INIT takes one state"));
                };
                header.init.replace(parse_num(no, s, "state")?).is_some()
            }
            "MARKED" => {
                for s in &rest {
                    header.marked.push((no, parse_num(no, s, "state")?));
                }
                false
            }
            "EVENTS" | "CONTROLLABLE" => {
                let set = rest
                    .iter()
                    .map(|t| parse_num(no, t, "event").map(EventId))
                    .collect::<Result<BTreeSet<_>>>()?;
                let slot = if key == "EVENTS" {
                    &mut header.events
                } else {
                    &mut header.controllable
                };
                slot.replace(set).is_some()
            }
            "TRANS" => {
                trans_line = Some(no);
                break;
            }
            other => return Err(parse_err(no, format!("unexpected keyword '{other}'"))),
        };
        if seen {
            return Err(parse_err(no, format!("duplicate {key} line")));
        }
    }
    let trans_line = trans_line.ok_or_else(|| parse_err(0, "missing TRANS section"))?;
    let name = header
        .name
        .ok_or_else(|| parse_err(trans_line, "missing GEN line"))?;
    let states = header
        .states
        .ok_or_else(|| parse_err(trans_line, "missing STATES line"))?;
    let events = header.events.unwrap_or_default();
    let alphabet = match header.controllable {
        Some(c) => Alphabet::new(events, c).map_err(|e| parse_err(trans_line, e.to_string()))?,
        None => Alphabet::with_default_controllability(events),
    };
    let init = match (header.init, states) {
        (Some(s), _) => s,
        (None, 0) => 0,
        (None, _) => return Err(parse_err(trans_line, "missing INIT line")),
    };
    let mut g = if states == 0 {
        Generator::empty(name, alphabet)
    } else {
        Generator::new(name, states, init, alphabet)
            .map_err(|e| parse_err(trans_line, e.to_string()))?
    };
    for (no, m) in header.marked {
        g.set_marked(m).map_err(|e| parse_err(no, e.to_string()))?;
    }

    let mut ended = false;
    for (no, line) in lines {
        if ended {
            return Err(parse_err(no, "content after END"));
        }
        if line == "END" {
            ended = true;
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [s, e, d] = toks[..] else {
            return Err(parse_err(no, "transition must be '<src> <event> <dst>'"));
        };
        g.add_transition(
            parse_num(no, s, "state")?,
            EventId(parse_num(no, e, "event")?),
            parse_num(no, d, "state")?,
        )
        .map_err(|err| parse_err(no, err.to_string()))?;
    }
    if !ended {
        return Err(parse_err(0, "missing END"));
    }
    Ok(g)
}

/// Canonical serialization; `parse_generator(&emit_generator(g)) == g`.
pub fn emit_generator(g: &Generator) -> String {
    let join =
        |it: &mut dyn Iterator<Item = String>| -> String { it.map(|s| format!(" {s}")).collect() };
    let mut out = String::new();
    writeln!(out, "GEN {}", g.name()).unwrap();
    writeln!(out, "STATES {}", g.state_count()).unwrap();
    if let Some(init) = g.initial() {
        writeln!(out, "INIT {init}").unwrap();
    }
    writeln!(
        out,
        "MARKED{}",
        join(&mut g.marked().iter().map(ToString::to_string))
    )
    .unwrap();
    let a = g.alphabet();
    writeln!(
        out,
        "EVENTS{}",
        join(&mut a.events().iter().map(ToString::to_string))
    )
    .unwrap();
    writeln!(
        out,
        "CONTROLLABLE{}",
        join(&mut a.controllable().iter().map(ToString::to_string))
    )
    .unwrap();
    out.push_str("TRANS\n");
    for (s, e, d) in g.transitions() {
        writeln!(out, "{s} {e} {d}").unwrap();
    }
    out.push_str("END\n");
    out
}
