//! Line-oriented text formats for systems (`.dyn`) and frames (`.kf`).
//!
//! ```text
//! # two-cycle
//! time nat                  # or: time int | time word x y | time free 3
//! states s0 s1
//! step 1: s0->s1 s1->s0     # one line per generator; int files give only `1`
//! label p: s0
//! ```
//!
//! ```text
//! worlds a b
//! edge a a
//! edge a b
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use crate::synthesis::{Frame, SynthesisError};
use crate::system::{DynSystem, StateSet, SystemError};
use crate::time::TimeMonoid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: `{name}` is not a generator of this time")]
    UnknownGenerator { line: usize, name: String },
    #[error("line {line}: duplicate declaration of `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("step `{generator}` does not map every state")]
    PartialStep { generator: String },
    #[error("step 1 is not a bijection, as int time requires")]
    NonBijectiveStep,
    #[error(transparent)]
    System(SystemError),
    #[error(transparent)]
    Frame(SynthesisError),
}

fn syntax(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Syntax {
        line,
        message: message.into(),
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Non-blank lines with comments removed, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn names(line: usize, text: &str) -> Result<Vec<String>, DocumentError> {
    text.split_whitespace()
        .map(|s| {
            if is_name(s) {
                Ok(s.to_string())
            } else {
                Err(syntax(line, format!("invalid name `{s}`")))
            }
        })
        .collect()
}

fn unique(line: usize, items: &[String]) -> Result<(), DocumentError> {
    let mut seen = BTreeSet::new();
    for s in items {
        if !seen.insert(s) {
            return Err(DocumentError::Duplicate {
                line,
                name: s.clone(),
            });
        }
    }
    Ok(())
}

fn parse_time(line: usize, rest: &str) -> Result<TimeMonoid, DocumentError> {
    let mut words = rest.split_whitespace();
    match words.next() {
        Some("nat") if words.next().is_none() => Ok(TimeMonoid::Nat),
        Some("int") if words.next().is_none() => Ok(TimeMonoid::Int),
        Some("word") => {
            let alphabet = names(line, &words.collect::<Vec<_>>().join(" "))?;
            if alphabet.is_empty() {
                return Err(syntax(line, "word time needs at least one symbol"));
            }
            unique(line, &alphabet)?;
            Ok(TimeMonoid::Word(alphabet))
        }
        Some("free") => match (words.next().map(str::parse::<usize>), words.next()) {
            (Some(Ok(k)), None) if k > 0 => Ok(TimeMonoid::FreeIdx(k)),
            _ => Err(syntax(line, "expected `time free <positive count>`")),
        },
        _ => Err(syntax(line, "expected `time nat`, `time int`, `time word ...` or `time free K`")),
    }
}

/// Header names of the step lines a document declares, in table order.
fn step_headers(time: &TimeMonoid) -> Vec<String> {
    match time {
        TimeMonoid::Nat | TimeMonoid::Int => vec!["1".into()],
        _ => time.alphabet().unwrap_or_default(),
    }
}

pub fn parse_system(text: &str) -> Result<DynSystem, DocumentError> {
    let mut time: Option<TimeMonoid> = None;
    let mut states: Option<Vec<String>> = None;
    let mut steps: BTreeMap<String, (usize, Vec<Option<usize>>)> = BTreeMap::new();
    let mut labels: BTreeMap<String, StateSet> = BTreeMap::new();

    for (line, content) in lines(text) {
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match keyword {
            "time" => {
                if time.is_some() {
                    return Err(syntax(line, "duplicate `time` line"));
                }
                time = Some(parse_time(line, rest)?);
            }
            "states" => {
                if time.is_none() {
                    return Err(syntax(line, "`states` must follow `time`"));
                }
                if states.is_some() {
                    return Err(syntax(line, "duplicate `states` line"));
                }
                let list = names(line, rest)?;
                if list.is_empty() {
                    return Err(syntax(line, "at least one state is required"));
                }
                unique(line, &list)?;
                states = Some(list);
            }
            "step" | "label" => {
                let (Some(time), Some(states)) = (&time, &states) else {
                    return Err(syntax(line, format!("`{keyword}` must follow `time` and `states`")));
                };
                let Some((head, body)) = rest.split_once(':') else {
                    return Err(syntax(line, format!("expected `{keyword} <name>: ...`")));
                };
                let head = head.trim();
                if !is_name(head) {
                    return Err(syntax(line, format!("invalid name `{head}`")));
                }
                let lookup = |name: &str| {
                    states
                        .iter()
                        .position(|s| s == name)
                        .ok_or_else(|| DocumentError::UnknownState {
                            line,
                            name: name.to_string(),
                        })
                };
                if keyword == "label" {
                    let mut set = StateSet::new();
                    for name in body.split_whitespace() {
                        set.insert(lookup(name)?);
                    }
                    if labels.insert(head.to_string(), set).is_some() {
                        return Err(DocumentError::Duplicate {
                            line,
                            name: head.to_string(),
                        });
                    }
                    continue;
                }
                if !step_headers(time).iter().any(|g| g == head) {
                    return Err(DocumentError::UnknownGenerator {
                        line,
                        name: head.to_string(),
                    });
                }
                let mut table = vec![None; states.len()];
                for mapping in body.split_whitespace() {
                    let Some((from, to)) = mapping.split_once("->") else {
                        return Err(syntax(line, format!("expected `state->state`, found `{mapping}`")));
                    };
                    let (from, to) = (lookup(from)?, lookup(to)?);
                    if table[from].replace(to).is_some() {
                        return Err(DocumentError::Duplicate {
                            line,
                            name: states[from].clone(),
                        });
                    }
                }
                if steps.insert(head.to_string(), (line, table)).is_some() {
                    return Err(DocumentError::Duplicate {
                        line,
                        name: head.to_string(),
                    });
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let time = time.ok_or_else(|| syntax(0, "missing `time` line"))?;
    let states = states.ok_or_else(|| syntax(0, "missing `states` line"))?;
    let mut tables = Vec::new();
    for generator in step_headers(&time) {
        let partial = || DocumentError::PartialStep {
            generator: generator.clone(),
        };
        let (_, table) = steps.get(&generator).ok_or_else(partial)?;
        let table: Option<Vec<usize>> = table.iter().copied().collect();
        tables.push(table.ok_or_else(partial)?);
    }
    DynSystem::new(time, states, tables, labels).map_err(|e| match e {
        SystemError::NonBijectiveStep(_) => DocumentError::NonBijectiveStep,
        other => DocumentError::System(other),
    })
}

/// Canonical document for `sys`; `parse_system` inverts it.
pub fn print_system(sys: &DynSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "time {}", sys.time());
    let _ = writeln!(out, "states {}", sys.states().join(" "));
    for (i, head) in step_headers(sys.time()).iter().enumerate() {
        let _ = write!(out, "step {head}:");
        for (s, &t) in sys.step_table(i).iter().enumerate() {
            let _ = write!(out, " {}->{}", sys.state_name(s), sys.state_name(t));
        }
        out.push('\n');
    }
    for (atom, set) in sys.labels() {
        let _ = write!(out, "label {atom}:");
        for &s in set {
            let _ = write!(out, " {}", sys.state_name(s));
        }
        out.push('\n');
    }
    out
}

pub fn parse_frame(text: &str) -> Result<Frame, DocumentError> {
    let mut worlds: Option<Vec<String>> = None;
    let mut relation = BTreeSet::new();
    for (line, content) in lines(text) {
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match keyword {
            "worlds" => {
                if worlds.is_some() {
                    return Err(syntax(line, "duplicate `worlds` line"));
                }
                let list = names(line, rest)?;
                unique(line, &list)?;
                worlds = Some(list);
            }
            "edge" => {
                let Some(ws) = &worlds else {
                    return Err(syntax(line, "`edge` must follow `worlds`"));
                };
                let ends: Vec<&str> = rest.split_whitespace().collect();
                let [x, y] = ends.as_slice() else {
                    return Err(syntax(line, "expected `edge <world> <world>`"));
                };
                let lookup = |name: &str| {
                    ws.iter()
                        .position(|w| w == name)
                        .ok_or_else(|| DocumentError::UnknownState {
                            line,
                            name: name.to_string(),
                        })
                };
                if !relation.insert((lookup(x)?, lookup(y)?)) {
                    return Err(DocumentError::Duplicate {
                        line,
                        name: format!("{x} {y}"),
                    });
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    let worlds = worlds.ok_or_else(|| syntax(0, "missing `worlds` line"))?;
    Frame::new(worlds, relation).map_err(DocumentError::Frame)
}

pub fn print_frame(fr: &Frame) -> String {
    let mut out = format!("worlds {}\n", fr.worlds().join(" "));
    for &(x, y) in fr.relation() {
        let _ = writeln!(out, "edge {} {}", fr.worlds()[x], fr.worlds()[y]);
    }
    out
}
