//! Command-line entry points.
//!
//! Exit codes: 0 the property holds (or the command succeeded), 1 the
//! property fails, 2 usage, input or evaluation error, 3 a synthesis
//! precondition does not hold.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::checker::check;
use crate::coalgebra::{CoalgView, ViewKind};
use crate::io::{parse_frame, parse_system, print_system};
use crate::synthesis::{
    axiom_validity, classify_frame, synthesize_general, synthesize_invertible, synthesize_linear,
    verify_synthesis, AxiomScheme, Frame, PropertyCheck, SynthesisError, DEFAULT_AXIOM_BOUND,
};
use crate::syntax::parse_formula;
use crate::system::{DynSystem, StateSet};
use crate::time::{TimeMonoid, TimeValue};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nabla", version, about = "Model checking and synthesis for finite dynamical systems")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula; succeeds when it is valid (or holds at --state).
    Check {
        system: PathBuf,
        formula: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Bisimilarity classes of one coalgebraic view.
    Bisim {
        system: PathBuf,
        #[arg(long, value_enum)]
        view: View,
        /// Time value for the step view (default: the first generator).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// A formula true at the first state and false at the second.
    Distinguish {
        system: PathBuf,
        #[arg(long, value_enum)]
        view: View,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        first: String,
        second: String,
    },
    /// States reachable from a state.
    Orbit { system: PathBuf, state: String },
    /// Check the action laws up to a generator-length bound.
    Verify {
        system: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Build a dynamical system whose reachability is the frame relation.
    Synthesize {
        #[arg(long, value_enum)]
        mode: Mode,
        frame: PathBuf,
    },
    /// Order-theoretic profile of a frame.
    Classify { frame: PathBuf },
    /// Frame validity of an axiom scheme.
    Axioms {
        frame: PathBuf,
        #[arg(long, value_parser = parse_scheme)]
        scheme: AxiomScheme,
        #[arg(long, default_value_t = DEFAULT_AXIOM_BOUND)]
        bound: usize,
    },
    /// Synthesize and check that reachability reproduces the frame.
    Roundtrip {
        frame: PathBuf,
        #[arg(long, value_enum, default_value = "general")]
        mode: Mode,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum View {
    Step,
    Multi,
    Orbit,
    /// Trajectory bisimilarity, computed as unit-step bisimilarity.
    Trajectory,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    General,
    Linear,
    Invertible,
}

fn parse_scheme(text: &str) -> Result<AxiomScheme, String> {
    AxiomScheme::parse(text).ok_or_else(|| format!("unknown scheme `{text}` (expected T, 4, .3 or 5)"))
}

/// Exit code and text printed by a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
            return Outcome {
                code,
                output: e.render().to_string(),
            };
        }
    };
    let json = cli.json;
    match execute(cli.command) {
        Ok((code, report, text)) => Outcome {
            code,
            output: if json {
                format!("{}\n", serde_json::to_string_pretty(&report).unwrap_or_default())
            } else {
                text
            },
        },
        Err(Failure(code, message)) => Outcome {
            code,
            output: if json {
                format!("{}\n", json!({ "error": message, "exit": code }))
            } else {
                format!("error: {message}\n")
            },
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<DynSystem, Failure> {
    Ok(parse_system(&read(path)?)?)
}

fn load_frame(path: &Path) -> Result<Frame, Failure> {
    Ok(parse_frame(&read(path)?)?)
}

fn state_names(sys: &DynSystem, set: &StateSet) -> Vec<String> {
    set.iter().map(|&s| sys.state_name(s).to_string()).collect()
}

fn world_names(fr: &Frame, ws: &[usize]) -> Vec<String> {
    ws.iter().map(|&w| fr.worlds()[w].clone()).collect()
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn view_kind(sys: &DynSystem, view: View, at: Option<&str>) -> Result<ViewKind, Failure> {
    let time_value = |text: &str| {
        TimeValue::parse_literal(text)
            .ok_or_else(|| Failure(EXIT_USAGE, format!("invalid time literal `{text}`")))
    };
    Ok(match view {
        View::Step => match at {
            Some(t) => ViewKind::Step(time_value(t)?),
            None => CoalgView::default_step(sys.time()),
        },
        View::Multi => match at {
            Some(list) => ViewKind::MultiStep(
                list.split(',')
                    .map(|t| time_value(t.trim()))
                    .collect::<Result<_, _>>()?,
            ),
            None => CoalgView::generator_steps(sys.time()),
        },
        View::Orbit => ViewKind::Orbit,
        View::Trajectory => {
            if !matches!(sys.time(), TimeMonoid::Nat | TimeMonoid::Int) {
                return Err(Failure(
                    EXIT_USAGE,
                    "trajectory bisimilarity needs nat or int time".into(),
                ));
            }
            ViewKind::Step(TimeValue::Num(1))
        }
    })
}

fn profile_json(fr: &Frame, check: &PropertyCheck) -> Value {
    json!({
        "holds": check.holds,
        "counterexample": check.counterexample.as_ref().map(|w| world_names(fr, w)),
    })
}

type Report = (i32, Value, String);

fn execute(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Check {
            system,
            formula,
            state,
        } => {
            let sys = load_system(&system)?;
            let f = parse_formula(&formula)?;
            let sat = check(&sys, &f)?.states;
            let names = state_names(&sys, &sat);
            let (holds, scope) = match &state {
                Some(name) => (sat.contains(&sys.state_index(name)?), name.clone()),
                None => (sat.len() == sys.len(), "all states".to_string()),
            };
            let text = format!(
                "formula: {f}\nsatisfied at: {}\n{}: {}\n",
                braces(&names),
                scope,
                if holds { "holds" } else { "fails" }
            );
            let report = json!({
                "formula": f.to_string(),
                "satisfying": names,
                "state": state,
                "holds": holds,
            });
            Ok((if holds { EXIT_HOLDS } else { EXIT_FAILS }, report, text))
        }
        Command::Bisim { system, view, at } => {
            let sys = load_system(&system)?;
            let kind = view_kind(&sys, view, at.as_deref())?;
            let part = CoalgView::build(&sys, kind)?.bisimilarity();
            let blocks: Vec<Vec<String>> = part
                .blocks
                .iter()
                .map(|b| b.iter().map(|&s| sys.state_name(s).to_string()).collect())
                .collect();
            let mut text = String::new();
            for (i, b) in blocks.iter().enumerate() {
                let _ = writeln!(text, "block {i}: {}", braces(b));
            }
            Ok((EXIT_HOLDS, json!({ "blocks": blocks }), text))
        }
        Command::Distinguish {
            system,
            view,
            at,
            first,
            second,
        } => {
            let sys = load_system(&system)?;
            let kind = view_kind(&sys, view, at.as_deref())?;
            let (x, y) = (sys.state_index(&first)?, sys.state_index(&second)?);
            let v = CoalgView::build(&sys, kind)?;
            match v.distinguishing_formula(&sys, x, y) {
                Ok(f) => Ok((
                    EXIT_HOLDS,
                    json!({ "distinguishable": true, "formula": f.to_string() }),
                    format!("{f}\n"),
                )),
                Err(crate::coalgebra::CoalgebraError::Bisimilar(a, b)) => Ok((
                    EXIT_FAILS,
                    json!({ "distinguishable": false }),
                    format!("{a} and {b} are bisimilar\n"),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Orbit { system, state } => {
            let sys = load_system(&system)?;
            let orbit = sys.orbit(sys.state_index(&state)?);
            let names = state_names(&sys, &orbit);
            let text = format!("{}\n", braces(&names));
            Ok((EXIT_HOLDS, json!({ "state": state, "orbit": names }), text))
        }
        Command::Verify { system, bound } => {
            if bound == 0 {
                return Err(Failure(EXIT_USAGE, "bound must be at least 1".into()));
            }
            let sys = load_system(&system)?;
            let violations = sys.validate_action(bound);
            let mut text = String::new();
            for v in &violations {
                let _ = writeln!(
                    text,
                    "violation at {}: ({} then {}) gives {}, ({} + {}) gives {}",
                    sys.state_name(v.state),
                    v.first,
                    v.second,
                    sys.state_name(v.stepwise),
                    v.first,
                    v.second,
                    sys.state_name(v.combined)
                );
            }
            if violations.is_empty() {
                let _ = writeln!(text, "action laws hold up to length {bound}");
            }
            let report = json!({ "bound": bound, "violations": violations });
            let code = if violations.is_empty() { EXIT_HOLDS } else { EXIT_FAILS };
            Ok((code, report, text))
        }
        Command::Synthesize { mode, frame } => {
            let fr = load_frame(&frame)?;
            let sys = synthesize(&fr, mode)?;
            let document = print_system(&sys);
            Ok((EXIT_HOLDS, json!({ "system": document }), document))
        }
        Command::Classify { frame } => {
            let fr = load_frame(&frame)?;
            let p = classify_frame(&fr);
            let rows = [
                ("preorder", &p.preorder),
                ("nonbranching", &p.nonbranching),
                ("symmetric", &p.symmetric),
                ("linear", &p.linear),
                ("transient-scc-singleton", &p.transient_scc_singleton),
            ];
            let mut text = String::new();
            let mut report = serde_json::Map::new();
            for (name, check) in rows {
                let _ = write!(text, "{name}: {}", if check.holds { "yes" } else { "no" });
                if let Some(w) = &check.counterexample {
                    let _ = write!(text, " (counterexample {})", world_names(&fr, w).join(" "));
                }
                text.push('\n');
                report.insert(name.to_string(), profile_json(&fr, check));
            }
            Ok((EXIT_HOLDS, Value::Object(report), text))
        }
        Command::Axioms {
            frame,
            scheme,
            bound,
        } => {
            let fr = load_frame(&frame)?;
            let r = axiom_validity(&fr, scheme, bound)?;
            let mut text = format!("{scheme}: {}\n", if r.valid { "valid" } else { "not valid" });
            let mut report = json!({ "scheme": scheme.to_string(), "valid": r.valid });
            if let Some(c) = &r.counterexample {
                let a = world_names(&fr, &c.a);
                let world = fr.worlds()[c.world].clone();
                let _ = write!(text, "counter-valuation: A={}", braces(&a));
                let mut valuation = json!({ "A": a });
                if let Some(b) = &c.b {
                    let b = world_names(&fr, b);
                    let _ = write!(text, " B={}", braces(&b));
                    valuation["B"] = json!(b);
                }
                let _ = writeln!(text, " at {world}");
                report["counterexample"] = json!({ "world": world, "valuation": valuation });
            }
            Ok((if r.valid { EXIT_HOLDS } else { EXIT_FAILS }, report, text))
        }
        Command::Roundtrip { frame, mode } => {
            let fr = load_frame(&frame)?;
            let sys = synthesize(&fr, mode)?;
            let ok = verify_synthesis(&fr, &sys)?;
            let text = format!(
                "{}reachability {} the frame relation\n",
                print_system(&sys),
                if ok { "equals" } else { "differs from" }
            );
            let report = json!({ "system": print_system(&sys), "verified": ok });
            Ok((if ok { EXIT_HOLDS } else { EXIT_FAILS }, report, text))
        }
    }
}

fn synthesize(fr: &Frame, mode: Mode) -> Result<DynSystem, Failure> {
    let result = match mode {
        Mode::General => synthesize_general(fr),
        Mode::Linear => synthesize_linear(fr),
        Mode::Invertible => synthesize_invertible(fr),
    };
    result.map_err(|e| match e {
        SynthesisError::PaperGap { .. } | SynthesisError::PreconditionViolated { .. } => {
            Failure(EXIT_PRECONDITION, e.to_string())
        }
        other => Failure(EXIT_USAGE, other.to_string()),
    })
}
