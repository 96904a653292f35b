//! Model checking and synthesis for finite dynamical systems viewed as
//! coalgebras.
//!
//! A [`DynSystem`] is a monoid action of discrete time on a finite state
//! set. Its step, multi-step and orbit views are coalgebras whose `∇`
//! modalities give the next-time, multi-step and Kripke-style temporal
//! operators evaluated by [`checker`]. The [`synthesis`] module goes the
//! other way, from a finite Kripke frame to a system whose reachability
//! relation is the frame relation.

pub mod checker;
pub mod cli;
pub mod coalgebra;
pub mod formula;
pub mod io;
pub mod language;
pub mod synthesis;
pub mod syntax;
pub mod system;
pub mod time;

pub use checker::{check, eval, valid, CheckError, SatResult};
pub use coalgebra::{CoalgView, Partition, ViewKind};
pub use formula::Formula;
pub use language::{regex_to_dfa, Dfa, Regex};
pub use synthesis::{AxiomScheme, Frame, FrameProfile};
pub use syntax::parse_formula;
pub use system::{DynSystem, Lasso, State, StateSet};
pub use time::{OrderProfile, TimeMonoid, TimeValue};
