//! Causal teams: teams of assignments equipped with a causal graph, variable
//! ranges and (partially defined) invariant functions, together with
//! interventions, the satisfaction relations of the causal languages, and
//! direct and total cause queries.

pub mod causes;
pub mod cli;
pub mod document;
pub mod formula;
pub mod graph;
pub mod intervention;
pub mod semantics;
pub mod team;
pub mod value;

pub use formula::{classify, parse, parse_intervention, Formula, LanguageTag, Rational};
pub use graph::CausalGraph;
pub use intervention::{complete_partial, intervene, Intervention, SolutionPolicy};
pub use semantics::{admits, falsifies, probability, satisfies, EvalOptions, Probability};
pub use team::{CausalTeam, FunctionComponent, FunctionTable, RangeMap, SupportMode, TeamSupport};
pub use value::{ExtendedValue, FormalTerm, Value, Variable};
