//! Interventions `do(X = x)` on causal teams.
//!
//! Recursive, fully defined teams use the staged algorithm: intervened
//! variables are set at stage 0 and each later stage recomputes the variables
//! whose evaluation distance equals the stage number. Partially defined
//! recursive teams are first completed with formal terms. Nonrecursive teams
//! with (at most) unique solutions are handled by enumerating the finite
//! ranges of the unknowns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{CausalGraph, GraphError};
use crate::team::{Assignment, CausalTeam, FunctionComponent, FunctionTable, TeamSupport};
use crate::value::{ExtendedValue, Value, Variable};

/// A conjunction `X1=x1 ∧ … ∧ Xn=xn`, kept in written order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Intervention(Vec<(Variable, Value)>);

impl Intervention {
    pub fn new<X: Into<Variable>, V: Into<Value>>(pairs: impl IntoIterator<Item = (X, V)>) -> Self {
        Intervention(
            pairs
                .into_iter()
                .map(|(x, v)| (x.into(), v.into()))
                .collect(),
        )
    }

    pub fn pairs(&self) -> &[(Variable, Value)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// No variable is assigned two distinct values.
    pub fn is_consistent(&self) -> bool {
        self.assignments().is_some()
    }

    pub fn assignments(&self) -> Option<BTreeMap<Variable, Value>> {
        let mut out = BTreeMap::new();
        for (x, v) in &self.0 {
            if let Some(prev) = out.insert(x.clone(), v.clone()) {
                if prev != *v {
                    return None;
                }
            }
        }
        Some(out)
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Conjunction of `self` and `other`.
    pub fn and(&self, other: &Intervention) -> Intervention {
        Intervention(self.0.iter().chain(&other.0).cloned().collect())
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{x}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolutionPolicy {
    /// Staged algorithm; acyclic graph and fully defined functions.
    #[default]
    Recursive,
    /// Every intervened system has exactly one solution per row.
    UniqueSolutions,
    /// Rows whose intervened system has no solution are dropped.
    AtMostUnique,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterventionError {
    #[error("inconsistent intervention {0}")]
    InconsistentIntervention(Intervention),
    #[error("unknown variable {0}")]
    UnknownVariable(Variable),
    #[error("value {value} is outside the range of {variable}")]
    ValueOutOfRange { variable: Variable, value: Value },
    #[error("the invariant functions are not fully defined")]
    NotFullyDefined,
    #[error("the causal graph is cyclic")]
    NonRecursive,
    #[error("row {row} has several solutions under the intervention")]
    MultipleSolutions { row: usize },
    #[error("row {row} has no solution under the intervention")]
    NoSolution { row: usize },
    #[error("row {row} carries formal entries on exogenous variables; equations cannot be solved")]
    FormalEntry { row: usize },
}

impl From<GraphError> for InterventionError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnknownVariable(v) => InterventionError::UnknownVariable(v),
            GraphError::CyclicGraph => InterventionError::NonRecursive,
            GraphError::UndeclaredVertex(a, _) => InterventionError::UnknownVariable(a),
        }
    }
}

pub fn evaluation_distance(
    graph: &CausalGraph,
    xs: &BTreeSet<Variable>,
    y: &Variable,
) -> Result<i64, GraphError> {
    graph.evaluation_distance(xs, y)
}

pub fn nondescendants(graph: &CausalGraph, x: &Variable) -> Result<BTreeSet<Variable>, GraphError> {
    graph.nondescendants(x)
}

/// Completes a partially defined recursive team. Each missing entry of
/// `f_X` at a parent tuple is taken from a row with that parent tuple (the
/// first such row), or else becomes the formal term `f_X(tuple)`.
pub fn complete_partial(team: &CausalTeam) -> Result<CausalTeam, InterventionError> {
    if !team.is_recursive() {
        return Err(InterventionError::NonRecursive);
    }
    let support = team.support();
    let ranges = team.ranges();
    let mut tables = Vec::new();
    for (x, table) in team.functions().iter() {
        let cx = support.column(x).expect("validated domain");
        let cols: Vec<usize> = table
            .parents()
            .iter()
            .map(|p| support.column(p).expect("validated domain"))
            .collect();
        let mut observed: BTreeMap<Vec<ExtendedValue>, ExtendedValue> = BTreeMap::new();
        for row in support.rows() {
            let args: Vec<ExtendedValue> = cols.iter().map(|&c| row.get(c).clone()).collect();
            observed.entry(args).or_insert_with(|| row.get(cx).clone());
        }
        let mut completed = table.clone();
        for tuple in ranges.product(table.parents()) {
            let args: Vec<ExtendedValue> = tuple.into_iter().map(ExtendedValue::Value).collect();
            if completed.get(&args).is_some() {
                continue;
            }
            let value = match observed.get(&args) {
                Some(v) => v.clone(),
                None => ExtendedValue::term(x.clone(), args.clone()),
            };
            completed.insert(args, value);
        }
        for (args, v) in observed {
            if completed.get(&args).is_none() {
                completed.insert(args, v);
            }
        }
        tables.push((x.clone(), completed));
    }
    Ok(CausalTeam::from_parts(
        support.clone(),
        team.graph().clone(),
        ranges.clone(),
        FunctionComponent::new(tables),
    ))
}

struct Equation<'a> {
    column: usize,
    variable: &'a Variable,
    parents: Vec<usize>,
    table: &'a FunctionTable,
}

impl Equation<'_> {
    fn args(&self, row: &[ExtendedValue]) -> Vec<ExtendedValue> {
        self.parents.iter().map(|&c| row[c].clone()).collect()
    }

    /// `f(args)`, or the nested formal term when `args` carries formal entries.
    fn apply(&self, row: &[ExtendedValue]) -> Result<ExtendedValue, InterventionError> {
        let args = self.args(row);
        match self.table.get(&args) {
            Some(v) => Ok(v.clone()),
            None if args.iter().all(ExtendedValue::is_concrete) => {
                Err(InterventionError::NotFullyDefined)
            }
            None => Ok(ExtendedValue::term(self.variable.clone(), args)),
        }
    }
}

fn check_intervention(
    team: &CausalTeam,
    iv: &Intervention,
) -> Result<BTreeMap<Variable, Value>, InterventionError> {
    let assignments = iv
        .assignments()
        .ok_or_else(|| InterventionError::InconsistentIntervention(iv.clone()))?;
    for (x, v) in &assignments {
        let range = team
            .ranges()
            .get(x)
            .ok_or_else(|| InterventionError::UnknownVariable(x.clone()))?;
        if !range.contains(v) {
            return Err(InterventionError::ValueOutOfRange {
                variable: x.clone(),
                value: v.clone(),
            });
        }
    }
    Ok(assignments)
}

/// `T_{X=x}`.
pub fn intervene(
    team: &CausalTeam,
    iv: &Intervention,
    policy: SolutionPolicy,
) -> Result<CausalTeam, InterventionError> {
    let out = intervene_rowwise(team, iv, policy)?;
    if let Some(Err(e)) = out.images.iter().find(|r| r.is_err()) {
        return Err(e.clone());
    }
    Ok(out.team)
}

/// An intervention applied row by row. `images[i]` is the output row of input
/// row `i`, `None` when the row was discarded, or the error it raised; the
/// output team holds the images of the rows that succeeded.
#[derive(Debug, Clone)]
pub(crate) struct RowwiseIntervention {
    pub team: CausalTeam,
    pub images: Vec<Result<Option<usize>, InterventionError>>,
}

pub(crate) fn intervene_rowwise(
    team: &CausalTeam,
    iv: &Intervention,
    policy: SolutionPolicy,
) -> Result<RowwiseIntervention, InterventionError> {
    let assignments = check_intervention(team, iv)?;
    if !team.is_fully_defined() {
        return Err(InterventionError::NotFullyDefined);
    }
    let xs: BTreeSet<Variable> = assignments.keys().cloned().collect();
    let support = team.support();
    let fixed: Vec<(usize, ExtendedValue)> = assignments
        .iter()
        .map(|(x, v)| {
            (
                support.column(x).expect("checked"),
                ExtendedValue::Value(v.clone()),
            )
        })
        .collect();
    let start = |row: &Assignment| {
        let mut values = row.values().to_vec();
        for (c, v) in &fixed {
            values[*c] = v.clone();
        }
        values
    };

    let outcomes: Vec<Result<Option<Assignment>, InterventionError>> = match policy {
        SolutionPolicy::Recursive => {
            if !team.is_recursive() {
                return Err(InterventionError::NonRecursive);
            }
            let dist = team.graph().evaluation_distances(&xs)?;
            let max = dist.values().copied().max().unwrap_or(-1);
            let mut stages: Vec<Vec<Equation>> = (0..=max.max(0)).map(|_| Vec::new()).collect();
            for (z, d) in &dist {
                if *d >= 1 {
                    let table = team
                        .functions()
                        .get(z)
                        .expect("a vertex reachable by an arrow owns a function");
                    stages[*d as usize].push(equation(team, z, table));
                }
            }
            let run = |row: &Assignment| {
                let mut values = start(row);
                for stage in stages.iter().skip(1) {
                    // every variable of a stage reads only earlier stages
                    let updates = stage
                        .iter()
                        .map(|eq| eq.apply(&values).map(|v| (eq.column, v)))
                        .collect::<Result<Vec<_>, _>>()?;
                    for (c, v) in updates {
                        values[c] = v;
                    }
                }
                Ok(Some(Assignment::new(values)))
            };
            support.rows().iter().map(run).collect()
        }
        SolutionPolicy::UniqueSolutions | SolutionPolicy::AtMostUnique => {
            let unknowns: Vec<(Variable, FunctionTable)> = team
                .functions()
                .iter()
                .filter(|(v, _)| !xs.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect();
            let solver = Solver::new(team, &unknowns);
            support
                .rows()
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut values = start(row);
                    match solver.solve(&mut values, i)? {
                        Solutions::One(sol) => Ok(Some(Assignment::new(sol))),
                        Solutions::Many => Err(InterventionError::MultipleSolutions { row: i }),
                        Solutions::None if policy == SolutionPolicy::AtMostUnique => Ok(None),
                        Solutions::None => Err(InterventionError::NoSolution { row: i }),
                    }
                })
                .collect()
        }
    };

    let mut rows = Vec::new();
    let mut keys = support.keys().map(|_| Vec::new());
    let mut seen: BTreeMap<Assignment, usize> = BTreeMap::new();
    let mut images = Vec::with_capacity(outcomes.len());
    for (i, outcome) in outcomes.into_iter().enumerate() {
        images.push(outcome.map(|row| {
            row.map(|row| match (keys.as_mut(), support.keys()) {
                (Some(out), Some(k)) => {
                    out.push(k[i]);
                    rows.push(row);
                    rows.len() - 1
                }
                _ => *seen.entry(row.clone()).or_insert_with(|| {
                    rows.push(row);
                    rows.len() - 1
                }),
            })
        }));
    }
    let new_support = TeamSupport::from_sorted(support.domain().to_vec(), rows, keys);
    Ok(RowwiseIntervention {
        team: CausalTeam::from_parts(
            new_support,
            team.graph().without_arrows_into(&xs),
            team.ranges().clone(),
            team.functions().without(&xs),
        ),
        images,
    })
}

fn equation<'a>(team: &CausalTeam, z: &'a Variable, table: &'a FunctionTable) -> Equation<'a> {
    let s = team.support();
    Equation {
        column: s.column(z).expect("validated domain"),
        variable: z,
        parents: table
            .parents()
            .iter()
            .map(|p| s.column(p).expect("validated domain"))
            .collect(),
        table,
    }
}

enum Solutions {
    None,
    One(Vec<ExtendedValue>),
    Many,
}

/// Backtracking search over the ranges of the unknowns; each equation is
/// checked as soon as all of its variables are assigned.
struct Solver<'a> {
    unknowns: Vec<(usize, Vec<ExtendedValue>)>,
    checks: Vec<Vec<Equation<'a>>>,
}

impl<'a> Solver<'a> {
    fn new(team: &CausalTeam, unknowns: &'a [(Variable, FunctionTable)]) -> Self {
        let s = team.support();
        let order: Vec<usize> = unknowns
            .iter()
            .map(|(v, _)| s.column(v).expect("validated domain"))
            .collect();
        let position = |c: usize| order.iter().position(|&u| u == c);
        let mut checks: Vec<Vec<Equation>> = (0..unknowns.len()).map(|_| Vec::new()).collect();
        for (v, table) in unknowns {
            let eq = equation(team, v, table);
            let ready = eq
                .parents
                .iter()
                .chain([&eq.column])
                .filter_map(|&c| position(c))
                .max()
                .expect("the equation's own variable is unknown");
            checks[ready].push(eq);
        }
        let unknowns = unknowns
            .iter()
            .zip(&order)
            .map(|((v, _), &c)| {
                let range = team
                    .ranges()
                    .get(v)
                    .expect("validated domain")
                    .iter()
                    .cloned()
                    .map(ExtendedValue::Value)
                    .collect();
                (c, range)
            })
            .collect();
        Solver { unknowns, checks }
    }

    fn solve(
        &self,
        values: &mut [ExtendedValue],
        row: usize,
    ) -> Result<Solutions, InterventionError> {
        let mut found = None;
        let mut count = 0usize;
        self.search(0, values, row, &mut found, &mut count)?;
        Ok(match (count, found) {
            (0, _) => Solutions::None,
            (1, Some(sol)) => Solutions::One(sol),
            _ => Solutions::Many,
        })
    }

    fn search(
        &self,
        depth: usize,
        values: &mut [ExtendedValue],
        row: usize,
        found: &mut Option<Vec<ExtendedValue>>,
        count: &mut usize,
    ) -> Result<(), InterventionError> {
        if depth == self.unknowns.len() {
            *count += 1;
            if found.is_none() {
                *found = Some(values.to_vec());
            }
            return Ok(());
        }
        let (column, range) = &self.unknowns[depth];
        for candidate in range {
            values[*column] = candidate.clone();
            let mut ok = true;
            for eq in &self.checks[depth] {
                let args = eq.args(values);
                match eq.table.get(&args) {
                    Some(v) if *v == values[eq.column] => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => return Err(InterventionError::FormalEntry { row }),
                }
            }
            if ok {
                self.search(depth + 1, values, row, found, count)?;
                if *count > 1 {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}
