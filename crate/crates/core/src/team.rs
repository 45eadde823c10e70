//! Causal teams: a team support together with a causal graph, finite ranges
//! and (partial) invariant functions, validated against the three
//! consistency clauses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::graph::{CausalGraph, GraphError};
use crate::semantics::{self, SemanticsError};
use crate::value::{ExtendedValue, Value, Variable, RESERVED_KEY};

/// One row of a team, positional over the team's alphabetically sorted domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(Vec<ExtendedValue>);

impl Assignment {
    pub fn new(values: Vec<ExtendedValue>) -> Self {
        Assignment(values)
    }

    pub fn values(&self) -> &[ExtendedValue] {
        &self.0
    }

    pub fn get(&self, column: usize) -> &ExtendedValue {
        &self.0[column]
    }

    pub fn has_formal_entry(&self) -> bool {
        self.0.iter().any(|v| !v.is_concrete())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    Set,
    Multiteam,
}

/// The rows of a team. In set mode equal rows collapse; in multiteam mode
/// each row carries a distinct hidden key and nothing collapses.
#[derive(Debug, Clone)]
pub struct TeamSupport {
    domain: Vec<Variable>,
    rows: Vec<Assignment>,
    keys: Option<Vec<u64>>,
}

impl TeamSupport {
    /// Builds a support from rows given positionally in `columns` order.
    /// Columns may be in any order; they are stored sorted.
    pub fn new(
        columns: Vec<Variable>,
        rows: Vec<Vec<ExtendedValue>>,
        mode: SupportMode,
    ) -> Result<Self, ValidationError> {
        let keys = match mode {
            SupportMode::Set => None,
            SupportMode::Multiteam => Some((0..rows.len() as u64).collect()),
        };
        Self::build(columns, rows, keys)
    }

    /// Multiteam support with explicit keys.
    pub fn with_keys(
        columns: Vec<Variable>,
        rows: Vec<Vec<ExtendedValue>>,
        keys: Vec<u64>,
    ) -> Result<Self, ValidationError> {
        Self::build(columns, rows, Some(keys))
    }

    fn build(
        columns: Vec<Variable>,
        rows: Vec<Vec<ExtendedValue>>,
        keys: Option<Vec<u64>>,
    ) -> Result<Self, ValidationError> {
        for c in &columns {
            check_name(c)?;
        }
        let mut perm: Vec<usize> = (0..columns.len()).collect();
        perm.sort_by(|&a, &b| columns[a].cmp(&columns[b]));
        let domain: Vec<Variable> = perm.iter().map(|&i| columns[i].clone()).collect();
        if let Some(w) = domain.windows(2).find(|w| w[0] == w[1]) {
            return Err(ValidationError::DuplicateVariable(w[0].clone()));
        }
        let mut out = Vec::with_capacity(rows.len());
        for (index, row) in rows.into_iter().enumerate() {
            if row.len() != domain.len() {
                return Err(ValidationError::RowArity {
                    index,
                    expected: domain.len(),
                    found: row.len(),
                });
            }
            out.push(Assignment(perm.iter().map(|&i| row[i].clone()).collect()));
        }
        if let Some(keys) = &keys {
            if keys.len() != out.len() {
                return Err(ValidationError::KeyCount {
                    rows: out.len(),
                    keys: keys.len(),
                });
            }
            let mut seen = BTreeSet::new();
            for k in keys {
                if !seen.insert(*k) {
                    return Err(ValidationError::DuplicateKey(*k));
                }
            }
        }
        Ok(TeamSupport::from_sorted(domain, out, keys))
    }

    /// `domain` must be sorted; rows positional over it.
    pub(crate) fn from_sorted(
        domain: Vec<Variable>,
        rows: Vec<Assignment>,
        keys: Option<Vec<u64>>,
    ) -> Self {
        let mut s = TeamSupport { domain, rows, keys };
        s.collapse();
        s
    }

    fn collapse(&mut self) {
        if self.keys.is_some() {
            return;
        }
        let mut seen = BTreeSet::new();
        self.rows.retain(|r| seen.insert(r.clone()));
    }

    pub fn mode(&self) -> SupportMode {
        if self.keys.is_some() {
            SupportMode::Multiteam
        } else {
            SupportMode::Set
        }
    }

    pub fn domain(&self) -> &[Variable] {
        &self.domain
    }

    pub fn rows(&self) -> &[Assignment] {
        &self.rows
    }

    pub fn keys(&self) -> Option<&[u64]> {
        self.keys.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, v: &Variable) -> Option<usize> {
        self.domain.binary_search(v).ok()
    }

    pub fn value(&self, row: usize, v: &Variable) -> Option<&ExtendedValue> {
        self.column(v).map(|c| self.rows[row].get(c))
    }

    /// The sub-support made of the given row indices (in the given order).
    pub fn select(&self, indices: &[usize]) -> TeamSupport {
        TeamSupport {
            domain: self.domain.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            keys: self
                .keys
                .as_ref()
                .map(|k| indices.iter().map(|&i| k[i]).collect()),
        }
    }

    fn describe_row(&self, index: usize) -> RowWitness {
        let row = &self.rows[index];
        let body = self
            .domain
            .iter()
            .zip(row.values())
            .map(|(v, x)| format!("{v}={x}"))
            .collect::<Vec<_>>()
            .join(", ");
        RowWitness {
            index,
            row: format!("{{{body}}}"),
        }
    }
}

impl PartialEq for TeamSupport {
    /// Set mode compares row sets; multiteam mode compares key-to-row maps.
    fn eq(&self, other: &Self) -> bool {
        if self.domain != other.domain {
            return false;
        }
        match (&self.keys, &other.keys) {
            (None, None) => {
                let a: BTreeSet<&Assignment> = self.rows.iter().collect();
                let b: BTreeSet<&Assignment> = other.rows.iter().collect();
                a == b
            }
            (Some(ka), Some(kb)) => {
                let a: BTreeMap<u64, &Assignment> = ka.iter().copied().zip(&self.rows).collect();
                let b: BTreeMap<u64, &Assignment> = kb.iter().copied().zip(&other.rows).collect();
                a == b
            }
            _ => false,
        }
    }
}

impl Eq for TeamSupport {}

/// Finite, non-empty ranges in declared order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RangeMap {
    ranges: BTreeMap<Variable, Vec<Value>>,
}

impl RangeMap {
    pub fn new(
        ranges: impl IntoIterator<Item = (Variable, Vec<Value>)>,
    ) -> Result<Self, ValidationError> {
        let mut out = BTreeMap::new();
        for (var, values) in ranges {
            check_name(&var)?;
            if values.is_empty() {
                return Err(ValidationError::EmptyRange(var));
            }
            let mut seen = BTreeSet::new();
            for v in &values {
                if !seen.insert(v) {
                    return Err(ValidationError::DuplicateRangeValue(var, v.clone()));
                }
            }
            if out.insert(var.clone(), values).is_some() {
                return Err(ValidationError::DuplicateVariable(var));
            }
        }
        Ok(RangeMap { ranges: out })
    }

    pub fn get(&self, v: &Variable) -> Option<&[Value]> {
        self.ranges.get(v).map(Vec::as_slice)
    }

    pub fn contains(&self, v: &Variable, value: &Value) -> bool {
        self.ranges.get(v).is_some_and(|r| r.contains(value))
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.ranges.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &[Value])> {
        self.ranges.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Cartesian product of the ranges of `vars`, first variable most significant.
    pub fn product(&self, vars: &[Variable]) -> Vec<Vec<Value>> {
        let mut out = vec![Vec::new()];
        for v in vars {
            let range = self.get(v).unwrap_or(&[]);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    range.iter().map(move |x| {
                        let mut t = prefix.clone();
                        t.push(x.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Size of [`RangeMap::product`] without building it; saturates.
    pub fn product_size(&self, vars: &[Variable]) -> u64 {
        vars.iter().fold(1u64, |acc, v| {
            acc.saturating_mul(self.get(v).map_or(0, |r| r.len() as u64))
        })
    }
}

/// A (partial) invariant function over the alphabetically ordered parents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctionTable {
    parents: Vec<Variable>,
    entries: BTreeMap<Vec<ExtendedValue>, ExtendedValue>,
}

impl FunctionTable {
    pub fn new(mut parents: Vec<Variable>) -> Self {
        parents.sort();
        parents.dedup();
        FunctionTable {
            parents,
            entries: BTreeMap::new(),
        }
    }

    pub fn with_entries(
        parents: Vec<Variable>,
        entries: impl IntoIterator<Item = (Vec<ExtendedValue>, ExtendedValue)>,
    ) -> Self {
        let mut t = FunctionTable::new(parents);
        t.entries.extend(entries);
        t
    }

    pub fn parents(&self) -> &[Variable] {
        &self.parents
    }

    pub fn entries(&self) -> &BTreeMap<Vec<ExtendedValue>, ExtendedValue> {
        &self.entries
    }

    pub fn get(&self, args: &[ExtendedValue]) -> Option<&ExtendedValue> {
        self.entries.get(args)
    }

    pub fn insert(&mut self, args: Vec<ExtendedValue>, value: ExtendedValue) {
        self.entries.insert(args, value);
    }

    /// Total on the product of the parents' declared ranges.
    pub fn is_total(&self, ranges: &RangeMap) -> bool {
        ranges.product(&self.parents).into_iter().all(|t| {
            let key: Vec<ExtendedValue> = t.into_iter().map(ExtendedValue::Value).collect();
            self.entries.contains_key(&key)
        })
    }
}

/// Function tables keyed by their endogenous variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctionComponent {
    tables: BTreeMap<Variable, FunctionTable>,
}

impl FunctionComponent {
    pub fn new(tables: impl IntoIterator<Item = (Variable, FunctionTable)>) -> Self {
        FunctionComponent {
            tables: tables.into_iter().collect(),
        }
    }

    pub fn get(&self, v: &Variable) -> Option<&FunctionTable> {
        self.tables.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &FunctionTable)> {
        self.tables.iter()
    }

    pub fn endogenous(&self) -> BTreeSet<Variable> {
        self.tables.keys().cloned().collect()
    }

    pub(crate) fn without(&self, xs: &BTreeSet<Variable>) -> FunctionComponent {
        FunctionComponent {
            tables: self
                .tables
                .iter()
                .filter(|(v, _)| !xs.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowWitness {
    pub index: usize,
    pub row: String,
}

impl fmt::Display for RowWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {} {}", self.index, self.row)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("invalid variable name {0:?}")]
    InvalidName(String),
    #[error("`{RESERVED_KEY}` is reserved for the multiteam key")]
    ReservedName,
    #[error("variable {0} declared twice")]
    DuplicateVariable(Variable),
    #[error("range of {0} is empty")]
    EmptyRange(Variable),
    #[error("range of {0} lists {1} twice")]
    DuplicateRangeValue(Variable, Value),
    #[error("row {index} has {found} entries, expected {expected}")]
    RowArity {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{rows} rows but {keys} keys")]
    KeyCount { rows: usize, keys: usize },
    #[error("key {0} used by two rows")]
    DuplicateKey(u64),
    #[error("components disagree on the variable domain: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} has parents in the graph but no invariant function")]
    MissingFunction(Variable),
    #[error("function table of {variable} lists parents {table:?}, graph has {graph:?}")]
    ParentMismatch {
        variable: Variable,
        table: Vec<Variable>,
        graph: Vec<Variable>,
    },
    #[error("function table of {variable} has an entry of arity {found}, expected {expected}")]
    TableArity {
        variable: Variable,
        expected: usize,
        found: usize,
    },
    #[error("function table of {variable} maps ({args}) outside the declared ranges")]
    TableRange { variable: Variable, args: String },
    #[error("range clause: value {value} of {variable} is outside its range")]
    RangeViolation { variable: Variable, value: Value },
    #[error("dependence clause: {first} and {second} agree on the parents of {variable} but not on {variable}")]
    DependenceViolation {
        variable: Variable,
        first: RowWitness,
        second: RowWitness,
    },
    #[error("function clause: {row} has {variable}={found}, invariant function gives {expected}")]
    FunctionClash {
        variable: Variable,
        row: RowWitness,
        expected: ExtendedValue,
        found: ExtendedValue,
    },
}

fn check_name(v: &Variable) -> Result<(), ValidationError> {
    if v.name() == RESERVED_KEY {
        return Err(ValidationError::ReservedName);
    }
    if !Variable::is_identifier(v.name()) {
        return Err(ValidationError::InvalidName(v.name().to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictError {
    #[error("selector {0} contains a dependence atom or probabilistic literal")]
    IllFormedSelector(String),
    #[error(transparent)]
    Semantics(#[from] Box<SemanticsError>),
}

/// The quadruple (support, graph, ranges, functions). Endogenous variables are
/// exactly those owning a function table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalTeam {
    support: TeamSupport,
    graph: CausalGraph,
    ranges: RangeMap,
    functions: FunctionComponent,
}

impl CausalTeam {
    /// Checks the components against each other and against the range,
    /// dependence and function clauses. The first violation is reported,
    /// clause by clause, variables alphabetically, rows in input order.
    pub fn validate(
        support: TeamSupport,
        graph: CausalGraph,
        ranges: RangeMap,
        functions: FunctionComponent,
    ) -> Result<CausalTeam, ValidationError> {
        let domain: BTreeSet<&Variable> = support.domain.iter().collect();
        let vertices: BTreeSet<&Variable> = graph.vertices().iter().collect();
        let ranged: BTreeSet<&Variable> = ranges.variables().collect();
        if domain != vertices {
            return Err(ValidationError::DomainMismatch(format!(
                "support columns {:?} vs graph vertices {:?}",
                domain, vertices
            )));
        }
        if domain != ranged {
            return Err(ValidationError::DomainMismatch(format!(
                "support columns {:?} vs ranges {:?}",
                domain, ranged
            )));
        }
        for (v, _) in functions.iter() {
            if !domain.contains(v) {
                return Err(ValidationError::DomainMismatch(format!(
                    "function table for undeclared variable {v}"
                )));
            }
        }
        for v in graph.vertices() {
            let pa = graph.parents(v);
            match functions.get(v) {
                None if !pa.is_empty() => return Err(ValidationError::MissingFunction(v.clone())),
                None => {}
                Some(t) => {
                    if t.parents() != pa.as_slice() {
                        return Err(ValidationError::ParentMismatch {
                            variable: v.clone(),
                            table: t.parents().to_vec(),
                            graph: pa,
                        });
                    }
                    for (args, value) in t.entries() {
                        if args.len() != pa.len() {
                            return Err(ValidationError::TableArity {
                                variable: v.clone(),
                                expected: pa.len(),
                                found: args.len(),
                            });
                        }
                        let in_range = |var: &Variable, x: &ExtendedValue| match x {
                            ExtendedValue::Value(val) => ranges.contains(var, val),
                            ExtendedValue::Term(_) => true,
                        };
                        let ok =
                            pa.iter().zip(args).all(|(p, a)| in_range(p, a)) && in_range(v, value);
                        if !ok {
                            return Err(ValidationError::TableRange {
                                variable: v.clone(),
                                args: render_tuple(args),
                            });
                        }
                    }
                }
            }
        }

        let team = CausalTeam {
            support,
            graph,
            ranges,
            functions,
        };
        team.check_clauses()?;
        Ok(team)
    }

    fn check_clauses(&self) -> Result<(), ValidationError> {
        let s = &self.support;
        // (a) range containment
        for (c, var) in s.domain.iter().enumerate() {
            for row in &s.rows {
                if let ExtendedValue::Value(v) = row.get(c) {
                    if !self.ranges.contains(var, v) {
                        return Err(ValidationError::RangeViolation {
                            variable: var.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        // (b) the support satisfies =(PA_Y; Y)
        for (y, table) in self.functions.iter() {
            if let Some((i, j)) = dependence_witness(s, table.parents(), y) {
                return Err(ValidationError::DependenceViolation {
                    variable: y.clone(),
                    first: s.describe_row(i),
                    second: s.describe_row(j),
                });
            }
        }
        // (c) rows agree with the invariant functions where defined
        for (y, table) in self.functions.iter() {
            let cy = s.column(y).expect("validated domain");
            let cols: Vec<usize> = table
                .parents()
                .iter()
                .map(|p| s.column(p).expect("validated domain"))
                .collect();
            for (i, row) in s.rows.iter().enumerate() {
                let args: Vec<ExtendedValue> = cols.iter().map(|&c| row.get(c).clone()).collect();
                if let Some(expected) = table.get(&args) {
                    if expected != row.get(cy) {
                        return Err(ValidationError::FunctionClash {
                            variable: y.clone(),
                            row: s.describe_row(i),
                            expected: expected.clone(),
                            found: row.get(cy).clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Assembles components without checking the clauses. Used for teams
    /// produced by intervention, whose validity follows from construction.
    pub(crate) fn from_parts(
        support: TeamSupport,
        graph: CausalGraph,
        ranges: RangeMap,
        functions: FunctionComponent,
    ) -> CausalTeam {
        CausalTeam {
            support,
            graph,
            ranges,
            functions,
        }
    }

    pub fn builder() -> TeamBuilder {
        TeamBuilder::default()
    }

    pub fn support(&self) -> &TeamSupport {
        &self.support
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn ranges(&self) -> &RangeMap {
        &self.ranges
    }

    pub fn functions(&self) -> &FunctionComponent {
        &self.functions
    }

    pub fn domain(&self) -> &[Variable] {
        &self.support.domain
    }

    pub fn into_parts(self) -> (TeamSupport, CausalGraph, RangeMap, FunctionComponent) {
        (self.support, self.graph, self.ranges, self.functions)
    }

    pub fn endogenous(&self) -> BTreeSet<Variable> {
        self.functions.endogenous()
    }

    pub fn exogenous(&self) -> BTreeSet<Variable> {
        let endo = self.endogenous();
        self.domain()
            .iter()
            .filter(|v| !endo.contains(*v))
            .cloned()
            .collect()
    }

    pub fn is_recursive(&self) -> bool {
        self.graph.is_acyclic()
    }

    pub fn is_fully_defined(&self) -> bool {
        self.functions.iter().all(|(_, t)| t.is_total(&self.ranges))
    }

    pub fn has_formal_entries(&self) -> bool {
        self.support.rows.iter().any(Assignment::has_formal_entry)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// The causal subteam on the given rows: same graph, ranges and functions.
    pub fn subteam(&self, indices: &[usize]) -> CausalTeam {
        CausalTeam {
            support: self.support.select(indices),
            graph: self.graph.clone(),
            ranges: self.ranges.clone(),
            functions: self.functions.clone(),
        }
    }

    /// `T^θ`: the causal subteam of rows whose singleton satisfies `θ`.
    pub fn restrict(&self, selector: &Formula) -> Result<CausalTeam, RestrictError> {
        let rows = self.selected_rows(selector)?;
        Ok(self.subteam(&rows))
    }

    pub(crate) fn selected_rows(&self, selector: &Formula) -> Result<Vec<usize>, RestrictError> {
        if selector.has_dependence() || selector.has_probability() {
            return Err(RestrictError::IllFormedSelector(selector.to_string()));
        }
        semantics::selected_rows(self, selector).map_err(|e| Box::new(e).into())
    }

    /// Aligned table: alphabetical columns, rows in support order.
    pub fn render_table(&self) -> String {
        let s = &self.support;
        let cells: Vec<Vec<String>> = s
            .rows
            .iter()
            .map(|r| r.values().iter().map(ToString::to_string).collect())
            .collect();
        let widths: Vec<usize> = s
            .domain
            .iter()
            .enumerate()
            .map(|(c, v)| {
                cells
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([v.name().chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: Vec<&str>| -> String {
            let mut out = String::new();
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(item);
                for _ in item.chars().count()..widths[i] {
                    out.push(' ');
                }
            }
            out.trim_end().to_string()
        };
        let mut out = line(s.domain.iter().map(Variable::name).collect());
        out.push('\n');
        if cells.is_empty() {
            out.push_str("(empty)\n");
        }
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        out
    }
}

fn render_tuple(values: &[ExtendedValue]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// First pair of rows (in input order) that agree on `xs` and differ on `y`.
fn dependence_witness(s: &TeamSupport, xs: &[Variable], y: &Variable) -> Option<(usize, usize)> {
    let cols: Vec<usize> = xs.iter().filter_map(|x| s.column(x)).collect();
    let cy = s.column(y)?;
    for i in 0..s.rows.len() {
        for j in i + 1..s.rows.len() {
            let (a, b) = (&s.rows[i], &s.rows[j]);
            if cols.iter().all(|&c| a.get(c) == b.get(c)) && a.get(cy) != b.get(cy) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Whether rows agreeing on `xs` agree on `y`. Entries compare structurally.
pub fn satisfies_dependence(
    support: &TeamSupport,
    xs: &[Variable],
    y: &Variable,
) -> Result<bool, GraphError> {
    for v in xs.iter().chain([y]) {
        if support.column(v).is_none() {
            return Err(GraphError::UnknownVariable(v.clone()));
        }
    }
    Ok(dependence_witness(support, xs, y).is_none())
}

/// Incremental construction of a [`CausalTeam`].
#[derive(Debug, Clone, Default)]
pub struct TeamBuilder {
    multiteam: bool,
    variables: Vec<(Variable, Vec<Value>)>,
    parents: BTreeMap<Variable, Vec<Variable>>,
    entries: Vec<(Variable, Vec<ExtendedValue>, ExtendedValue)>,
    columns: Option<Vec<Variable>>,
    rows: Vec<Vec<ExtendedValue>>,
    keys: Option<Vec<u64>>,
}

impl TeamBuilder {
    pub fn multiteam(mut self) -> Self {
        self.multiteam = true;
        self
    }

    pub fn variable<V: Into<Value>>(
        mut self,
        name: &str,
        range: impl IntoIterator<Item = V>,
    ) -> Self {
        self.variables
            .push((name.into(), range.into_iter().map(Into::into).collect()));
        self
    }

    /// Declares `name` endogenous with the given parents.
    pub fn endogenous<'a>(
        mut self,
        name: &str,
        parents: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        self.parents.insert(
            name.into(),
            parents.into_iter().map(Variable::from).collect(),
        );
        self
    }

    /// Function entry; `args` follow the alphabetical parent order.
    pub fn entry<A: Into<ExtendedValue>>(
        mut self,
        name: &str,
        args: impl IntoIterator<Item = A>,
        value: impl Into<ExtendedValue>,
    ) -> Self {
        self.entries.push((
            name.into(),
            args.into_iter().map(Into::into).collect(),
            value.into(),
        ));
        self
    }

    /// Column order for subsequent [`TeamBuilder::row`] calls. Defaults to
    /// declaration order of the variables.
    pub fn columns<'a>(mut self, cols: impl IntoIterator<Item = &'a str>) -> Self {
        self.columns = Some(cols.into_iter().map(Variable::from).collect());
        self
    }

    pub fn row<A: Into<ExtendedValue>>(mut self, values: impl IntoIterator<Item = A>) -> Self {
        self.rows.push(values.into_iter().map(Into::into).collect());
        self
    }

    pub fn keys(mut self, keys: impl IntoIterator<Item = u64>) -> Self {
        self.keys = Some(keys.into_iter().collect());
        self.multiteam = true;
        self
    }

    pub fn build(self) -> Result<CausalTeam, ValidationError> {
        let ranges = RangeMap::new(self.variables.iter().cloned())?;
        let vertices: Vec<Variable> = self.variables.iter().map(|(v, _)| v.clone()).collect();
        let edges = self
            .parents
            .iter()
            .flat_map(|(child, ps)| ps.iter().map(move |p| (p.clone(), child.clone())));
        let graph = CausalGraph::new(vertices.clone(), edges)?;
        let mut tables: BTreeMap<Variable, FunctionTable> = self
            .parents
            .iter()
            .map(|(v, ps)| (v.clone(), FunctionTable::new(ps.clone())))
            .collect();
        for (v, args, value) in self.entries {
            tables
                .entry(v.clone())
                .or_insert_with(|| FunctionTable::new(Vec::new()))
                .insert(args, value);
        }
        let columns = self.columns.unwrap_or(vertices);
        let support = match self.keys {
            Some(keys) => TeamSupport::with_keys(columns, self.rows, keys)?,
            None if self.multiteam => TeamSupport::new(columns, self.rows, SupportMode::Multiteam)?,
            None => TeamSupport::new(columns, self.rows, SupportMode::Set)?,
        };
        CausalTeam::validate(support, graph, ranges, FunctionComponent::new(tables))
    }
}
