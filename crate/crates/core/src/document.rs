//! JSON documents describing causal teams.
//!
//! ```json
//! {
//!   "mode": "set",
//!   "variables": [{"name": "X", "range": [1, 2]}, {"name": "Y", "range": [1, 2]}],
//!   "parents": {"Y": ["X"]},
//!   "functions": {"Y": [{"args": [1], "value": 2}]},
//!   "rows": [{"X": 1, "Y": 2}]
//! }
//! ```
//!
//! Function arguments follow the alphabetical order of the parents. A formal
//! term is written `{"term": "f_Y", "args": [1]}`. Multiteam rows may carry a
//! `"Key"` field; without one, keys are numbered from 0 in document order.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::CausalGraph;
use crate::team::{
    CausalTeam, FunctionComponent, FunctionTable, RangeMap, SupportMode, TeamSupport,
    ValidationError,
};
use crate::value::{ExtendedValue, FormalTerm, Value, Variable, RESERVED_KEY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DocumentMode {
    #[default]
    Set,
    Multiteam,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: Variable,
    pub range: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DocValue {
    Value(Value),
    Term { term: String, args: Vec<DocValue> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub args: Vec<DocValue>,
    pub value: DocValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamDocument {
    #[serde(default)]
    pub mode: DocumentMode,
    pub variables: Vec<VariableDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parents: BTreeMap<Variable, Vec<Variable>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<Variable, Vec<TableEntry>>,
    #[serde(default)]
    pub rows: Vec<BTreeMap<String, DocValue>>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed team document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("invalid causal team: {0}")]
    Validation(#[from] ValidationError),
}

impl DocValue {
    fn from_extended(v: &ExtendedValue) -> DocValue {
        match v {
            ExtendedValue::Value(v) => DocValue::Value(v.clone()),
            ExtendedValue::Term(t) => DocValue::Term {
                term: t.symbol(),
                args: t.args.iter().map(DocValue::from_extended).collect(),
            },
        }
    }

    fn to_extended(&self) -> Result<ExtendedValue, DocumentError> {
        match self {
            DocValue::Value(v) => Ok(ExtendedValue::Value(v.clone())),
            DocValue::Term { term, args } => {
                let head = term
                    .strip_prefix("f_")
                    .filter(|h| Variable::is_identifier(h))
                    .ok_or_else(|| {
                        DocumentError::Invalid(format!(
                            "formal term symbol `{term}` must have the form f_<variable>"
                        ))
                    })?;
                let args = args
                    .iter()
                    .map(DocValue::to_extended)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ExtendedValue::Term(Box::new(FormalTerm::new(
                    Variable::from(head),
                    args,
                ))))
            }
        }
    }
}

impl TeamDocument {
    pub fn from_team(team: &CausalTeam) -> TeamDocument {
        let support = team.support();
        let mode = match support.mode() {
            SupportMode::Set => DocumentMode::Set,
            SupportMode::Multiteam => DocumentMode::Multiteam,
        };
        let variables = team
            .ranges()
            .iter()
            .map(|(v, r)| VariableDecl {
                name: v.clone(),
                range: r.to_vec(),
            })
            .collect();
        let mut parents = BTreeMap::new();
        let mut functions = BTreeMap::new();
        for (v, table) in team.functions().iter() {
            parents.insert(v.clone(), table.parents().to_vec());
            let entries: Vec<TableEntry> = table
                .entries()
                .iter()
                .map(|(args, value)| TableEntry {
                    args: args.iter().map(DocValue::from_extended).collect(),
                    value: DocValue::from_extended(value),
                })
                .collect();
            if !entries.is_empty() {
                functions.insert(v.clone(), entries);
            }
        }
        let rows = support
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut obj: BTreeMap<String, DocValue> = support
                    .domain()
                    .iter()
                    .zip(row.values())
                    .map(|(v, x)| (v.name().to_string(), DocValue::from_extended(x)))
                    .collect();
                if let Some(keys) = support.keys() {
                    obj.insert(
                        RESERVED_KEY.to_string(),
                        DocValue::Value(Value::Int(keys[i] as i64)),
                    );
                }
                obj
            })
            .collect();
        TeamDocument {
            mode,
            variables,
            parents,
            functions,
            rows,
        }
    }

    pub fn to_team(&self) -> Result<CausalTeam, DocumentError> {
        let ranges = RangeMap::new(
            self.variables
                .iter()
                .map(|d| (d.name.clone(), d.range.clone())),
        )?;
        let columns: Vec<Variable> = self.variables.iter().map(|d| d.name.clone()).collect();

        let mut endogenous: BTreeMap<&Variable, Vec<Variable>> = BTreeMap::new();
        for v in self.functions.keys() {
            endogenous.insert(v, Vec::new());
        }
        for (v, ps) in &self.parents {
            endogenous.insert(v, ps.clone());
        }
        let edges = endogenous
            .iter()
            .flat_map(|(child, ps)| ps.iter().map(|p| (p.clone(), (*child).clone())));
        let graph =
            CausalGraph::new(columns.iter().cloned(), edges).map_err(ValidationError::from)?;

        let mut tables = Vec::new();
        for (v, ps) in &endogenous {
            let mut table = FunctionTable::new(ps.clone());
            for entry in self.functions.get(*v).into_iter().flatten() {
                let args = entry
                    .args
                    .iter()
                    .map(DocValue::to_extended)
                    .collect::<Result<Vec<_>, _>>()?;
                let value = entry.value.to_extended()?;
                if let Some(old) = table.get(&args) {
                    if *old != value {
                        return Err(DocumentError::Invalid(format!(
                            "function {v} has conflicting entries for one argument tuple"
                        )));
                    }
                }
                table.insert(args, value);
            }
            tables.push(((*v).clone(), table));
        }

        let multiteam = self.mode == DocumentMode::Multiteam;
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut keys = Vec::with_capacity(self.rows.len());
        for (i, obj) in self.rows.iter().enumerate() {
            for name in obj.keys() {
                if name != RESERVED_KEY && !columns.iter().any(|c| c.name() == name) {
                    return Err(DocumentError::Invalid(format!(
                        "row {i} mentions undeclared variable {name}"
                    )));
                }
            }
            let row = columns
                .iter()
                .map(|c| {
                    obj.get(c.name())
                        .ok_or_else(|| {
                            DocumentError::Invalid(format!("row {i} has no value for {c}"))
                        })
                        .and_then(DocValue::to_extended)
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
            match obj.get(RESERVED_KEY) {
                Some(DocValue::Value(Value::Int(k))) if multiteam && *k >= 0 => {
                    keys.push(Some(*k as u64))
                }
                Some(_) if multiteam => {
                    return Err(DocumentError::Invalid(format!(
                        "row {i}: Key must be a non-negative integer"
                    )))
                }
                Some(_) => {
                    return Err(DocumentError::Invalid(format!(
                        "row {i}: Key is only allowed in multiteam documents"
                    )))
                }
                None => keys.push(None),
            }
        }
        let support = if multiteam {
            let keys: Vec<u64> = if keys.iter().all(Option::is_none) {
                (0..rows.len() as u64).collect()
            } else if keys.iter().all(Option::is_some) {
                keys.into_iter().flatten().collect()
            } else {
                return Err(DocumentError::Invalid(
                    "either every multiteam row has a Key or none does".into(),
                ));
            };
            TeamSupport::with_keys(columns, rows, keys)?
        } else {
            TeamSupport::new(columns, rows, SupportMode::Set)?
        };
        Ok(CausalTeam::validate(
            support,
            graph,
            ranges,
            FunctionComponent::new(tables),
        )?)
    }
}

pub fn team_from_json(text: &str) -> Result<CausalTeam, DocumentError> {
    serde_json::from_str::<TeamDocument>(text)?.to_team()
}

pub fn team_to_json(team: &CausalTeam) -> String {
    let mut s = serde_json::to_string_pretty(&TeamDocument::from_team(team))
        .expect("documents always serialize");
    s.push('\n');
    s
}

pub fn load_team(path: impl AsRef<Path>) -> Result<CausalTeam, DocumentError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    team_from_json(&text)
}
