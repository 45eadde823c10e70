//! Variables, values, and the formal terms that stand in for unknown function values.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the hidden multiteam key column. Never a user variable.
pub const RESERVED_KEY: &str = "Key";

/// A variable name. Ordering is alphabetical, which fixes the parent order of
/// every function table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// True for `[A-Za-z_][A-Za-z0-9_]*`.
    pub fn is_identifier(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Variable {
    fn from(s: &str) -> Self {
        Variable(s.to_string())
    }
}

impl From<String> for Variable {
    fn from(s: String) -> Self {
        Variable(s)
    }
}

/// A concrete value. Integers and identifier strings never compare equal to
/// each other.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<i32> for Value {
    fn from(n: i32) -> Self {
        Value::Int(n as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.to_string())
    }
}

/// `f̂_X(args)`: the unknown value of `X`'s invariant function at `args`.
/// Equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalTerm {
    pub head: Variable,
    pub args: Vec<ExtendedValue>,
}

impl FormalTerm {
    pub fn new(head: Variable, args: Vec<ExtendedValue>) -> Self {
        FormalTerm { head, args }
    }

    /// Rendered name of the function symbol, e.g. `f_Z`.
    pub fn symbol(&self) -> String {
        format!("f_{}", self.head)
    }
}

impl fmt::Display for FormalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f_{}(", self.head)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A table entry: a concrete value or a formal term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValue {
    Value(Value),
    Term(Box<FormalTerm>),
}

impl ExtendedValue {
    /// The `↓` predicate: holds exactly on concrete values.
    pub fn is_concrete(&self) -> bool {
        matches!(self, ExtendedValue::Value(_))
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            ExtendedValue::Value(v) => Some(v),
            ExtendedValue::Term(_) => None,
        }
    }

    pub fn term(head: Variable, args: Vec<ExtendedValue>) -> Self {
        ExtendedValue::Term(Box::new(FormalTerm::new(head, args)))
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Value(v) => v.fmt(f),
            ExtendedValue::Term(t) => t.fmt(f),
        }
    }
}

impl From<Value> for ExtendedValue {
    fn from(v: Value) -> Self {
        ExtendedValue::Value(v)
    }
}

impl From<i64> for ExtendedValue {
    fn from(n: i64) -> Self {
        ExtendedValue::Value(Value::Int(n))
    }
}

impl From<i32> for ExtendedValue {
    fn from(n: i32) -> Self {
        ExtendedValue::Value(Value::Int(n as i64))
    }
}

impl From<&str> for ExtendedValue {
    fn from(s: &str) -> Self {
        ExtendedValue::Value(Value::Sym(s.to_string()))
    }
}

impl From<FormalTerm> for ExtendedValue {
    fn from(t: FormalTerm) -> Self {
        ExtendedValue::Term(Box::new(t))
    }
}
