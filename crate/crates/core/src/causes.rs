//! Direct, probabilistic direct and total cause, decided by enumerating the
//! boolean disjunctions that define them.
//!
//! Witnesses are searched in a fixed order: context tuples first (variables
//! alphabetically, values in declared range order, the first variable most
//! significant), then `x`, `x'`, `y`, `y'` in range order. The first witness
//! found is returned.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::formula::{Formula, Rational};
use crate::intervention::{complete_partial, Intervention, InterventionError};
use crate::semantics::{EvalOptions, Evaluator, SemanticsError};
use crate::team::CausalTeam;
use crate::value::{Value, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CauseKind {
    Direct,
    ProbabilisticDirect,
    Total,
}

impl fmt::Display for CauseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CauseKind::Direct => "direct",
            CauseKind::ProbabilisticDirect => "pdirect",
            CauseKind::Total => "total",
        })
    }
}

/// Values certifying a cause: the fixed context, two values of the cause and
/// the resulting values of the effect. For a probabilistic direct cause,
/// `y_prime` is the value certain under `x_prime` and impossible under `x`,
/// and `y` is the first value possible under `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseWitness {
    pub fixed: BTreeMap<Variable, Value>,
    pub x: Value,
    pub x_prime: Value,
    pub y: Value,
    pub y_prime: Value,
}

impl fmt::Display for CauseWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, value) in &self.fixed {
            write!(f, "{v}={value}, ")?;
        }
        write!(
            f,
            "x={} -> y={}, x'={} -> y'={}",
            self.x, self.y, self.x_prime, self.y_prime
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseVerdict {
    pub holds: bool,
    pub witness: Option<CauseWitness>,
}

impl CauseVerdict {
    fn found(witness: Option<CauseWitness>) -> Self {
        CauseVerdict {
            holds: witness.is_some(),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CauseError {
    #[error("cause and effect are the same variable {0}")]
    SameVariable(Variable),
    #[error("unknown variable {0}")]
    UnknownVariable(Variable),
    #[error("cause queries need a recursive team")]
    NonRecursive,
    #[error("the invariant functions are not fully defined")]
    NotFullyDefined,
    #[error("probabilistic causes are undefined on an empty support")]
    EmptySupport,
    #[error("search over {size} context tuples exceeds the cap of {cap}")]
    SearchTooLarge { size: u64, cap: u64 },
    #[error("no witness among concrete outcomes, but some outcomes are formal terms: {0}")]
    Undecided(SemanticsError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CauseOptions {
    /// Refuse searches over more context tuples than this.
    pub max_search: Option<u64>,
    pub eval: EvalOptions,
}

pub fn direct_cause(
    team: &CausalTeam,
    x: &Variable,
    y: &Variable,
) -> Result<CauseVerdict, CauseError> {
    cause(team, CauseKind::Direct, x, y, &CauseOptions::default())
}

pub fn probabilistic_direct_cause(
    team: &CausalTeam,
    x: &Variable,
    y: &Variable,
) -> Result<CauseVerdict, CauseError> {
    cause(
        team,
        CauseKind::ProbabilisticDirect,
        x,
        y,
        &CauseOptions::default(),
    )
}

pub fn total_cause(
    team: &CausalTeam,
    x: &Variable,
    y: &Variable,
) -> Result<CauseVerdict, CauseError> {
    cause(team, CauseKind::Total, x, y, &CauseOptions::default())
}

pub fn cause(
    team: &CausalTeam,
    kind: CauseKind,
    x: &Variable,
    y: &Variable,
    options: &CauseOptions,
) -> Result<CauseVerdict, CauseError> {
    let team = prepare(team, options)?;
    let mut search = Search::new(team, options);
    search.run(kind, x, y)
}

/// A cause verdict for the ordered pair `(x, y)`.
pub type PairVerdict = (Variable, Variable, Result<CauseVerdict, CauseError>);

/// Every ordered pair of distinct variables with its verdict. Failures that
/// concern a single pair (an undecided search, a capped search) are reported
/// per pair.
pub fn all_causes(
    team: &CausalTeam,
    kind: CauseKind,
    options: &CauseOptions,
) -> Result<Vec<PairVerdict>, CauseError> {
    let team = prepare(team, options)?;
    let vars = team.domain().to_vec();
    let mut search = Search::new(team, options);
    let mut out = Vec::new();
    for x in &vars {
        for y in &vars {
            if x != y {
                out.push((x.clone(), y.clone(), search.run(kind, x, y)));
            }
        }
    }
    Ok(out)
}

/// The defining formulas instantiated at `witness`; all of them hold when the
/// witness is genuine.
pub fn witness_formulas(
    kind: CauseKind,
    x: &Variable,
    y: &Variable,
    witness: &CauseWitness,
) -> Vec<Formula> {
    let fix = Intervention::new(witness.fixed.clone());
    let with = |v: &Value| fix.and(&Intervention::new([(x.clone(), v.clone())]));
    match kind {
        CauseKind::Direct => vec![
            Formula::cf(with(&witness.x), Formula::eq(y.clone(), witness.y.clone())),
            Formula::cf(
                with(&witness.x_prime),
                Formula::eq(y.clone(), witness.y_prime.clone()),
            ),
        ],
        CauseKind::ProbabilisticDirect => {
            let event = Formula::eq(y.clone(), witness.y_prime.clone());
            vec![
                Formula::cf(
                    with(&witness.x),
                    Formula::pr_eq(event.clone(), Rational::zero()),
                ),
                Formula::cf(
                    with(&witness.x_prime),
                    Formula::pr_eq(event, Rational::one()),
                ),
            ]
        }
        CauseKind::Total => {
            let single = |v: &Value| Intervention::new([(x.clone(), v.clone())]);
            let inner = Formula::and(
                Formula::cf(
                    single(&witness.x),
                    Formula::eq(y.clone(), witness.y.clone()),
                ),
                Formula::cf(
                    single(&witness.x_prime),
                    Formula::eq(y.clone(), witness.y_prime.clone()),
                ),
            );
            vec![if fix.is_empty() {
                inner
            } else {
                Formula::cf(fix, inner)
            }]
        }
    }
}

fn prepare(team: &CausalTeam, options: &CauseOptions) -> Result<CausalTeam, CauseError> {
    if !team.is_recursive() {
        return Err(CauseError::NonRecursive);
    }
    if team.is_fully_defined() {
        return Ok(team.clone());
    }
    if !options.eval.complete_partial {
        return Err(CauseError::NotFullyDefined);
    }
    complete_partial(team).map_err(|e| match e {
        InterventionError::NonRecursive => CauseError::NonRecursive,
        _ => CauseError::NotFullyDefined,
    })
}

struct Search {
    ev: Evaluator,
    cap: Option<u64>,
    /// First formal-entry error seen, reported if no witness turns up.
    undecided: Option<SemanticsError>,
}

impl Search {
    fn new(team: CausalTeam, options: &CauseOptions) -> Self {
        Search {
            ev: Evaluator::with_team(team, options.eval.policy),
            cap: options.max_search,
            undecided: None,
        }
    }

    fn run(
        &mut self,
        kind: CauseKind,
        x: &Variable,
        y: &Variable,
    ) -> Result<CauseVerdict, CauseError> {
        self.undecided = None;
        let team = self.ev.root().clone();
        for v in [x, y] {
            if team.support().column(v).is_none() {
                return Err(CauseError::UnknownVariable(v.clone()));
            }
        }
        if x == y {
            return Err(CauseError::SameVariable(x.clone()));
        }
        if kind == CauseKind::ProbabilisticDirect && team.is_empty() {
            return Err(CauseError::EmptySupport);
        }
        let context: Vec<Variable> = match kind {
            CauseKind::Direct | CauseKind::ProbabilisticDirect => team
                .domain()
                .iter()
                .filter(|v| *v != x && *v != y)
                .cloned()
                .collect(),
            CauseKind::Total => team
                .graph()
                .nondescendants(x)
                .map_err(|_| CauseError::UnknownVariable(x.clone()))?
                .into_iter()
                .collect(),
        };
        let size = team.ranges().product_size(&context);
        if let Some(cap) = self.cap {
            if size > cap {
                return Err(CauseError::SearchTooLarge { size, cap });
            }
        }
        let xs = team.ranges().get(x).expect("known variable").to_vec();
        let ys = team.ranges().get(y).expect("known variable").to_vec();
        for tuple in team.ranges().product(&context) {
            let fixed: BTreeMap<Variable, Value> = context.iter().cloned().zip(tuple).collect();
            let witness = match kind {
                CauseKind::Direct | CauseKind::Total => {
                    // outcomes[i]: the values y with a true counterfactual under xs[i]
                    let mut outcomes = Vec::with_capacity(xs.len());
                    for xv in &xs {
                        let mut holds = Vec::new();
                        for yv in &ys {
                            let phi = self.deterministic(kind, &fixed, x, xv, y, yv);
                            if self.check(&phi)? {
                                holds.push(yv.clone());
                            }
                        }
                        outcomes.push(holds);
                    }
                    first_pair(&xs, &outcomes)
                }
                CauseKind::ProbabilisticDirect => self.probabilistic(&fixed, x, &xs, y, &ys)?,
            };
            if let Some((i, j, yv, yv_prime)) = witness {
                return Ok(CauseVerdict::found(Some(CauseWitness {
                    fixed,
                    x: xs[i].clone(),
                    x_prime: xs[j].clone(),
                    y: yv,
                    y_prime: yv_prime,
                })));
            }
        }
        match self.undecided.take() {
            Some(e) => Err(CauseError::Undecided(e)),
            None => Ok(CauseVerdict::found(None)),
        }
    }

    fn deterministic(
        &self,
        kind: CauseKind,
        fixed: &BTreeMap<Variable, Value>,
        x: &Variable,
        xv: &Value,
        y: &Variable,
        yv: &Value,
    ) -> Formula {
        let fix = Intervention::new(fixed.clone());
        let set_x = Intervention::new([(x.clone(), xv.clone())]);
        let target = Formula::eq(y.clone(), yv.clone());
        match kind {
            CauseKind::Total if !fix.is_empty() => Formula::cf(fix, Formula::cf(set_x, target)),
            CauseKind::Total => Formula::cf(set_x, target),
            _ => Formula::cf(fix.and(&set_x), target),
        }
    }

    /// `(i, j, y, y')` with `Pr(Y=y') = 0` under `xs[i]`, `= 1` under `xs[j]`.
    fn probabilistic(
        &mut self,
        fixed: &BTreeMap<Variable, Value>,
        x: &Variable,
        xs: &[Value],
        y: &Variable,
        ys: &[Value],
    ) -> Result<Option<(usize, usize, Value, Value)>, CauseError> {
        let fix = Intervention::new(fixed.clone());
        let mut zero = Vec::with_capacity(xs.len());
        let mut one = Vec::with_capacity(xs.len());
        for xv in xs {
            let iv = fix.and(&Intervention::new([(x.clone(), xv.clone())]));
            let (mut z, mut o) = (Vec::new(), Vec::new());
            for yv in ys {
                let event = Formula::eq(y.clone(), yv.clone());
                let is = |p: Rational| Formula::cf(iv.clone(), Formula::pr_eq(event.clone(), p));
                z.push(self.check(&is(Rational::zero()))?);
                o.push(self.check(&is(Rational::one()))?);
            }
            zero.push(z);
            one.push(o);
        }
        for (i, zero_i) in zero.iter().enumerate() {
            for (j, one_j) in one.iter().enumerate() {
                if i == j {
                    continue;
                }
                for (k, yv) in ys.iter().enumerate() {
                    if zero_i[k] && one_j[k] {
                        let possible = ys
                            .iter()
                            .enumerate()
                            .find(|(l, _)| !zero_i[*l])
                            .map(|(_, v)| v.clone())
                            .unwrap_or_else(|| yv.clone());
                        return Ok(Some((i, j, possible, yv.clone())));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Formal outcomes count as unverified rather than false.
    fn check(&mut self, phi: &Formula) -> Result<bool, CauseError> {
        match self.ev.check(phi) {
            Ok(b) => Ok(b),
            Err(e @ SemanticsError::FormalEntryEncountered { .. }) => {
                self.undecided.get_or_insert(e);
                Ok(false)
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// First `(i, j, y, y')` in search order with `i != j`, `y` in `outcomes[i]`,
/// `y'` in `outcomes[j]` and `y != y'`.
fn first_pair(xs: &[Value], outcomes: &[Vec<Value>]) -> Option<(usize, usize, Value, Value)> {
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            if i == j {
                continue;
            }
            for a in &outcomes[i] {
                for b in &outcomes[j] {
                    if a != b {
                        return Some((i, j, a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    None
}
