//! Satisfaction relations: truth (`⊨`), falsifiability (`⊨^f`) and
//! admissibility (`⊨^a`), plus exact probabilities over multiteams.
//!
//! The tensor disjunction quantifies over splits of the support, which is
//! exponential in the number of rows. Flat disjuncts are decided row by row;
//! when one side is flat and the other downward closed the flat side takes
//! every row it can; two downward closed sides range over partitions and
//! anything else over covers. Results are memoized per evaluation on
//! `(team, subformula, rows)`.

mod modal;

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::formula::Formula;
use crate::formula::{classify, IllFormed, LanguageTag, Rational};
use crate::intervention::{
    complete_partial, intervene_rowwise, Intervention, InterventionError, RowwiseIntervention,
    SolutionPolicy,
};
use crate::team::CausalTeam;
use crate::value::{ExtendedValue, Variable};

pub use modal::{admits, falsifies, falsifies_with};

/// Largest support on which a split search is attempted.
const MAX_PARTITION_ROWS: usize = 24;
const MAX_COVER_ROWS: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    IllFormed(#[from] IllFormed),
    #[error("unknown variable {0}")]
    UnknownVariable(Variable),
    #[error("unsupported policy: {0}")]
    UnsupportedPolicy(String),
    #[error("row {row} holds a formal term for {variable}; truth is undefined there (try falsifiability or admissibility)")]
    FormalEntryEncountered { variable: Variable, row: usize },
    #[error(transparent)]
    Intervention(#[from] InterventionError),
    #[error("probability on an empty support")]
    EmptySupport,
    #[error("probability events must be CO formulas, found {0}")]
    NotCo(String),
    #[error("{0} is outside the falsifiability fragment")]
    NotSupported(String),
    #[error("admissibility is decided for atoms and classical DNF formulas only, not {0}")]
    NotDnf(String),
    #[error("split search over {rows} rows exceeds the limit of {limit}")]
    SearchTooLarge { rows: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// `None` picks the staged algorithm on acyclic graphs and unique
    /// solutions otherwise.
    pub policy: Option<SolutionPolicy>,
    /// Complete partially defined recursive teams before evaluating `~>`.
    pub complete_partial: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            policy: None,
            complete_partial: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Truth,
    Falsifiability,
    Admissibility,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Truth => "truth",
            Relation::Falsifiability => "falsifiability",
            Relation::Admissibility => "admissibility",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Judgment {
    pub relation: Relation,
    pub verdict: bool,
}

/// `Pr_T(χ)` as an unreduced count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probability {
    pub favorable: u64,
    pub total: u64,
}

impl Probability {
    pub fn value(&self) -> Rational {
        Rational::new(self.favorable as i64, self.total as i64)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.value();
        if *r.denom() == 1 {
            write!(f, "{}", r.numer())
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())
        }
    }
}

/// A subteam or intervened team visited while evaluating, for `--explain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStep {
    Complete {
        team: CausalTeam,
    },
    Restrict {
        selector: Formula,
        team: CausalTeam,
    },
    Intervene {
        intervention: Intervention,
        team: CausalTeam,
    },
}

pub fn satisfies(team: &CausalTeam, phi: &Formula) -> Result<bool, SemanticsError> {
    satisfies_with(team, phi, &EvalOptions::default())
}

pub fn satisfies_with(
    team: &CausalTeam,
    phi: &Formula,
    options: &EvalOptions,
) -> Result<bool, SemanticsError> {
    Evaluator::new(team, phi, options)?.truth(phi)
}

/// The verdict together with the restrictions and interventions applied to
/// the whole team along the way.
pub fn explain(
    team: &CausalTeam,
    phi: &Formula,
    options: &EvalOptions,
) -> Result<(bool, Vec<TraceStep>), SemanticsError> {
    let mut ev = Evaluator::new(team, phi, options)?;
    ev.tracing = true;
    let verdict = ev.truth(phi)?;
    Ok((verdict, ev.trace))
}

pub fn judge(
    team: &CausalTeam,
    phi: &Formula,
    relation: Relation,
    options: &EvalOptions,
) -> Result<Judgment, SemanticsError> {
    let verdict = match relation {
        Relation::Truth => satisfies_with(team, phi, options)?,
        Relation::Falsifiability => falsifies_with(team, phi, options)?,
        Relation::Admissibility => admits(team, phi)?,
    };
    Ok(Judgment { relation, verdict })
}

/// `{s} ⊨ φ` for the `row`-th assignment.
pub fn row_satisfies(team: &CausalTeam, row: usize, phi: &Formula) -> Result<bool, SemanticsError> {
    let mut ev = Evaluator::new(team, phi, &EvalOptions::default())?;
    ev.eval(0, &[row], phi)
}

/// Indices of the rows whose singleton satisfies `theta`.
pub fn selected_rows(team: &CausalTeam, theta: &Formula) -> Result<Vec<usize>, SemanticsError> {
    let mut ev = Evaluator::new(team, theta, &EvalOptions::default())?;
    let all: Vec<usize> = (0..team.len()).collect();
    ev.select(0, &all, theta)
}

/// `Pr_T(χ)` for `χ` in CO.
pub fn probability(team: &CausalTeam, chi: &Formula) -> Result<Probability, SemanticsError> {
    probability_with(team, chi, &EvalOptions::default())
}

pub fn probability_with(
    team: &CausalTeam,
    chi: &Formula,
    options: &EvalOptions,
) -> Result<Probability, SemanticsError> {
    let tag = classify(chi)?;
    if tag != LanguageTag::Co {
        return Err(SemanticsError::NotCo(tag.to_string()));
    }
    if team.is_empty() {
        return Err(SemanticsError::EmptySupport);
    }
    let mut ev = Evaluator::new(team, chi, options)?;
    let all: Vec<usize> = (0..team.len()).collect();
    ev.count(0, &all, chi)
}

pub(crate) fn check_variables(team: &CausalTeam, phi: &Formula) -> Result<(), SemanticsError> {
    for v in phi.variables() {
        if team.support().column(&v).is_none() {
            return Err(SemanticsError::UnknownVariable(v));
        }
    }
    Ok(())
}

fn map_intervention_error(e: InterventionError) -> SemanticsError {
    match e {
        InterventionError::NonRecursive => SemanticsError::UnsupportedPolicy(
            "the staged algorithm needs an acyclic graph; use unique or at-most-unique solutions"
                .into(),
        ),
        e => SemanticsError::Intervention(e),
    }
}

type MemoKey = (usize, usize, u8, Vec<usize>);

/// Evaluation state: the teams reached by interventions (by id, the root team
/// is 0), cached interventions and memoized verdicts.
pub(crate) struct Evaluator {
    teams: Vec<Rc<CausalTeam>>,
    policy: SolutionPolicy,
    interventions: HashMap<(usize, Intervention), (usize, Rc<RowwiseIntervention>)>,
    memo: HashMap<MemoKey, bool>,
    tracing: bool,
    trace: Vec<TraceStep>,
}

impl Evaluator {
    pub(crate) fn new(
        team: &CausalTeam,
        phi: &Formula,
        options: &EvalOptions,
    ) -> Result<Evaluator, SemanticsError> {
        classify(phi)?;
        check_variables(team, phi)?;
        let mut trace = Vec::new();
        let root = if phi.has_counterfactual()
            && options.complete_partial
            && !team.is_fully_defined()
            && team.is_recursive()
        {
            let completed = complete_partial(team).map_err(map_intervention_error)?;
            trace.push(TraceStep::Complete {
                team: completed.clone(),
            });
            completed
        } else {
            team.clone()
        };
        let mut ev = Evaluator::with_team(root, options.policy);
        ev.trace = trace;
        Ok(ev)
    }

    /// An evaluator over `team` as given, with no completion step.
    pub(crate) fn with_team(team: CausalTeam, policy: Option<SolutionPolicy>) -> Evaluator {
        let policy = policy.unwrap_or(if team.is_recursive() {
            SolutionPolicy::Recursive
        } else {
            SolutionPolicy::UniqueSolutions
        });
        Evaluator {
            teams: vec![Rc::new(team)],
            policy,
            interventions: HashMap::new(),
            memo: HashMap::new(),
            tracing: false,
            trace: Vec::new(),
        }
    }

    /// `T ⊨ φ` on the root team for a formula that may not outlive this call.
    /// Memoized verdicts are keyed by formula address, so they are dropped
    /// first; cached interventions are kept.
    pub(crate) fn check(&mut self, phi: &Formula) -> Result<bool, SemanticsError> {
        classify(phi)?;
        check_variables(self.root(), phi)?;
        self.memo.clear();
        self.truth(phi)
    }

    pub(crate) fn root(&self) -> &CausalTeam {
        &self.teams[0]
    }

    pub(crate) fn team(&self, t: usize) -> Rc<CausalTeam> {
        Rc::clone(&self.teams[t])
    }

    fn all_rows(&self, t: usize) -> Vec<usize> {
        (0..self.teams[t].len()).collect()
    }

    pub(crate) fn truth(&mut self, phi: &Formula) -> Result<bool, SemanticsError> {
        let all = self.all_rows(0);
        self.eval(0, &all, phi)
    }

    /// Runs `f` with tracing switched off, for evaluations on proper subteams.
    fn quietly<R>(&mut self, f: impl FnOnce(&mut Self) -> R) -> R {
        let saved = std::mem::replace(&mut self.tracing, false);
        let out = f(self);
        self.tracing = saved;
        out
    }

    fn read(
        team: &CausalTeam,
        row: usize,
        column: usize,
    ) -> Result<&crate::value::Value, SemanticsError> {
        match team.support().rows()[row].get(column) {
            ExtendedValue::Value(v) => Ok(v),
            ExtendedValue::Term(_) => Err(SemanticsError::FormalEntryEncountered {
                variable: team.domain()[column].clone(),
                row,
            }),
        }
    }

    fn column(team: &CausalTeam, v: &Variable) -> Result<usize, SemanticsError> {
        team.support()
            .column(v)
            .ok_or_else(|| SemanticsError::UnknownVariable(v.clone()))
    }

    /// `T ⊨ φ` on the subteam of team `t` given by `rows`.
    pub(crate) fn eval(
        &mut self,
        t: usize,
        rows: &[usize],
        phi: &Formula,
    ) -> Result<bool, SemanticsError> {
        let memoize = !matches!(phi, Formula::Eq(..) | Formula::Neq(..)) && !self.tracing;
        let key = (t, phi as *const Formula as usize, 0u8, rows.to_vec());
        if memoize {
            if let Some(&v) = self.memo.get(&key) {
                return Ok(v);
            }
        }
        let out = self.eval_uncached(t, rows, phi)?;
        if memoize {
            self.memo.insert(key, out);
        }
        Ok(out)
    }

    fn eval_uncached(
        &mut self,
        t: usize,
        rows: &[usize],
        phi: &Formula,
    ) -> Result<bool, SemanticsError> {
        let team = self.team(t);
        match phi {
            Formula::Eq(x, v) | Formula::Neq(x, v) => {
                let c = Self::column(&team, x)?;
                let want = matches!(phi, Formula::Eq(..));
                for &i in rows {
                    if (Self::read(&team, i, c)? == v) != want {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Dep(xs, y) => {
                let cx = xs
                    .iter()
                    .map(|x| Self::column(&team, x))
                    .collect::<Result<Vec<_>, _>>()?;
                let cy = Self::column(&team, y)?;
                let mut seen = HashMap::new();
                for &i in rows {
                    let key = cx
                        .iter()
                        .map(|&c| Self::read(&team, i, c))
                        .collect::<Result<Vec<_>, _>>()?;
                    let val = Self::read(&team, i, cy)?;
                    if *seen.entry(key).or_insert(val) != val {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::And(a, b) => Ok(self.eval(t, rows, a)? && self.eval(t, rows, b)?),
            Formula::Or(a, b) => self.quietly(|ev| ev.eval_or(t, rows, a, b)),
            Formula::BOr(a, b) => Ok(self.eval(t, rows, a)? || self.eval(t, rows, b)?),
            Formula::Sel(theta, psi) => {
                let selected = self.select(t, rows, theta)?;
                if self.tracing {
                    self.trace.push(TraceStep::Restrict {
                        selector: (**theta).clone(),
                        team: team.subteam(&selected),
                    });
                }
                self.eval(t, &selected, psi)
            }
            Formula::Cf(iv, psi) => {
                if !iv.is_consistent() {
                    return Ok(true);
                }
                let (u, image) = self.intervene(t, rows, iv)?;
                if self.tracing {
                    self.trace.push(TraceStep::Intervene {
                        intervention: iv.clone(),
                        team: self.teams[u].subteam(&image),
                    });
                }
                self.eval(u, &image, psi)
            }
            Formula::DualNeg(a) => self.quietly(|ev| {
                for &i in rows {
                    if ev.eval(t, &[i], a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }),
            Formula::ContraNeg(a) => Ok(!self.eval(t, rows, a)?),
            Formula::PrLeqConst(chi, eps) | Formula::PrGeqConst(chi, eps) => {
                if rows.is_empty() {
                    return Ok(false);
                }
                let p = self.count(t, rows, chi)?.value();
                Ok(match phi {
                    Formula::PrLeqConst(..) => p <= *eps,
                    _ => p >= *eps,
                })
            }
            Formula::PrLeqPr(chi, theta) | Formula::PrGeqPr(chi, theta) => {
                if rows.is_empty() {
                    return Ok(false);
                }
                let p = self.count(t, rows, chi)?.value();
                let q = self.count(t, rows, theta)?.value();
                Ok(match phi {
                    Formula::PrLeqPr(..) => p <= q,
                    _ => p >= q,
                })
            }
        }
    }

    /// Rows whose singleton satisfies `theta`.
    pub(crate) fn select(
        &mut self,
        t: usize,
        rows: &[usize],
        theta: &Formula,
    ) -> Result<Vec<usize>, SemanticsError> {
        self.quietly(|ev| {
            let mut out = Vec::new();
            for &i in rows {
                if ev.eval(t, &[i], theta)? {
                    out.push(i);
                }
            }
            Ok(out)
        })
    }

    pub(crate) fn count(
        &mut self,
        t: usize,
        rows: &[usize],
        chi: &Formula,
    ) -> Result<Probability, SemanticsError> {
        let favorable = self.select(t, rows, chi)?.len() as u64;
        Ok(Probability {
            favorable,
            total: rows.len() as u64,
        })
    }

    /// Applies `iv` to the subteam `rows` of team `t`: the id of the intervened
    /// team and the image rows, sorted.
    pub(crate) fn intervene(
        &mut self,
        t: usize,
        rows: &[usize],
        iv: &Intervention,
    ) -> Result<(usize, Vec<usize>), SemanticsError> {
        let key = (t, iv.clone());
        let (u, result) = match self.interventions.get(&key) {
            Some((u, r)) => (*u, Rc::clone(r)),
            None => {
                let r = Rc::new(
                    intervene_rowwise(&self.teams[t], iv, self.policy)
                        .map_err(map_intervention_error)?,
                );
                self.teams.push(Rc::new(r.team.clone()));
                let u = self.teams.len() - 1;
                self.interventions.insert(key, (u, Rc::clone(&r)));
                (u, r)
            }
        };
        let mut image = Vec::with_capacity(rows.len());
        for &i in rows {
            match &result.images[i] {
                Ok(Some(j)) => image.push(*j),
                Ok(None) => {}
                Err(e) => return Err(map_intervention_error(e.clone())),
            }
        }
        image.sort_unstable();
        image.dedup();
        Ok((u, image))
    }

    fn eval_or(
        &mut self,
        t: usize,
        rows: &[usize],
        a: &Formula,
        b: &Formula,
    ) -> Result<bool, SemanticsError> {
        match (a.is_flat(), b.is_flat()) {
            (true, true) => {
                for &i in rows {
                    if !(self.eval(t, &[i], a)? || self.eval(t, &[i], b)?) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (true, false) if b.is_downward_closed() => {
                let rest = self.rest(t, rows, a)?;
                self.eval(t, &rest, b)
            }
            (false, true) if a.is_downward_closed() => {
                let rest = self.rest(t, rows, b)?;
                self.eval(t, &rest, a)
            }
            _ if a.is_downward_closed() && b.is_downward_closed() => {
                let n = rows.len();
                if n > MAX_PARTITION_ROWS {
                    return Err(SemanticsError::SearchTooLarge {
                        rows: n,
                        limit: MAX_PARTITION_ROWS,
                    });
                }
                for mask in 0u64..(1 << n) {
                    let (left, right) = split(rows, |k| mask & (1 << k) != 0);
                    if self.eval(t, &left, a)? && self.eval(t, &right, b)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => {
                let n = rows.len();
                if n > MAX_COVER_ROWS {
                    return Err(SemanticsError::SearchTooLarge {
                        rows: n,
                        limit: MAX_COVER_ROWS,
                    });
                }
                // each row goes left (0), right (1) or both (2)
                let total = 3u64.pow(n as u32);
                for code in 0..total {
                    let mut left = Vec::new();
                    let mut right = Vec::new();
                    let mut c = code;
                    for &i in rows {
                        match c % 3 {
                            0 => left.push(i),
                            1 => right.push(i),
                            _ => {
                                left.push(i);
                                right.push(i);
                            }
                        }
                        c /= 3;
                    }
                    if self.eval(t, &left, a)? && self.eval(t, &right, b)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Rows whose singleton fails the flat formula `a`.
    fn rest(
        &mut self,
        t: usize,
        rows: &[usize],
        a: &Formula,
    ) -> Result<Vec<usize>, SemanticsError> {
        let mut out = Vec::new();
        for &i in rows {
            if !self.eval(t, &[i], a)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub(crate) fn memo_get(&self, key: &MemoKey) -> Option<bool> {
        self.memo.get(key).copied()
    }

    pub(crate) fn memo_put(&mut self, key: MemoKey, v: bool) {
        self.memo.insert(key, v);
    }
}

/// Splits `rows` by position according to `left`.
pub(crate) fn split(rows: &[usize], left: impl Fn(usize) -> bool) -> (Vec<usize>, Vec<usize>) {
    let mut l = Vec::new();
    let mut r = Vec::new();
    for (k, &i) in rows.iter().enumerate() {
        if left(k) {
            l.push(i);
        } else {
            r.push(i);
        }
    }
    (l, r)
}

#[cfg(test)]
mod tests;
