//! Falsifiability and admissibility on teams that may carry formal entries.

use std::collections::BTreeSet;

use crate::formula::Formula;
use crate::team::CausalTeam;
use crate::value::{ExtendedValue, Variable};

use super::{check_variables, split, EvalOptions, Evaluator, SemanticsError, MAX_PARTITION_ROWS};

pub fn falsifies(team: &CausalTeam, phi: &Formula) -> Result<bool, SemanticsError> {
    falsifies_with(team, phi, &EvalOptions::default())
}

/// `T ⊨^f φ` for `φ` built from literals, dependence atoms, `&`, `|`, `=>`
/// and `~>`.
pub fn falsifies_with(
    team: &CausalTeam,
    phi: &Formula,
    options: &EvalOptions,
) -> Result<bool, SemanticsError> {
    check_fragment(phi)?;
    let mut ev = Evaluator::new(team, phi, options)?;
    let all: Vec<usize> = (0..ev.root().len()).collect();
    falsify(&mut ev, 0, &all, phi)
}

fn check_fragment(phi: &Formula) -> Result<(), SemanticsError> {
    match phi {
        Formula::Eq(..) | Formula::Neq(..) | Formula::Dep(..) => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_fragment(a)?;
            check_fragment(b)
        }
        // the antecedent is evaluated for truth
        Formula::Sel(_, b) | Formula::Cf(_, b) => check_fragment(b),
        other => Err(SemanticsError::NotSupported(other.to_string())),
    }
}

fn entry<'a>(
    team: &'a CausalTeam,
    row: usize,
    v: &Variable,
) -> Result<&'a ExtendedValue, SemanticsError> {
    team.support()
        .value(row, v)
        .ok_or_else(|| SemanticsError::UnknownVariable(v.clone()))
}

fn falsify(
    ev: &mut Evaluator,
    t: usize,
    rows: &[usize],
    phi: &Formula,
) -> Result<bool, SemanticsError> {
    let key = (t, phi as *const Formula as usize, 1u8, rows.to_vec());
    if let Some(v) = ev.memo_get(&key) {
        return Ok(v);
    }
    let out = falsify_uncached(ev, t, rows, phi)?;
    ev.memo_put(key, out);
    Ok(out)
}

fn falsify_uncached(
    ev: &mut Evaluator,
    t: usize,
    rows: &[usize],
    phi: &Formula,
) -> Result<bool, SemanticsError> {
    let team = ev.team(t);
    match phi {
        Formula::Eq(x, v) | Formula::Neq(x, v) => {
            let eq = matches!(phi, Formula::Eq(..));
            for &i in rows {
                if let ExtendedValue::Value(w) = entry(&team, i, x)? {
                    if (w == v) != eq {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
        Formula::Dep(xs, y) => {
            for (k, &i) in rows.iter().enumerate() {
                for &j in &rows[k + 1..] {
                    let (yi, yj) = (entry(&team, i, y)?, entry(&team, j, y)?);
                    if !(yi.is_concrete() && yj.is_concrete()) || yi == yj {
                        continue;
                    }
                    let mut agree = true;
                    for x in xs {
                        if entry(&team, i, x)? != entry(&team, j, x)? {
                            agree = false;
                            break;
                        }
                    }
                    if agree {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
        Formula::And(a, b) => Ok(falsify(ev, t, rows, a)? || falsify(ev, t, rows, b)?),
        Formula::Or(a, b) => {
            // falsifiability is preserved by supersets, so covers reduce to partitions
            let n = rows.len();
            if n > MAX_PARTITION_ROWS {
                return Err(SemanticsError::SearchTooLarge {
                    rows: n,
                    limit: MAX_PARTITION_ROWS,
                });
            }
            for mask in 0u64..(1 << n) {
                let (left, right) = split(rows, |k| mask & (1 << k) != 0);
                if !falsify(ev, t, &left, a)? && !falsify(ev, t, &right, b)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Sel(theta, chi) => {
            let vars = theta.variables();
            let selected = certain_selection(ev, t, rows, theta, &vars)?;
            falsify(ev, t, &selected, chi)
        }
        Formula::Cf(iv, chi) => {
            if !iv.is_consistent() {
                return Ok(false);
            }
            let (u, image) = ev.intervene(t, rows, iv)?;
            falsify(ev, u, &image, chi)
        }
        other => Err(SemanticsError::NotSupported(other.to_string())),
    }
}

/// The rows certainly selected by `θ`. A row with a formal entry on a variable
/// of `θ` might or might not belong to `T^θ`, so it cannot serve as evidence
/// against the consequent and is left out.
fn certain_selection(
    ev: &mut Evaluator,
    t: usize,
    rows: &[usize],
    theta: &Formula,
    vars: &BTreeSet<Variable>,
) -> Result<Vec<usize>, SemanticsError> {
    let team = ev.team(t);
    let mut out = Vec::new();
    for &i in rows {
        let mut unknown = false;
        for v in vars {
            if !entry(&team, i, v)?.is_concrete() {
                unknown = true;
                break;
            }
        }
        let keep = !unknown
            && match ev.eval(t, &[i], theta) {
                Ok(b) => b,
                Err(SemanticsError::FormalEntryEncountered { .. }) => false,
                Err(e) => return Err(e),
            };
        if keep {
            out.push(i);
        }
    }
    Ok(out)
}

/// `T ⊨^a φ` for an atom or a disjunction of conjunctions of literals.
pub fn admits(team: &CausalTeam, phi: &Formula) -> Result<bool, SemanticsError> {
    check_variables(team, phi)?;
    let s = team.support();
    if let Formula::Dep(xs, y) = phi {
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let (yi, yj) = (entry(team, i, y)?, entry(team, j, y)?);
                if !(yi.is_concrete() && yj.is_concrete()) || yi == yj {
                    continue;
                }
                let mut agree = true;
                for x in xs {
                    if entry(team, i, x)? != entry(team, j, x)? {
                        agree = false;
                        break;
                    }
                }
                if agree {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let disjuncts = dnf(phi).ok_or_else(|| SemanticsError::NotDnf(phi.to_string()))?;
    // Every condition is rowwise, so the best subteam for a disjunct is the set
    // of rows admitting it; the subteams must cover the support.
    for i in 0..s.len() {
        let mut covered = false;
        for literals in &disjuncts {
            if row_admits(team, i, literals)? {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A literal `X = v` (`positive`) or `X != v`.
struct Literal<'a> {
    variable: &'a Variable,
    value: &'a crate::value::Value,
    positive: bool,
}

fn dnf(phi: &Formula) -> Option<Vec<Vec<Literal<'_>>>> {
    fn conj<'a>(phi: &'a Formula, out: &mut Vec<Literal<'a>>) -> bool {
        match phi {
            Formula::Eq(x, v) => out.push(Literal {
                variable: x,
                value: v,
                positive: true,
            }),
            Formula::Neq(x, v) => out.push(Literal {
                variable: x,
                value: v,
                positive: false,
            }),
            Formula::And(a, b) => return conj(a, out) && conj(b, out),
            _ => return false,
        }
        true
    }
    fn disj<'a>(phi: &'a Formula, out: &mut Vec<Vec<Literal<'a>>>) -> bool {
        match phi {
            Formula::Or(a, b) => disj(a, out) && disj(b, out),
            f => {
                let mut lits = Vec::new();
                let ok = conj(f, &mut lits);
                out.push(lits);
                ok
            }
        }
    }
    let mut out = Vec::new();
    disj(phi, &mut out).then_some(out)
}

fn row_admits(team: &CausalTeam, row: usize, literals: &[Literal]) -> Result<bool, SemanticsError> {
    for lit in literals {
        if let ExtendedValue::Value(w) = entry(team, row, lit.variable)? {
            if (w == lit.value) != lit.positive {
                return Ok(false);
            }
        }
    }
    for (j, p) in literals.iter().enumerate() {
        if !p.positive {
            continue;
        }
        for (k, q) in literals.iter().enumerate() {
            // X=a against Y=b with a != b, or against Y!=a
            let clash = j != k
                && ((q.positive && q.value != p.value) || (!q.positive && q.value == p.value));
            if clash && entry(team, row, p.variable)? == entry(team, row, q.variable)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
