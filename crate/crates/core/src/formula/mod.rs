//! Formulas of the causal languages CO, CO^neg, CD and PCD.
//!
//! Concrete syntax (ASCII): `X=1`, `X!=1`, `dep(X,Y; Z)`, `&` (conjunction),
//! `|` (tensor disjunction), `||` (boolean disjunction), `=>` (selective
//! implication), `~>` (interventionist counterfactual), prefix `-` (dual
//! negation), prefix `!` (contradictory negation, probabilistic literals
//! only) and `Pr(χ) <= ε`, `Pr(χ) >= Pr(θ)` and friends. Binding strength,
//! tightest first: prefix operators, `&`, `|`, `||`, then the right
//! associative `=>` / `~>`.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::intervention::Intervention;
use crate::value::{Value, Variable};

pub use parser::{parse, parse_intervention, ParseError};

/// Exact rational used for probability bounds.
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Variable, Value),
    Neq(Variable, Value),
    /// `dep(Xs; Y)`
    Dep(Vec<Variable>, Variable),
    And(Box<Formula>, Box<Formula>),
    /// Tensor disjunction.
    Or(Box<Formula>, Box<Formula>),
    /// Boolean disjunction.
    BOr(Box<Formula>, Box<Formula>),
    /// Selective implication.
    Sel(Box<Formula>, Box<Formula>),
    /// Interventionist counterfactual.
    Cf(Intervention, Box<Formula>),
    /// Dual negation.
    DualNeg(Box<Formula>),
    /// Contradictory negation of a probabilistic literal.
    ContraNeg(Box<Formula>),
    PrLeqConst(Box<Formula>, Rational),
    PrGeqConst(Box<Formula>, Rational),
    PrLeqPr(Box<Formula>, Box<Formula>),
    PrGeqPr(Box<Formula>, Box<Formula>),
}

/// Smart constructors.
impl Formula {
    pub fn eq(x: impl Into<Variable>, v: impl Into<Value>) -> Formula {
        Formula::Eq(x.into(), v.into())
    }

    pub fn neq(x: impl Into<Variable>, v: impl Into<Value>) -> Formula {
        Formula::Neq(x.into(), v.into())
    }

    pub fn dep<X: Into<Variable>>(
        xs: impl IntoIterator<Item = X>,
        y: impl Into<Variable>,
    ) -> Formula {
        Formula::Dep(xs.into_iter().map(Into::into).collect(), y.into())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn bor(a: Formula, b: Formula) -> Formula {
        Formula::BOr(Box::new(a), Box::new(b))
    }

    pub fn sel(a: Formula, b: Formula) -> Formula {
        Formula::Sel(Box::new(a), Box::new(b))
    }

    pub fn cf(iv: Intervention, b: Formula) -> Formula {
        Formula::Cf(iv, Box::new(b))
    }

    pub fn dual_neg(a: Formula) -> Formula {
        Formula::DualNeg(Box::new(a))
    }

    pub fn contra_neg(a: Formula) -> Formula {
        Formula::ContraNeg(Box::new(a))
    }

    pub fn pr_leq(chi: Formula, eps: Rational) -> Formula {
        Formula::PrLeqConst(Box::new(chi), eps)
    }

    pub fn pr_geq(chi: Formula, eps: Rational) -> Formula {
        Formula::PrGeqConst(Box::new(chi), eps)
    }

    /// `Pr(χ) = ε`
    pub fn pr_eq(chi: Formula, eps: Rational) -> Formula {
        Formula::and(Formula::pr_leq(chi.clone(), eps), Formula::pr_geq(chi, eps))
    }

    /// `Pr(χ) < ε`
    pub fn pr_lt(chi: Formula, eps: Rational) -> Formula {
        Formula::and(
            Formula::pr_leq(chi.clone(), eps),
            Formula::contra_neg(Formula::pr_geq(chi, eps)),
        )
    }

    /// `Pr(χ) > ε`
    pub fn pr_gt(chi: Formula, eps: Rational) -> Formula {
        Formula::and(
            Formula::pr_geq(chi.clone(), eps),
            Formula::contra_neg(Formula::pr_leq(chi, eps)),
        )
    }
}

impl Formula {
    fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Eq(..) | Neq(..) | Dep(..) => vec![],
            And(a, b) | Or(a, b) | BOr(a, b) | Sel(a, b) | PrLeqPr(a, b) | PrGeqPr(a, b) => {
                vec![a, b]
            }
            Cf(_, a) | DualNeg(a) | ContraNeg(a) | PrLeqConst(a, _) | PrGeqConst(a, _) => vec![a],
        }
    }

    fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn has_dependence(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Dep(..)))
    }

    /// Contains a probabilistic literal (and so is not downward closed).
    pub fn has_probability(&self) -> bool {
        self.any(&|f| f.is_probabilistic_atom())
    }

    pub fn is_probabilistic_atom(&self) -> bool {
        matches!(
            self,
            Formula::PrLeqConst(..)
                | Formula::PrGeqConst(..)
                | Formula::PrLeqPr(..)
                | Formula::PrGeqPr(..)
        )
    }

    /// A probabilistic atom or a contradictory negation of a probabilistic literal.
    pub fn is_probabilistic_literal(&self) -> bool {
        match self {
            Formula::ContraNeg(a) => a.is_probabilistic_literal(),
            f => f.is_probabilistic_atom(),
        }
    }

    /// Belongs to CO^neg, whose formulas are flat.
    pub fn is_flat(&self) -> bool {
        !self.any(&|f| {
            matches!(
                f,
                Formula::Dep(..) | Formula::BOr(..) | Formula::ContraNeg(..)
            ) || f.is_probabilistic_atom()
        })
    }

    pub fn is_downward_closed(&self) -> bool {
        !self.has_probability()
    }

    pub fn has_counterfactual(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Cf(..)))
    }

    /// Variables mentioned anywhere, including in antecedents.
    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Formula::Eq(x, _) | Formula::Neq(x, _) => {
                out.insert(x.clone());
            }
            Formula::Dep(xs, y) => {
                out.extend(xs.iter().cloned());
                out.insert(y.clone());
            }
            Formula::Cf(iv, _) => {
                out.extend(iv.variables());
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_variables(out);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LanguageTag {
    Co,
    CoNeg,
    Cd,
    Pcd,
}

impl LanguageTag {
    /// Least language containing both, if any. CO is contained in each of the
    /// other three, which are pairwise incomparable.
    pub fn join(self, other: LanguageTag) -> Option<LanguageTag> {
        use LanguageTag::*;
        match (self, other) {
            (a, b) if a == b => Some(a),
            (Co, b) => Some(b),
            (a, Co) => Some(a),
            _ => None,
        }
    }

    /// Whether every formula of `self` is a formula of `other`.
    pub fn is_sublanguage_of(self, other: LanguageTag) -> bool {
        self.join(other) == Some(other)
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LanguageTag::Co => "CO",
            LanguageTag::CoNeg => "CO_NEG",
            LanguageTag::Cd => "CD",
            LanguageTag::Pcd => "PCD",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ill-formed at {path}: {reason}")]
pub struct IllFormed {
    pub path: String,
    pub reason: String,
}

/// The least of CO, CO^neg, CD, PCD containing `phi`.
pub fn classify(phi: &Formula) -> Result<LanguageTag, IllFormed> {
    classify_at(phi, "root")
}

fn classify_at(phi: &Formula, path: &str) -> Result<LanguageTag, IllFormed> {
    use LanguageTag::*;
    let ill = |reason: String| IllFormed {
        path: path.to_string(),
        reason,
    };
    let join = |a: LanguageTag, b: LanguageTag| {
        a.join(b)
            .ok_or_else(|| ill(format!("mixes {a} and {b} constructs")))
    };
    let sub = |f: &Formula, step: &str| classify_at(f, &format!("{path}.{step}"));
    match phi {
        Formula::Eq(..) | Formula::Neq(..) => Ok(Co),
        Formula::Dep(..) => Ok(Cd),
        Formula::And(a, b) | Formula::Or(a, b) => join(sub(a, "left")?, sub(b, "right")?),
        Formula::BOr(a, b) => join(join(sub(a, "left")?, sub(b, "right")?)?, Pcd),
        Formula::Sel(theta, psi) => {
            let t = sub(theta, "antecedent")?;
            if !matches!(t, Co | CoNeg) {
                return Err(ill(
                    "selective antecedent must be free of dependence atoms and probabilistic constructs"
                        .into(),
                ));
            }
            join(t, sub(psi, "consequent")?)
        }
        Formula::Cf(iv, psi) => {
            if iv.pairs().is_empty() {
                return Err(ill("counterfactual antecedent is empty".into()));
            }
            sub(psi, "consequent")
        }
        Formula::DualNeg(a) => join(CoNeg, sub(a, "operand")?),
        Formula::ContraNeg(a) => {
            if !a.is_probabilistic_literal() {
                return Err(ill("`!` applies to probabilistic literals only".into()));
            }
            sub(a, "operand")
        }
        Formula::PrLeqConst(chi, eps) | Formula::PrGeqConst(chi, eps) => {
            if *eps < Rational::zero() || *eps > Rational::one() {
                return Err(ill(format!("probability bound {eps} outside [0,1]")));
            }
            if sub(chi, "event")? != Co {
                return Err(ill("probability events must be CO formulas".into()));
            }
            Ok(Pcd)
        }
        Formula::PrLeqPr(chi, theta) | Formula::PrGeqPr(chi, theta) => {
            if sub(chi, "left_event")? != Co || sub(theta, "right_event")? != Co {
                return Err(ill("probability events must be CO formulas".into()));
            }
            Ok(Pcd)
        }
    }
}

/// Print precedence: higher binds tighter.
fn level(phi: &Formula) -> u8 {
    match phi {
        Formula::Sel(..) | Formula::Cf(..) => 0,
        Formula::BOr(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::DualNeg(..) | Formula::ContraNeg(..) => 4,
        _ => 5,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    if level(phi) < min {
        f.write_str("(")?;
        write_formula(f, phi)?;
        f.write_str(")")
    } else {
        write_formula(f, phi)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula) -> fmt::Result {
    match phi {
        Formula::Eq(x, v) => write!(f, "{x}={v}"),
        Formula::Neq(x, v) => write!(f, "{x}!={v}"),
        Formula::Dep(xs, y) => {
            let names: Vec<&str> = xs.iter().map(Variable::name).collect();
            write!(f, "dep({}; {y})", names.join(","))
        }
        Formula::And(a, b) => {
            write_at(f, a, 3)?;
            f.write_str(" & ")?;
            write_at(f, b, 4)
        }
        Formula::Or(a, b) => {
            write_at(f, a, 2)?;
            f.write_str(" | ")?;
            write_at(f, b, 3)
        }
        Formula::BOr(a, b) => {
            write_at(f, a, 1)?;
            f.write_str(" || ")?;
            write_at(f, b, 2)
        }
        Formula::Sel(a, b) => {
            write_at(f, a, 1)?;
            f.write_str(" => ")?;
            write_at(f, b, 0)
        }
        Formula::Cf(iv, b) => {
            write!(f, "{iv} ~> ")?;
            write_at(f, b, 0)
        }
        Formula::DualNeg(a) => {
            f.write_str("-")?;
            write_at(f, a, 4)
        }
        Formula::ContraNeg(a) => {
            f.write_str("!")?;
            write_at(f, a, 4)
        }
        Formula::PrLeqConst(chi, eps) => {
            write!(f, "Pr({chi}) <= ")?;
            write_rational(f, eps)
        }
        Formula::PrGeqConst(chi, eps) => {
            write!(f, "Pr({chi}) >= ")?;
            write_rational(f, eps)
        }
        Formula::PrLeqPr(a, b) => write!(f, "Pr({a}) <= Pr({b})"),
        Formula::PrGeqPr(a, b) => write!(f, "Pr({a}) >= Pr({b})"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn printing() {
        let iv = Intervention::new([("X", 1), ("Z", 2)]);
        assert_eq!(
            Formula::cf(iv, Formula::eq("Y", 3)).to_string(),
            "X=1 & Z=2 ~> Y=3"
        );
        assert_eq!(Formula::dep(["X1", "X2"], "Y").to_string(), "dep(X1,X2; Y)");
        assert_eq!(
            Formula::PrGeqPr(Box::new(Formula::eq("X", 1)), Box::new(Formula::eq("Y", 2)))
                .to_string(),
            "Pr(X=1) >= Pr(Y=2)"
        );
        assert_eq!(
            Formula::pr_lt(Formula::eq("X", 1), r(1, 3)).to_string(),
            "Pr(X=1) <= 1/3 & !Pr(X=1) >= 1/3"
        );
        let nested = Formula::and(
            Formula::eq("A", 1),
            Formula::or(Formula::eq("B", 1), Formula::eq("C", 1)),
        );
        assert_eq!(nested.to_string(), "A=1 & (B=1 | C=1)");
        let sel_left = Formula::sel(
            Formula::sel(Formula::eq("A", 1), Formula::eq("B", 1)),
            Formula::eq("C", 1),
        );
        assert_eq!(sel_left.to_string(), "(A=1 => B=1) => C=1");
    }

    #[test]
    fn classification() {
        use LanguageTag::*;
        assert_eq!(classify(&Formula::dep(["X"], "Y")), Ok(Cd));
        assert_eq!(classify(&Formula::dual_neg(Formula::eq("X", 1))), Ok(CoNeg));
        assert_eq!(classify(&Formula::eq("X", 1)), Ok(Co));
        assert_eq!(
            classify(&Formula::bor(Formula::eq("X", 1), Formula::eq("X", 2))),
            Ok(Pcd)
        );
        assert_eq!(
            classify(&Formula::sel(Formula::eq("Z", 1), Formula::dep(["X"], "Y"))),
            Ok(Cd)
        );
        let bad = Formula::sel(Formula::dep(["X"], "Y"), Formula::eq("Z", 1));
        let err = classify(&bad).unwrap_err();
        assert_eq!(err.path, "root");
        let mixed = Formula::and(
            Formula::dep(["X"], "Y"),
            Formula::dual_neg(Formula::eq("X", 1)),
        );
        assert!(classify(&mixed).is_err());
        let pr_dep = Formula::and(
            Formula::dep(["X"], "Y"),
            Formula::pr_leq(Formula::eq("X", 1), r(1, 2)),
        );
        assert!(classify(&pr_dep).is_err());
        assert!(classify(&Formula::contra_neg(Formula::eq("X", 1))).is_err());
        assert!(classify(&Formula::pr_leq(Formula::eq("X", 1), r(3, 2))).is_err());
        let pr_of_dep = Formula::pr_leq(Formula::dep(["X"], "Y"), r(1, 2));
        assert_eq!(classify(&pr_of_dep).unwrap_err().path, "root");
        let cf_in_event = Formula::pr_leq(
            Formula::cf(Intervention::new([("X", 1)]), Formula::eq("Y", 1)),
            r(1, 2),
        );
        assert_eq!(classify(&cf_in_event), Ok(Pcd));
        assert!(classify(&Formula::cf(
            Intervention::new(Vec::<(&str, i64)>::new()),
            Formula::eq("Y", 1)
        ))
        .is_err());
    }

    #[test]
    fn join_table() {
        use LanguageTag::*;
        let all = [Co, CoNeg, Cd, Pcd];
        for a in all {
            assert!(Co.is_sublanguage_of(a));
            for b in all {
                assert_eq!(a.join(b), b.join(a));
                if let Some(j) = a.join(b) {
                    assert!(a.is_sublanguage_of(j) && b.is_sublanguage_of(j));
                }
            }
        }
        assert_eq!(Cd.join(CoNeg), None);
    }

    #[test]
    fn syntactic_predicates() {
        let f = Formula::sel(
            Formula::eq("A", 1),
            Formula::pr_leq(Formula::eq("B", 1), r(1, 2)),
        );
        assert!(f.has_probability());
        assert!(!f.is_downward_closed());
        assert!(!f.is_flat());
        assert!(Formula::dual_neg(Formula::eq("A", 1)).is_flat());
        assert!(!Formula::dep(["A"], "B").is_flat());
        assert_eq!(
            Formula::cf(Intervention::new([("Q", 1)]), Formula::dep(["A"], "B")).variables(),
            ["A", "B", "Q"].into_iter().map(Variable::from).collect()
        );
    }
}
