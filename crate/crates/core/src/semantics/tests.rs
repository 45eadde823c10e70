use super::*;
use crate::formula::parse;
use crate::team::TeamBuilder;
use crate::value::ExtendedValue;

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn partial_team() -> CausalTeam {
    CausalTeam::builder()
        .variable("U", [1, 2, 3, 4])
        .variable("X", [1, 2, 3, 4])
        .variable("Y", [1, 2, 3, 4])
        .variable("Z", [1, 2, 3, 4])
        .endogenous("Y", ["X"])
        .endogenous("Z", ["U", "X", "Y"])
        .entry("Z", [4, 1, 2], 3)
        .row([2, 1, 2, 4])
        .row([3, 1, 2, 4])
        .row([1, 3, 3, 1])
        .row([1, 4, 1, 1])
        .row([4, 4, 1, 1])
        .build()
        .unwrap()
}

fn selection_team() -> CausalTeam {
    CausalTeam::builder()
        .variable("X", [1, 2, 3])
        .variable("Y", [1, 2])
        .variable("Z", [1, 2, 3])
        .columns(["Z", "Y", "X"])
        .row([1, 2, 3])
        .row([2, 1, 1])
        .row([3, 2, 1])
        .row([3, 2, 2])
        .build()
        .unwrap()
}

fn column_team(values: &[i64], multiteam: bool) -> CausalTeam {
    let mut b = CausalTeam::builder().variable("X", [1, 2, 3]);
    if multiteam {
        b = b.multiteam();
    }
    for &v in values {
        b = b.row([v]);
    }
    b.build().unwrap()
}

/// Rows (X,Y) = (2,1) and (1, f_Y(1)) under X -> Y.
fn formal_team() -> CausalTeam {
    let y = Variable::from("Y");
    CausalTeam::builder()
        .variable("X", [1, 2])
        .variable("Y", [1, 2])
        .endogenous("Y", ["X"])
        .row([ExtendedValue::from(2), ExtendedValue::from(1)])
        .row([
            ExtendedValue::from(1),
            ExtendedValue::term(y, vec![1.into()]),
        ])
        .build()
        .unwrap()
}

#[test]
fn selective_implication() {
    let t = selection_team();
    assert!(satisfies(&t, &f("Z=3 => Y=2")).unwrap());
    assert!(!satisfies(&t, &f("Z=3 => X=1")).unwrap());
    let (verdict, trace) = explain(&t, &f("Z=3 => Y=2"), &EvalOptions::default()).unwrap();
    assert!(verdict);
    match &trace[..] {
        [TraceStep::Restrict { team, .. }] => {
            assert_eq!(team.render_table(), "X  Y  Z\n1  2  3\n2  2  3\n");
        }
        other => panic!("unexpected trace {other:?}"),
    }
}

#[test]
fn counterfactual_on_partial_team() {
    let t = partial_team();
    assert!(satisfies(&t, &f("X=1 ~> Y=2")).unwrap());
    assert!(!satisfies(&t, &f("X=1 ~> Y=3")).unwrap());
    assert!(matches!(
        satisfies(&t, &f("X=1 ~> Z=4")),
        Err(SemanticsError::FormalEntryEncountered { .. })
    ));
    let strict = EvalOptions {
        complete_partial: false,
        ..EvalOptions::default()
    };
    assert_eq!(
        satisfies_with(&t, &f("X=1 ~> Y=2"), &strict),
        Err(SemanticsError::Intervention(
            InterventionError::NotFullyDefined
        ))
    );
}

#[test]
fn inconsistent_antecedent_is_true() {
    let t = partial_team();
    assert!(satisfies(&t, &f("X=1 & X=2 ~> Y=4 & Y=3")).unwrap());
    assert!(!falsifies(&t, &f("X=1 & X=2 ~> Y=4")).unwrap());
}

#[test]
fn excluded_middle() {
    let t = column_team(&[1, 2], false);
    assert!(!satisfies(&t, &f("X=1")).unwrap());
    assert!(!satisfies(&t, &f("X!=1")).unwrap());
    assert!(satisfies(&t, &f("X=1 | X!=1")).unwrap());
    assert!(satisfies(&t, &f("X=1 | -X=1")).unwrap());
    assert!(!satisfies(&t, &f("-X=1")).unwrap());
}

#[test]
fn empty_team_property() {
    let t = selection_team().subteam(&[]);
    for s in [
        "X=1",
        "X=1 & X=2",
        "dep(X; Y)",
        "Z=3 => Y=1",
        "X=1 | Y=2",
        "-X=1",
    ] {
        assert!(satisfies(&t, &f(s)).unwrap(), "{s}");
    }
    assert!(!satisfies(&t, &f("Pr(X=1) <= 1")).unwrap());
    assert!(!satisfies(&t, &f("Pr(X=1) >= Pr(X=2)")).unwrap());
}

#[test]
fn dependence_needs_split() {
    let t = CausalTeam::builder()
        .variable("X", [1, 2])
        .variable("Y", [1, 2])
        .row([1, 1])
        .row([1, 2])
        .build()
        .unwrap();
    assert!(!satisfies(&t, &f("dep(X; Y)")).unwrap());
    assert!(satisfies(&t, &f("dep(X; Y) | dep(X; Y)")).unwrap());
    assert!(satisfies(&t, &f("dep(; Y) | Y=2")).unwrap());
    assert!(satisfies(&t, &f("dep(; X) | X=2")).unwrap());
}

#[test]
fn probabilities() {
    let t = column_team(&[1, 1, 2, 3], true);
    let p = probability(&t, &f("X=1")).unwrap();
    assert_eq!((p.favorable, p.total), (2, 4));
    assert_eq!(p.to_string(), "1/2");
    let t5 = selection_team();
    assert_eq!(
        probability(&t5, &f("Z=3 & Y=2")).unwrap().to_string(),
        "1/2"
    );
    assert_eq!(probability(&t5, &f("X=1 | X!=1")).unwrap().to_string(), "1");
    assert_eq!(
        probability(&t5.subteam(&[]), &f("X=1")),
        Err(SemanticsError::EmptySupport)
    );
    assert!(matches!(
        probability(&t5, &f("dep(X; Y)")),
        Err(SemanticsError::NotCo(_))
    ));
    assert!(satisfies(&t, &f("Pr(X=1) = 1/2")).unwrap());
    assert!(satisfies(&t, &f("Pr(X=1) > Pr(X=2)")).unwrap());
    assert!(satisfies(&t, &f("Pr(X=1) < 1/3 || Pr(X=2) < 1/3")).unwrap());
    assert!(!satisfies(&t, &f("Pr(X=1) < 1/3 || Pr(X=1) > 2/3")).unwrap());
}

#[test]
fn probability_is_not_downward_closed() {
    let t = column_team(&[1, 2, 3], false);
    let chi = f("X=1");
    let phi = f("Pr(X=1) <= 1/2");
    assert!(satisfies(&t, &phi).unwrap());
    let sub = t.restrict(&chi).unwrap();
    assert!(!satisfies(&sub, &phi).unwrap());
}

#[test]
fn conditional_probability() {
    let t = column_team(&[1, 1, 2, 3], true);
    // Pr(X=1 | X!=3) = 2/3
    assert!(satisfies(&t, &f("X!=3 => Pr(X=1) <= 2/3")).unwrap());
    assert!(!satisfies(&t, &f("X!=3 => Pr(X=1) <= 1/2")).unwrap());
}

#[test]
fn falsifiability() {
    let t = formal_team();
    assert!(!falsifies(&t, &f("Y=1 => X=2")).unwrap());
    assert!(falsifies(&t, &f("X=1")).unwrap());
    assert!(falsifies(&t, &f("X=2 => Y=2")).unwrap());
    assert!(!falsifies(&t, &f("Y=2 => X=3")).unwrap());
    assert!(!falsifies(&t.subteam(&[]), &f("X=1")).unwrap());
    assert!(matches!(
        falsifies(&t, &f("-X=1")),
        Err(SemanticsError::NotSupported(_))
    ));
    assert!(matches!(
        satisfies(&t, &f("Y=1")),
        Err(SemanticsError::FormalEntryEncountered { row: 1, .. })
    ));
    // truth does not read the formal column here
    assert!(!satisfies(&t, &f("X=1")).unwrap());
}

#[test]
fn falsifiable_disjunction() {
    let t = column_team(&[1, 2], false);
    // any split leaves a side refuting its disjunct
    assert!(falsifies(&t, &f("X=3 | X=3")).unwrap());
    assert!(!falsifies(&t, &f("X=1 | X=2")).unwrap());
}

#[test]
fn admissibility() {
    let t = formal_team();
    assert!(admits(&t, &f("Y=1")).unwrap());
    assert!(!admits(&t, &f("X=3")).unwrap());
    assert!(admits(&t, &f("X=2 | X=1")).unwrap());
    assert!(!admits(&t, &f("X=2")).unwrap());
    assert!(admits(&t, &f("dep(X; Y)")).unwrap());
    assert!(matches!(
        admits(&t, &f("X=1 => Y=1")),
        Err(SemanticsError::NotDnf(_))
    ));

    let term = ExtendedValue::term(Variable::from("W"), vec![3.into()]);
    let shared = CausalTeam::builder()
        .variable("X", [1, 2])
        .variable("Y", [1, 2])
        .row([term.clone(), term])
        .build()
        .unwrap();
    assert!(!admits(&shared, &f("X=1 & Y=2")).unwrap());
    assert!(!admits(&shared, &f("X=1 & Y!=1")).unwrap());
    assert!(admits(&shared, &f("X=1 & Y=1")).unwrap());
}

#[test]
fn judgments() {
    let t = selection_team();
    let opts = EvalOptions::default();
    for (relation, verdict) in [
        (Relation::Truth, false),
        (Relation::Falsifiability, true),
        (Relation::Admissibility, false),
    ] {
        let j = judge(&t, &f("Y=2"), relation, &opts).unwrap();
        assert_eq!(j, Judgment { relation, verdict });
    }
}

#[test]
fn unknown_variables_rejected() {
    assert_eq!(
        satisfies(&selection_team(), &f("Q=1")),
        Err(SemanticsError::UnknownVariable(Variable::from("Q")))
    );
}

#[test]
fn row_level_helpers() {
    let t = selection_team();
    assert_eq!(selected_rows(&t, &f("Z=3")).unwrap(), vec![2, 3]);
    assert!(row_satisfies(&t, 0, &f("Z=1 & Y=2")).unwrap());
}

#[test]
fn nonrecursive_counterfactuals_need_unique_solutions() {
    let mut b: TeamBuilder = CausalTeam::builder()
        .variable("A", [0, 1])
        .variable("B", [0, 1])
        .endogenous("A", ["B"])
        .endogenous("B", ["A"]);
    for x in 0..2 {
        b = b.entry("A", [x], x).entry("B", [x], x);
    }
    let t = b.row([1, 1]).build().unwrap();
    assert!(satisfies(&t, &f("A=0 ~> B=0")).unwrap());
    let recursive = EvalOptions {
        policy: Some(SolutionPolicy::Recursive),
        ..EvalOptions::default()
    };
    assert!(matches!(
        satisfies_with(&t, &f("A=0 ~> B=0"), &recursive),
        Err(SemanticsError::UnsupportedPolicy(_))
    ));
}
