//! Seeded generators for random causal teams and formulas.
#![allow(dead_code)]

use causal_teams::formula::Rational;
use causal_teams::{CausalTeam, Formula, Intervention, Value, Variable};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const NAMES: [&str; 4] = ["A", "B", "C", "D"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct TeamParams {
    pub max_vars: usize,
    pub max_range: i64,
    pub max_rows: usize,
    /// Probability of a multiteam support.
    pub multiteam: f64,
    pub edge: f64,
}

impl Default for TeamParams {
    fn default() -> Self {
        TeamParams {
            max_vars: 4,
            max_range: 3,
            max_rows: 6,
            multiteam: 0.3,
            edge: 0.45,
        }
    }
}

/// A recursive, fully defined team. Variables are declared in a random
/// topological order so that it rarely matches the alphabetical one.
pub fn team(rng: &mut ChaCha8Rng, p: &TeamParams) -> CausalTeam {
    let n = rng.gen_range(1..=p.max_vars);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let ranges: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=p.max_range)).collect();
    // parents[v]: earlier variables in `order`, sorted by name
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 1..n {
        for i in 0..j {
            if rng.gen_bool(p.edge) {
                parents[order[j]].push(order[i]);
            }
        }
        parents[order[j]].sort();
    }

    let mut b = CausalTeam::builder();
    if rng.gen_bool(p.multiteam) {
        b = b.multiteam();
    }
    for v in 0..n {
        b = b.variable(NAMES[v], 0..ranges[v]);
    }
    // tables[v]: value for each parent tuple, indexed in mixed radix
    let mut tables: Vec<Vec<i64>> = vec![Vec::new(); n];
    for v in 0..n {
        if parents[v].is_empty() {
            continue;
        }
        b = b.endogenous(NAMES[v], parents[v].iter().map(|&q| NAMES[q]));
        let size: i64 = parents[v].iter().map(|&q| ranges[q]).product();
        for idx in 0..size {
            let value = rng.gen_range(0..ranges[v]);
            tables[v].push(value);
            let mut args = Vec::new();
            let mut rest = idx;
            for &q in parents[v].iter().rev() {
                args.push(rest % ranges[q]);
                rest /= ranges[q];
            }
            args.reverse();
            b = b.entry(NAMES[v], args, value);
        }
    }
    let rows = rng.gen_range(0..=p.max_rows);
    for _ in 0..rows {
        let mut row = vec![0i64; n];
        for &v in &order {
            row[v] = if parents[v].is_empty() {
                rng.gen_range(0..ranges[v])
            } else {
                let mut idx = 0;
                for &q in &parents[v] {
                    idx = idx * ranges[q] + row[q];
                }
                tables[v][idx as usize]
            };
        }
        b = b.row(row);
    }
    b.build().expect("generated teams are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lang {
    Co,
    CoNeg,
    Cd,
    Pcd,
}

pub fn variable(rng: &mut ChaCha8Rng, team: &CausalTeam) -> Variable {
    team.domain().choose(rng).unwrap().clone()
}

pub fn value_of(rng: &mut ChaCha8Rng, team: &CausalTeam, v: &Variable) -> Value {
    team.ranges().get(v).unwrap().choose(rng).unwrap().clone()
}

/// `k` pairs over distinct variables (a consistent intervention).
pub fn intervention(rng: &mut ChaCha8Rng, team: &CausalTeam, k: usize) -> Intervention {
    let mut vars = team.domain().to_vec();
    vars.shuffle(rng);
    vars.truncate(k.max(1));
    let pairs: Vec<(Variable, Value)> = vars
        .into_iter()
        .map(|v| {
            let x = value_of(rng, team, &v);
            (v, x)
        })
        .collect();
    Intervention::new(pairs)
}

/// Up to two pairs over any variables; may be inconsistent.
pub fn loose_intervention(rng: &mut ChaCha8Rng, team: &CausalTeam) -> Intervention {
    let k = rng.gen_range(1..=2);
    let pairs: Vec<(Variable, Value)> = (0..k)
        .map(|_| {
            let v = variable(rng, team);
            let x = value_of(rng, team, &v);
            (v, x)
        })
        .collect();
    Intervention::new(pairs)
}

fn literal(rng: &mut ChaCha8Rng, team: &CausalTeam) -> Formula {
    let v = variable(rng, team);
    let x = value_of(rng, team, &v);
    if rng.gen_bool(0.5) {
        Formula::Eq(v, x)
    } else {
        Formula::Neq(v, x)
    }
}

fn dependence(rng: &mut ChaCha8Rng, team: &CausalTeam) -> Formula {
    let k = rng.gen_range(0..=2.min(team.domain().len()));
    let mut xs = team.domain().to_vec();
    xs.shuffle(rng);
    xs.truncate(k);
    Formula::Dep(xs, variable(rng, team))
}

fn bound(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(1..=6);
    Rational::new(rng.gen_range(0..=d), d)
}

fn pr_literal(rng: &mut ChaCha8Rng, team: &CausalTeam, depth: usize) -> Formula {
    let chi = formula(rng, team, Lang::Co, depth.min(2));
    let atom = match rng.gen_range(0..4) {
        0 => Formula::pr_leq(chi, bound(rng)),
        1 => Formula::pr_geq(chi, bound(rng)),
        2 => Formula::PrLeqPr(
            Box::new(chi),
            Box::new(formula(rng, team, Lang::Co, depth.min(2))),
        ),
        _ => Formula::PrGeqPr(
            Box::new(chi),
            Box::new(formula(rng, team, Lang::Co, depth.min(2))),
        ),
    };
    if rng.gen_bool(0.3) {
        Formula::contra_neg(atom)
    } else {
        atom
    }
}

/// A random formula of `lang` with connective depth at most `depth`.
pub fn formula(rng: &mut ChaCha8Rng, team: &CausalTeam, lang: Lang, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match lang {
            Lang::Cd if rng.gen_bool(0.3) => dependence(rng, team),
            Lang::Pcd if rng.gen_bool(0.5) => pr_literal(rng, team, depth),
            _ => literal(rng, team),
        };
    }
    let d = depth - 1;
    let choices = match lang {
        Lang::CoNeg => 5,
        Lang::Pcd => 5,
        _ => 4,
    };
    match rng.gen_range(0..choices) {
        0 => Formula::and(formula(rng, team, lang, d), formula(rng, team, lang, d)),
        1 => Formula::or(formula(rng, team, lang, d), formula(rng, team, lang, d)),
        2 => {
            let ante = if lang == Lang::CoNeg {
                Lang::CoNeg
            } else {
                Lang::Co
            };
            Formula::sel(formula(rng, team, ante, d), formula(rng, team, lang, d))
        }
        3 => Formula::cf(loose_intervention(rng, team), formula(rng, team, lang, d)),
        _ if lang == Lang::CoNeg => Formula::dual_neg(formula(rng, team, lang, d)),
        _ => Formula::bor(formula(rng, team, lang, d), formula(rng, team, lang, d)),
    }
}

/// All subsets of `0..n` as index lists.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |m| (0..n).filter(|i| m & (1 << i) != 0).collect())
}
