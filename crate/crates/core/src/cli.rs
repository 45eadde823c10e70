//! The `causal-teams` command line.
//!
//! Exit status: 0 for a true verdict or success, 1 for a false verdict, 2 for
//! input errors and for questions that cannot be decided on the given team.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::causes::{self, CauseError, CauseKind, CauseOptions, CauseVerdict};
use crate::document::{load_team, team_to_json};
use crate::formula::{parse, parse_intervention};
use crate::intervention::{complete_partial, intervene, InterventionError, SolutionPolicy};
use crate::semantics::{self, EvalOptions, Relation, TraceStep};
use crate::team::CausalTeam;
use crate::value::Variable;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "causal-teams",
    version,
    about = "Causal team semantics: interventions, satisfaction, probabilities and causes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// Solution policy for interventions (default: recursive on acyclic graphs, unique otherwise).
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    /// Do not complete partially defined functions before interventions.
    #[arg(long)]
    no_complete: bool,
}

impl Common {
    fn eval(&self) -> EvalOptions {
        EvalOptions {
            policy: self.policy.map(Into::into),
            complete_partial: !self.no_complete,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a formula on a team.
    Check {
        team: PathBuf,
        formula: String,
        #[arg(long, value_enum, default_value_t = RelationArg::Truth)]
        relation: RelationArg,
        /// Print the tables visited while evaluating (truth only).
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Apply an intervention such as `X=1 & Z=2` and print the result.
    Intervene {
        team: PathBuf,
        intervention: String,
        /// Also write the intervened team as a JSON document.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the exact probability of a CO formula.
    Prob {
        team: PathBuf,
        formula: String,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether X is a cause of Y, or list the whole cause relation.
    Causes {
        team: PathBuf,
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(required_unless_present = "all")]
        x: Option<String>,
        #[arg(required_unless_present = "all")]
        y: Option<String>,
        /// Scan every ordered pair of variables.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        all: bool,
        /// Refuse searches over more context tuples than this.
        #[arg(long)]
        max_search: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RelationArg {
    Truth,
    Falsifiable,
    Admissible,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Recursive,
    Unique,
    AtMostUnique,
}

impl From<PolicyArg> for SolutionPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Recursive => SolutionPolicy::Recursive,
            PolicyArg::Unique => SolutionPolicy::UniqueSolutions,
            PolicyArg::AtMostUnique => SolutionPolicy::AtMostUnique,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Direct,
    Pdirect,
    Total,
}

impl From<KindArg> for CauseKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Direct => CauseKind::Direct,
            KindArg::Pdirect => CauseKind::ProbabilisticDirect,
            KindArg::Total => CauseKind::Total,
        }
    }
}

/// An input error: message for stderr, exit status 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_TRUE
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn load(path: &Path) -> Result<CausalTeam, Failure> {
    load_team(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn verdict_code(b: bool) -> i32 {
    if b {
        EXIT_TRUE
    } else {
        EXIT_FALSE
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check {
            team,
            formula,
            relation,
            explain,
            common,
        } => {
            let team = load(&team)?;
            let phi = parse(&formula).map_err(|e| Failure(format!("formula: {e}")))?;
            let options = common.eval();
            let verdict = match relation {
                RelationArg::Truth if explain => {
                    let (verdict, trace) = semantics::explain(&team, &phi, &options)?;
                    for step in &trace {
                        write_step(out, step)?;
                    }
                    verdict
                }
                r => {
                    if explain {
                        writeln!(err, "note: --explain only traces the truth relation")?;
                    }
                    let relation = match r {
                        RelationArg::Truth => Relation::Truth,
                        RelationArg::Falsifiable => Relation::Falsifiability,
                        RelationArg::Admissible => Relation::Admissibility,
                    };
                    semantics::judge(&team, &phi, relation, &options)?.verdict
                }
            };
            writeln!(out, "{verdict}")?;
            Ok(verdict_code(verdict))
        }
        Command::Intervene {
            team,
            intervention,
            out: target,
            common,
        } => {
            let team = load(&team)?;
            let iv = parse_intervention(&intervention)
                .map_err(|e| Failure(format!("intervention: {e}")))?;
            if !iv.is_consistent() {
                return Err(Failure(format!(
                    "{}; a counterfactual with this antecedent is trivially true",
                    InterventionError::InconsistentIntervention(iv)
                )));
            }
            let policy = common
                .policy
                .map(Into::into)
                .unwrap_or(if team.is_recursive() {
                    SolutionPolicy::Recursive
                } else {
                    SolutionPolicy::UniqueSolutions
                });
            let team = if !team.is_fully_defined() && team.is_recursive() && !common.no_complete {
                complete_partial(&team)?
            } else {
                team
            };
            let result = intervene(&team, &iv, policy)?;
            out.write_all(result.render_table().as_bytes())?;
            if let Some(path) = target {
                fs::write(&path, team_to_json(&result))
                    .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            }
            Ok(EXIT_TRUE)
        }
        Command::Prob {
            team,
            formula,
            common,
        } => {
            let team = load(&team)?;
            let phi = parse(&formula).map_err(|e| Failure(format!("formula: {e}")))?;
            let p = semantics::probability_with(&team, &phi, &common.eval())?;
            writeln!(out, "{p}")?;
            Ok(EXIT_TRUE)
        }
        Command::Causes {
            team,
            kind,
            x,
            y,
            all,
            max_search,
            common,
        } => {
            let team = load(&team)?;
            let kind = CauseKind::from(kind);
            let options = CauseOptions {
                max_search,
                eval: common.eval(),
            };
            if all {
                let pairs = causes::all_causes(&team, kind, &options)?;
                for (a, b, verdict) in pairs {
                    match verdict {
                        Ok(v) if v.holds => writeln!(out, "{a} -> {b}: {}", describe(&v))?,
                        Ok(_) => {}
                        Err(e) => writeln!(out, "{a} -> {b}: undecided ({e})")?,
                    }
                }
                return Ok(EXIT_TRUE);
            }
            let (x, y) = (
                Variable::from(x.unwrap_or_default()),
                Variable::from(y.unwrap_or_default()),
            );
            match causes::cause(&team, kind, &x, &y, &options) {
                Ok(v) => {
                    writeln!(out, "{}", describe(&v))?;
                    Ok(verdict_code(v.holds))
                }
                Err(e @ CauseError::Undecided(_)) => {
                    writeln!(out, "undecided")?;
                    Err(e.into())
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn describe(v: &CauseVerdict) -> String {
    match &v.witness {
        Some(w) if v.holds => format!("holds: {w}"),
        _ => "does not hold".to_string(),
    }
}

fn write_step(out: &mut dyn Write, step: &TraceStep) -> std::io::Result<()> {
    let (title, team) = match step {
        TraceStep::Complete { team } => ("completed team".to_string(), team),
        TraceStep::Restrict { selector, team } => (format!("restricted to {selector}"), team),
        TraceStep::Intervene { intervention, team } => {
            (format!("intervened do({intervention})"), team)
        }
    };
    writeln!(out, "-- {title}")?;
    out.write_all(team.render_table().as_bytes())?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["causal-teams"]).0, EXIT_ERROR);
        assert_eq!(
            run_str(&["causal-teams", "causes", "t.json", "direct"]).0,
            EXIT_ERROR
        );
        let (code, out, _) = run_str(&["causal-teams", "--help"]);
        assert_eq!(code, EXIT_TRUE);
        assert!(out.contains("intervene"));
    }

    #[test]
    fn missing_file_exits_2() {
        let (code, _, err) = run_str(&["causal-teams", "check", "/nonexistent/t.json", "X=1"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("/nonexistent/t.json"), "{err}");
    }
}
