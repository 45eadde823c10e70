//! C ABI for `causal_teams`.
//!
//! Teams are opaque `CtTeam` handles released with `ct_team_free`. Every
//! fallible function returns a `CtStatus`; on failure a message is available
//! from `ct_last_error_message` on the same thread until the next call.
//! Strings returned through `char **` outputs belong to the caller and are
//! released with `ct_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use causal_teams::causes::{cause, CauseKind, CauseOptions};
use causal_teams::document::{team_from_json, team_to_json};
use causal_teams::semantics::{judge, probability_with, EvalOptions, Relation};
use causal_teams::{
    complete_partial, intervene, parse, parse_intervention, CausalTeam, SolutionPolicy, Variable,
};

/// Opaque causal team.
pub struct CtTeam(CausalTeam);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Formula or intervention syntax error.
    Parse = 3,
    /// Malformed document or invalid team.
    InvalidTeam = 4,
    /// The question cannot be answered on this team (unknown variables,
    /// formal entries, unsupported fragment, empty support, ...).
    Evaluation = 5,
    Intervention = 6,
    Cause = 7,
    /// An argument such as a relation or policy code is out of range.
    InvalidArgument = 8,
    Panic = 9,
}

pub const CT_RELATION_TRUTH: u32 = 0;
pub const CT_RELATION_FALSIFIABLE: u32 = 1;
pub const CT_RELATION_ADMISSIBLE: u32 = 2;

/// Recursive on acyclic graphs, unique solutions otherwise.
pub const CT_POLICY_DEFAULT: u32 = 0;
pub const CT_POLICY_RECURSIVE: u32 = 1;
pub const CT_POLICY_UNIQUE: u32 = 2;
pub const CT_POLICY_AT_MOST_UNIQUE: u32 = 3;

pub const CT_CAUSE_DIRECT: u32 = 0;
pub const CT_CAUSE_PROBABILISTIC_DIRECT: u32 = 1;
pub const CT_CAUSE_TOTAL: u32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CtStatus, String);

fn fail(status: CtStatus, e: impl ToString) -> Failure {
    Failure(status, e.to_string())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CtStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(CtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn team<'a>(p: *const CtTeam) -> Result<&'a CausalTeam, Failure> {
    p.as_ref()
        .map(|t| &t.0)
        .ok_or_else(|| fail(CtStatus::NullPointer, "team is null"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(CtStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

fn boxed(t: CausalTeam) -> *mut CtTeam {
    Box::into_raw(Box::new(CtTeam(t)))
}

fn policy(code: u32) -> Result<Option<SolutionPolicy>, Failure> {
    match code {
        CT_POLICY_DEFAULT => Ok(None),
        CT_POLICY_RECURSIVE => Ok(Some(SolutionPolicy::Recursive)),
        CT_POLICY_UNIQUE => Ok(Some(SolutionPolicy::UniqueSolutions)),
        CT_POLICY_AT_MOST_UNIQUE => Ok(Some(SolutionPolicy::AtMostUnique)),
        c => Err(fail(
            CtStatus::InvalidArgument,
            format!("unknown policy code {c}"),
        )),
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn ct_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a JSON team document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_team_from_json(json: *const c_char, out: *mut *mut CtTeam) -> CtStatus {
    guard(|| {
        let json = text(json, "json")?;
        let t = team_from_json(json).map_err(|e| fail(CtStatus::InvalidTeam, e))?;
        put(out, boxed(t))
    })
}

/// # Safety
/// `team` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_team_free(team: *mut CtTeam) {
    if !team.is_null() {
        drop(Box::from_raw(team));
    }
}

/// # Safety
/// `team` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_team_to_json(team: *const CtTeam, out: *mut *mut c_char) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        put(out, c_string(team_to_json(t)))
    })
}

/// The support as an aligned table.
///
/// # Safety
/// `team` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_team_render(team: *const CtTeam, out: *mut *mut c_char) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        put(out, c_string(t.render_table()))
    })
}

/// Number of rows in the support.
///
/// # Safety
/// `team` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_team_len(team: *const CtTeam, out: *mut usize) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        put(out, t.len())
    })
}

/// Decides `formula` under one of the `CT_RELATION_*` relations.
/// `policy` is a `CT_POLICY_*` code; partial teams are completed before `~>`.
///
/// # Safety
/// `team` must be a live handle, `formula` a NUL-terminated string and
/// `verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_check(
    team: *const CtTeam,
    formula: *const c_char,
    relation: u32,
    policy: u32,
    verdict: *mut bool,
) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        let phi = parse(text(formula, "formula")?).map_err(|e| fail(CtStatus::Parse, e))?;
        let relation = match relation {
            CT_RELATION_TRUTH => Relation::Truth,
            CT_RELATION_FALSIFIABLE => Relation::Falsifiability,
            CT_RELATION_ADMISSIBLE => Relation::Admissibility,
            c => {
                return Err(fail(
                    CtStatus::InvalidArgument,
                    format!("unknown relation code {c}"),
                ))
            }
        };
        let options = EvalOptions {
            policy: self::policy(policy)?,
            ..EvalOptions::default()
        };
        let j = judge(t, &phi, relation, &options).map_err(|e| fail(CtStatus::Evaluation, e))?;
        put(verdict, j.verdict)
    })
}

/// `Pr(formula)` as a reduced fraction.
///
/// # Safety
/// `team` must be a live handle, `formula` a NUL-terminated string,
/// `numerator` and `denominator` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_probability(
    team: *const CtTeam,
    formula: *const c_char,
    numerator: *mut i64,
    denominator: *mut i64,
) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        let chi = parse(text(formula, "formula")?).map_err(|e| fail(CtStatus::Parse, e))?;
        let p = probability_with(t, &chi, &EvalOptions::default())
            .map_err(|e| fail(CtStatus::Evaluation, e))?
            .value();
        put(numerator, *p.numer())?;
        put(denominator, *p.denom())
    })
}

/// Applies an intervention such as `X=1 & Y=2`. Partial recursive teams are
/// completed first.
///
/// # Safety
/// `team` must be a live handle, `intervention` a NUL-terminated string and
/// `out` writable. The new handle is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn ct_intervene(
    team: *const CtTeam,
    intervention: *const c_char,
    policy: u32,
    out: *mut *mut CtTeam,
) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        let iv = parse_intervention(text(intervention, "intervention")?)
            .map_err(|e| fail(CtStatus::Parse, e))?;
        let policy = self::policy(policy)?.unwrap_or(if t.is_recursive() {
            SolutionPolicy::Recursive
        } else {
            SolutionPolicy::UniqueSolutions
        });
        let completed;
        let t = if t.is_recursive() && !t.is_fully_defined() {
            completed = complete_partial(t).map_err(|e| fail(CtStatus::Intervention, e))?;
            &completed
        } else {
            t
        };
        let result = intervene(t, &iv, policy).map_err(|e| fail(CtStatus::Intervention, e))?;
        put(out, boxed(result))
    })
}

/// Completes partially defined functions with observed values and formal terms.
///
/// # Safety
/// `team` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_complete(team: *const CtTeam, out: *mut *mut CtTeam) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        let done = complete_partial(t).map_err(|e| fail(CtStatus::Intervention, e))?;
        put(out, boxed(done))
    })
}

/// Decides whether `x` is a cause of `y` (`CT_CAUSE_*`). When it is and
/// `witness` is not null, a description of the witness is stored there;
/// otherwise `*witness` is set to null.
///
/// # Safety
/// `team` must be a live handle, `x` and `y` NUL-terminated strings, `holds`
/// writable and `witness` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ct_cause(
    team: *const CtTeam,
    kind: u32,
    x: *const c_char,
    y: *const c_char,
    holds: *mut bool,
    witness: *mut *mut c_char,
) -> CtStatus {
    guard(|| {
        let t = self::team(team)?;
        let kind = match kind {
            CT_CAUSE_DIRECT => CauseKind::Direct,
            CT_CAUSE_PROBABILISTIC_DIRECT => CauseKind::ProbabilisticDirect,
            CT_CAUSE_TOTAL => CauseKind::Total,
            c => {
                return Err(fail(
                    CtStatus::InvalidArgument,
                    format!("unknown cause kind {c}"),
                ))
            }
        };
        let (x, y) = (Variable::from(text(x, "x")?), Variable::from(text(y, "y")?));
        if holds.is_null() {
            return Err(fail(CtStatus::NullPointer, "output pointer is null"));
        }
        let verdict = cause(t, kind, &x, &y, &CauseOptions::default())
            .map_err(|e| fail(CtStatus::Cause, e))?;
        put(holds, verdict.holds)?;
        if !witness.is_null() {
            let w = verdict
                .witness
                .map_or(ptr::null_mut(), |w| c_string(w.to_string()));
            witness.write(w);
        }
        Ok(())
    })
}
