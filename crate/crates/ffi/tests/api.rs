use std::ffi::{c_char, CStr, CString};
use std::ptr;

use causal_teams_ffi::*;

const DC: &str = r#"{
  "variables": [
    {"name": "X", "range": [1, 2, 3]},
    {"name": "Y", "range": [2, 3, 4, 5, 6]},
    {"name": "Z", "range": [1, 2, 3]}
  ],
  "parents": {"Y": ["X", "Z"], "Z": ["X"]},
  "functions": {
    "Z": [{"args": [1], "value": 1}, {"args": [2], "value": 2}, {"args": [3], "value": 3}],
    "Y": [
      {"args": [1, 1], "value": 2}, {"args": [1, 2], "value": 3}, {"args": [1, 3], "value": 4},
      {"args": [2, 1], "value": 3}, {"args": [2, 2], "value": 4}, {"args": [2, 3], "value": 5},
      {"args": [3, 1], "value": 4}, {"args": [3, 2], "value": 5}, {"args": [3, 3], "value": 6}
    ]
  },
  "rows": [{"X": 1, "Y": 2, "Z": 1}, {"X": 2, "Y": 4, "Z": 2}, {"X": 3, "Y": 6, "Z": 3}]
}"#;

const PARTIAL: &str = r#"{
  "variables": [
    {"name": "U", "range": [1, 2, 3, 4]}, {"name": "X", "range": [1, 2, 3, 4]},
    {"name": "Y", "range": [1, 2, 3, 4]}, {"name": "Z", "range": [1, 2, 3, 4]}
  ],
  "parents": {"Y": ["X"], "Z": ["U", "X", "Y"]},
  "functions": {"Z": [{"args": [4, 1, 2], "value": 3}]},
  "rows": [
    {"U": 2, "X": 1, "Y": 2, "Z": 4}, {"U": 3, "X": 1, "Y": 2, "Z": 4},
    {"U": 1, "X": 3, "Y": 3, "Z": 1}, {"U": 1, "X": 4, "Y": 1, "Z": 1},
    {"U": 4, "X": 4, "Y": 1, "Z": 1}
  ]
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ct_last_error_message()) }
        .to_str()
        .unwrap()
        .to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    ct_string_free(s);
    out
}

fn load(json: &str) -> *mut CtTeam {
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { ct_team_from_json(c(json).as_ptr(), &mut t) },
        CtStatus::Ok
    );
    t
}

fn check(t: *const CtTeam, phi: &str, relation: u32) -> Result<bool, CtStatus> {
    let mut v = false;
    match unsafe { ct_check(t, c(phi).as_ptr(), relation, CT_POLICY_DEFAULT, &mut v) } {
        CtStatus::Ok => Ok(v),
        s => Err(s),
    }
}

#[test]
fn checks_and_probabilities() {
    let t = load(DC);
    assert_eq!(check(t, "X=1 => Y=2", CT_RELATION_TRUTH), Ok(true));
    assert_eq!(check(t, "Z=1 ~> Y=2", CT_RELATION_TRUTH), Ok(false));
    assert_eq!(check(t, "X=1", CT_RELATION_FALSIFIABLE), Ok(true));
    assert_eq!(
        check(t, "Y=2 | Y=4 | Y=6", CT_RELATION_ADMISSIBLE),
        Ok(true)
    );
    assert_eq!(check(t, "X=1 &", CT_RELATION_TRUTH), Err(CtStatus::Parse));
    assert!(last_error().contains("position"));
    assert_eq!(
        check(t, "Q=1", CT_RELATION_TRUTH),
        Err(CtStatus::Evaluation)
    );
    assert_eq!(check(t, "X=1", 7), Err(CtStatus::InvalidArgument));
    assert_eq!(check(t, "X=1", CT_RELATION_TRUTH), Ok(false));
    assert_eq!(last_error(), "");

    let (mut n, mut d) = (0i64, 0i64);
    assert_eq!(
        unsafe { ct_probability(t, c("X!=3").as_ptr(), &mut n, &mut d) },
        CtStatus::Ok
    );
    assert_eq!((n, d), (2, 3));
    assert_eq!(
        unsafe { ct_probability(t, c("X=1 | X!=1").as_ptr(), &mut n, &mut d) },
        CtStatus::Ok
    );
    assert_eq!((n, d), (1, 1));
    unsafe { ct_team_free(t) };
}

#[test]
fn interventions_and_round_trip() {
    let t = load(PARTIAL);
    let mut len = 0usize;
    assert_eq!(unsafe { ct_team_len(t, &mut len) }, CtStatus::Ok);
    assert_eq!(len, 5);

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ct_intervene(t, c("X=1").as_ptr(), CT_POLICY_DEFAULT, &mut out) },
        CtStatus::Ok
    );
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ct_team_render(out, &mut s) }, CtStatus::Ok);
    assert_eq!(
        unsafe { take(s) },
        "U  X  Y  Z\n2  1  2  4\n3  1  2  4\n1  1  2  f_Z(1,1,2)\n4  1  2  3\n"
    );

    // the JSON form reloads to an equal team
    assert_eq!(unsafe { ct_team_to_json(out, &mut s) }, CtStatus::Ok);
    let json = unsafe { take(s) };
    let back = load(&json);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { ct_team_to_json(back, &mut again) }, CtStatus::Ok);
    assert_eq!(unsafe { take(again) }, json);
    // truth is undefined on the formal entry, falsifiability is not
    assert_eq!(
        check(back, "Z=4", CT_RELATION_TRUTH),
        Err(CtStatus::Evaluation)
    );
    assert_eq!(check(back, "Z=4", CT_RELATION_FALSIFIABLE), Ok(true));

    let mut done = ptr::null_mut();
    assert_eq!(unsafe { ct_complete(t, &mut done) }, CtStatus::Ok);
    assert_eq!(check(done, "X=1 ~> Y=2", CT_RELATION_TRUTH), Ok(true));

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { ct_intervene(t, c("X=1 & X=2").as_ptr(), CT_POLICY_DEFAULT, &mut bad) },
        CtStatus::Intervention
    );
    assert!(last_error().contains("inconsistent"));
    assert!(bad.is_null());
    assert_eq!(
        unsafe { ct_intervene(t, c("X=1").as_ptr(), 99, &mut bad) },
        CtStatus::InvalidArgument
    );
    unsafe {
        for h in [t, out, back, done] {
            ct_team_free(h);
        }
    }
}

#[test]
fn causes() {
    let t = load(DC);
    let mut holds = false;
    let mut w = ptr::null_mut();
    let (x, y) = (c("X"), c("Y"));
    assert_eq!(
        unsafe {
            ct_cause(
                t,
                CT_CAUSE_DIRECT,
                x.as_ptr(),
                y.as_ptr(),
                &mut holds,
                &mut w,
            )
        },
        CtStatus::Ok
    );
    assert!(holds);
    assert_eq!(unsafe { take(w) }, "Z=1, x=1 -> y=2, x'=2 -> y'=3");
    assert_eq!(
        unsafe {
            ct_cause(
                t,
                CT_CAUSE_TOTAL,
                y.as_ptr(),
                x.as_ptr(),
                &mut holds,
                &mut w,
            )
        },
        CtStatus::Ok
    );
    assert!(!holds && w.is_null());
    assert_eq!(
        unsafe {
            ct_cause(
                t,
                CT_CAUSE_DIRECT,
                x.as_ptr(),
                x.as_ptr(),
                &mut holds,
                ptr::null_mut(),
            )
        },
        CtStatus::Cause
    );
    unsafe { ct_team_free(t) };
}

#[test]
fn bad_inputs() {
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { ct_team_from_json(ptr::null(), &mut t) },
        CtStatus::NullPointer
    );
    assert_eq!(
        unsafe { ct_team_from_json(c("{").as_ptr(), &mut t) },
        CtStatus::InvalidTeam
    );
    assert!(t.is_null());
    let bytes = [0xffu8, 0];
    assert_eq!(
        unsafe { ct_team_from_json(bytes.as_ptr().cast(), &mut t) },
        CtStatus::InvalidUtf8
    );
    let mut v = false;
    assert_eq!(
        unsafe { ct_check(ptr::null(), c("X=1").as_ptr(), 0, 0, &mut v) },
        CtStatus::NullPointer
    );
    let team = load(DC);
    assert_eq!(
        unsafe { ct_check(team, c("X=1").as_ptr(), 0, 0, ptr::null_mut()) },
        CtStatus::NullPointer
    );
    unsafe {
        ct_team_free(team);
        ct_team_free(ptr::null_mut());
        ct_string_free(ptr::null_mut());
    }
}
