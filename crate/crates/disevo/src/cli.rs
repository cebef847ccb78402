//! Command implementations behind the binary: analyze, evolve, dof, verify.
//! Each returns a JSON report plus a process exit code (0 ok, 1 usage,
//! 2 inconsistent dynamics, 3 off-surface data, 4 missing parameters).
//! Exact-mode scalars serialize as "p/q" strings and round-trip losslessly.

use serde_json::{json, Value};

use crate::action::Slice;
use crate::analysis::{classify, propagating_count_pair, reduced_dimension};
use crate::evolution::{forward_evolve, EvolveError, Schedule, SliceStatus};
use crate::legendre::{
    post_constraints, AffineConstraint, ConstraintSet, ConstraintTag, MomentumTag, PhasePoint,
    Provenance,
};
use crate::local_moves::{momentum_update_full, ExtendedState, UpdateParams};
use crate::models::{pachner_move_with_fresh, scenario_schedule, surface_after, Scenario};
use crate::scalar::Scalar;
use crate::verify::{run_all, run_suite, SuiteResult, SUITE_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_OFF_SURFACE: i32 = 3;
pub const EXIT_MISSING_PARAMS: i32 = 4;

fn vec_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(|s| s.to_json()).collect())
}

fn tag_str(tag: ConstraintTag) -> &'static str {
    match tag {
        ConstraintTag::Pre => "pre",
        ConstraintTag::Post => "post",
        ConstraintTag::Both => "both",
    }
}

fn provenance_str(p: Provenance) -> &'static str {
    match p {
        Provenance::Primary => "primary",
        Provenance::Secondary => "secondary",
        Provenance::Extension => "extension",
    }
}

fn status_str(s: SliceStatus) -> &'static str {
    match s {
        SliceStatus::Consistent => "consistent",
        SliceStatus::FixesParameters => "fixes_parameters",
        SliceStatus::Inconsistent => "inconsistent",
    }
}

fn constraint_json<S: Scalar>(c: &AffineConstraint<S>) -> Value {
    json!({
        "gx": vec_json(&c.gx),
        "gp": vec_json(&c.gp),
        "c0": c.c0.to_json(),
        "tag": tag_str(c.tag),
        "provenance": provenance_str(c.provenance),
    })
}

fn set_json<S: Scalar>(set: &ConstraintSet<S>) -> Value {
    Value::Array(set.constraints.iter().map(constraint_json).collect())
}

fn evolve_error_code(e: &EvolveError) -> i32 {
    match e {
        EvolveError::OffConstraintSurface(_) => EXIT_OFF_SURFACE,
        EvolveError::MissingParameter { .. } => EXIT_MISSING_PARAMS,
        _ => EXIT_INCONSISTENT,
    }
}

pub fn cmd_analyze<S: Scalar>(sc: &Scenario) -> (Value, i32) {
    if !sc.slabs.is_empty() {
        analyze_global::<S>(sc)
    } else {
        analyze_local::<S>(sc)
    }
}

fn analyze_global<S: Scalar>(sc: &Scenario) -> (Value, i32) {
    let schedule: Schedule<S> = match scenario_schedule(sc) {
        Ok(s) => s,
        Err(e) => return (json!({"error": e.to_string()}), EXIT_USAGE),
    };
    let report = crate::evolution::match_and_propagate(&schedule);
    let mut slices = Vec::new();
    let mut bad_slice = None;
    for sr in &report.slices {
        let combined = sr.combined();
        let cls = classify(&combined);
        if sr.status == SliceStatus::Inconsistent && bad_slice.is_none() {
            bad_slice = Some(sr.slice.step_label.clone());
        }
        slices.push(json!({
            "step": sr.slice.step_label,
            "vars": sr.slice.vars,
            "pre": set_json(&sr.pre),
            "post": set_json(&sr.post),
            "status": status_str(sr.status),
            "classification": {
                "first_class": cls.first_class.len(),
                "second_class_pairs": cls.second_class.len(),
                "gauge_generators": cls.gauge_generators.len(),
            },
        }));
    }
    let consistent = report.is_consistent();
    let mut out = json!({
        "kind": "analysis",
        "consistent": consistent,
        "sweeps_used": report.sweeps_used,
        "slices": slices,
    });
    if let Some(step) = bad_slice {
        out["inconsistent_slice"] = json!(step);
        return (out, EXIT_INCONSISTENT);
    }
    (out, EXIT_OK)
}

fn analyze_local<S: Scalar>(sc: &Scenario) -> (Value, i32) {
    let mut surface = match Slice::new("0", sc.surface.clone()) {
        Ok(s) => s,
        Err(e) => return (json!({"error": e.to_string()}), EXIT_USAGE),
    };
    let q = surface.dim();
    let mut state: ExtendedState<S> =
        ExtendedState::fresh(surface.clone(), vec![S::zero(); q], vec![S::zero(); q]);
    let mut trace = Vec::new();
    let mut last_post = 0usize;
    let mut monotone = true;
    for (idx, entry) in sc.moves.iter().enumerate() {
        let mv = match pachner_move_with_fresh::<S>(
            entry.kind,
            &surface,
            &entry.position,
            &state.point.slice.vars,
        ) {
            Ok(m) => m,
            Err(e) => return (json!({"error": e.to_string()}), EXIT_USAGE),
        };
        let out = match momentum_update_full(&mv, &state, &UpdateParams::default()) {
            Ok(o) => o,
            Err(e) => {
                return (
                    json!({"error": e.to_string(), "move_index": idx}),
                    evolve_error_code(&e),
                )
            }
        };
        state = out.state;
        surface = surface_after(&surface, &mv);
        let n_post = state.post.len();
        if n_post < last_post {
            monotone = false;
        }
        last_post = n_post;
        trace.push(json!({
            "move_index": idx,
            "kind": serde_json::to_value(entry.kind).unwrap(),
            "post_count": n_post,
            "emitted_pre": out.emitted_pre.len(),
            "emitted_post": out.emitted_post.len(),
            "surface": surface.vars,
        }));
    }
    let consistent = !state.post.is_infeasible();
    let code = if consistent { EXIT_OK } else { EXIT_INCONSISTENT };
    (
        json!({
            "kind": "local_run",
            "moves": trace,
            "post_count_monotone": monotone,
            "consistent": consistent,
        }),
        code,
    )
}

pub struct EvolveArgs<S> {
    pub x0: Option<Vec<S>>,
    pub p0: Option<Vec<S>>,
    /// λ values per move; missing groups mean all zeros unless strict.
    pub lambdas: Vec<Vec<S>>,
    pub strict: bool,
}

impl<S> Default for EvolveArgs<S> {
    fn default() -> Self {
        EvolveArgs {
            x0: None,
            p0: None,
            lambdas: Vec::new(),
            strict: false,
        }
    }
}

pub fn cmd_evolve<S: Scalar>(sc: &Scenario, args: &EvolveArgs<S>) -> (Value, i32) {
    let schedule: Schedule<S> = match scenario_schedule(sc) {
        Ok(s) => s,
        Err(e) => return (json!({"error": e.to_string()}), EXIT_USAGE),
    };
    let q0 = schedule.slice(0).dim();
    let x0 = args.x0.clone().unwrap_or_else(|| vec![S::zero(); q0]);
    let p0 = args.p0.clone().unwrap_or_else(|| vec![S::zero(); q0]);
    if x0.len() != q0 || p0.len() != q0 {
        return (
            json!({"error": format!("initial data must have {q0} entries")}),
            EXIT_USAGE,
        );
    }
    let mut pt = PhasePoint::new(schedule.slice(0).clone(), x0, p0, MomentumTag::Pre);
    let mut trace = vec![json!({
        "step": schedule.slice(0).step_label,
        "x": vec_json(&pt.x),
        "p": vec_json(&pt.p),
    })];
    for (k, mv) in schedule.moves.iter().enumerate() {
        let needed = post_constraints(mv).len();
        let lam = match args.lambdas.get(k) {
            Some(v) => v.clone(),
            None if args.strict && needed > 0 => {
                return (
                    json!({"error": format!("move {k} needs {needed} lambda values")}),
                    EXIT_MISSING_PARAMS,
                )
            }
            None => vec![S::zero(); needed],
        };
        pt = match forward_evolve(mv, &pt, &lam) {
            Ok(p) => p,
            Err(e) => {
                let mut out = json!({"error": e.to_string(), "move_index": k, "trace": trace});
                if let EvolveError::OffConstraintSurface(res) = &e {
                    out["residuals"] = json!(res);
                }
                return (out, evolve_error_code(&e));
            }
        };
        trace.push(json!({
            "step": pt.slice.step_label,
            "x": vec_json(&pt.x),
            "p": vec_json(&pt.p),
        }));
    }
    (json!({"kind": "evolution", "trace": trace}), EXIT_OK)
}

pub fn cmd_dof<S: Scalar>(sc: &Scenario, i: usize, n: Option<usize>, f: usize) -> (Value, i32) {
    let schedule: Schedule<S> = match scenario_schedule(sc) {
        Ok(s) => s,
        Err(e) => return (json!({"error": e.to_string()}), EXIT_USAGE),
    };
    if !(i < f && f < schedule.n_slices()) {
        return (json!({"error": "need i < f within the schedule"}), EXIT_USAGE);
    }
    let (front, back) = match propagating_count_pair(&schedule, i, f) {
        Ok(p) => p,
        Err(e) => return (json!({"error": e.to_string()}), EXIT_INCONSISTENT),
    };
    assert_eq!(front, back, "pre/post counting mismatch");
    let mut out = json!({
        "kind": "dof",
        "i": i,
        "f": f,
        "count_from_pre": front,
        "count_from_post": back,
        "propagating": front,
    });
    if let Some(n) = n {
        if !(i < n && n < f) {
            return (json!({"error": "need i < n < f"}), EXIT_USAGE);
        }
        match reduced_dimension(&schedule, i, n, f) {
            Ok(d) => out["reduced_dimension"] = json!(d),
            Err(e) => return (json!({"error": e.to_string()}), EXIT_INCONSISTENT),
        }
        out["n"] = json!(n);
    }
    (out, EXIT_OK)
}

pub fn cmd_verify(suite: Option<&str>, seed: u64, count: usize) -> (Value, i32) {
    let results: Vec<SuiteResult> = match suite {
        Some(name) => {
            if !SUITE_NAMES.contains(&name) {
                return (
                    json!({"error": format!(
                        "unknown suite {name:?}; available: {}",
                        SUITE_NAMES.join(", ")
                    )}),
                    EXIT_USAGE,
                );
            }
            vec![run_suite(name, seed, count)]
        }
        None => run_all(seed, count),
    };
    let all_pass = results.iter().all(|r| r.passed());
    let out = json!({
        "kind": "verify",
        "seed": seed,
        "cases_per_suite": count,
        "suites": results.iter().map(|r| json!({
            "name": r.name,
            "cases": r.cases,
            "passed": r.passed(),
            "failures": r.failures,
        })).collect::<Vec<_>>(),
        "all_passed": all_pass,
    });
    (out, if all_pass { EXIT_OK } else { EXIT_INCONSISTENT })
}

/// Flat per-row summary of a JSON report, for plotting.
pub fn to_csv(report: &Value) -> String {
    let mut out = String::new();
    match report["kind"].as_str() {
        Some("analysis") => {
            out.push_str("step,n_pre,n_post,status\n");
            for s in report["slices"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    s["step"].as_str().unwrap_or(""),
                    s["pre"].as_array().map(|a| a.len()).unwrap_or(0),
                    s["post"].as_array().map(|a| a.len()).unwrap_or(0),
                    s["status"].as_str().unwrap_or(""),
                ));
            }
        }
        Some("local_run") => {
            out.push_str("move_index,kind,post_count\n");
            for m in report["moves"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    m["move_index"],
                    m["kind"].as_str().unwrap_or(""),
                    m["post_count"],
                ));
            }
        }
        Some("evolution") => {
            out.push_str("step,x,p\n");
            for t in report["trace"].as_array().into_iter().flatten() {
                let fmt = |v: &Value| {
                    v.as_array()
                        .map(|a| {
                            a.iter()
                                .map(|e| match e {
                                    Value::String(s) => s.clone(),
                                    other => other.to_string(),
                                })
                                .collect::<Vec<_>>()
                                .join(";")
                        })
                        .unwrap_or_default()
                };
                out.push_str(&format!(
                    "{},{},{}\n",
                    t["step"].as_str().unwrap_or(""),
                    fmt(&t["x"]),
                    fmt(&t["p"]),
                ));
            }
        }
        Some("dof") => {
            out.push_str("i,f,propagating,reduced_dimension\n");
            out.push_str(&format!(
                "{},{},{},{}\n",
                report["i"],
                report["f"],
                report["propagating"],
                report
                    .get("reduced_dimension")
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            ));
        }
        Some("verify") => {
            out.push_str("suite,cases,passed,failures\n");
            for s in report["suites"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    s["name"].as_str().unwrap_or(""),
                    s["cases"],
                    s["passed"],
                    s["failures"].as_array().map(|a| a.len()).unwrap_or(0),
                ));
            }
        }
        _ => out.push_str(&report.to_string()),
    }
    out
}
