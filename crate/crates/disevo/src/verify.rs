//! Seeded randomized checks of the structural theorems. Each suite draws
//! its own deterministic stream of small-integer quadratic actions, so runs
//! are reproducible byte for byte; all checks are exact in rational
//! arithmetic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{build_action, hessian_at, QuadraticAction, Role, RoleMap, Slice};
use crate::analysis::poisson_bracket;
use crate::evolution::{effective_action, fold_effective, forward_evolve, Schedule};
use crate::legendre::{post_constraints, post_legendre, pre_constraints, pre_legendre};
use crate::linalg::{affine_solve, dot, vec_add, vec_sub, Mat};
use crate::local_moves::{
    extend_phase_space, extended_canonical_update, momentum_update_full, ExtendedState, MoveKind,
    MoveSpec, UpdateParams,
};
use crate::scalar::{Rat, Scalar};

pub const SUITE_NAMES: [&str; 7] = [
    "subalgebra",
    "presymplectic",
    "move-update",
    "lhr",
    "commuting",
    "counting",
    "extended",
];

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn ri(n: i64) -> Rat {
    Rat::from_int(n)
}

fn rand_vec(rng: &mut ChaCha8Rng, q: usize, lo: i64, hi: i64) -> Vec<Rat> {
    (0..q).map(|_| ri(rng.gen_range(lo..=hi))).collect()
}

#[allow(clippy::type_complexity)]
fn rand_blocks(
    rng: &mut ChaCha8Rng,
    qp: usize,
    qn: usize,
    diag_boost: i64,
) -> (Mat<Rat>, Mat<Rat>, Mat<Rat>, Vec<Rat>, Vec<Rat>) {
    let a = Mat::from_fn(qp, qp, |i, j| {
        ri(rng.gen_range(-2..=2) + if i == j { diag_boost } else { 0 })
    })
    .symmetrize();
    let b = Mat::from_fn(qp, qn, |_, _| ri(rng.gen_range(-2..=2)));
    let c = Mat::from_fn(qn, qn, |i, j| {
        ri(rng.gen_range(-2..=2) + if i == j { diag_boost } else { 0 })
    })
    .symmetrize();
    let a_lin = rand_vec(rng, qp, -2, 2);
    let c_lin = rand_vec(rng, qn, -2, 2);
    (a, b, c, a_lin, c_lin)
}

fn rand_action(
    rng: &mut ChaCha8Rng,
    prev: Slice,
    next: Slice,
    diag_boost: i64,
) -> QuadraticAction<Rat> {
    let (qp, qn) = (prev.dim(), next.dim());
    let (a, b, c, a_lin, c_lin) = rand_blocks(rng, qp, qn, diag_boost);
    build_action(prev, next, a, b, c, a_lin, c_lin, ri(0)).unwrap()
}

fn pairing(du: &(Vec<Rat>, Vec<Rat>), dv: &(Vec<Rat>, Vec<Rat>)) -> Rat {
    dot(&du.0, &dv.1) - dot(&du.1, &dv.0)
}

/// (a) All mutual brackets inside the pre-set vanish, likewise the post-set.
fn suite_subalgebra(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let qp = rng.gen_range(1..=4);
    let qn = rng.gen_range(1..=4);
    let s = rand_action(rng, Slice::numbered("0", "u", qp), Slice::numbered("1", "v", qn), 0);
    for set in [pre_constraints(&s), post_constraints(&s)] {
        for i in 0..set.len() {
            for j in 0..set.len() {
                let b = poisson_bracket(&set.constraints[i], &set.constraints[j]).unwrap();
                if !b.is_negligible() {
                    failures.push(format!("case {case}: internal bracket {b} != 0"));
                }
            }
        }
    }
}

/// (b) Forward evolution preserves the symplectic pairing of pre-surface
/// tangents, and the λ-directions pair to zero with every image tangent.
fn suite_presymplectic(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let qp = rng.gen_range(1..=3);
    let qn = rng.gen_range(1..=3);
    let s = rand_action(rng, Slice::numbered("0", "u", qp), Slice::numbered("1", "v", qn), 0);
    let n_lam = post_constraints(&s).len();
    let lam = vec![ri(0); n_lam];
    let xp = rand_vec(rng, qp, -3, 3);
    let xn = rand_vec(rng, qn, -3, 3);
    let base = pre_legendre(&s, &xp, &xn);
    let Ok(img) = forward_evolve(&s, &base, &lam) else {
        failures.push(format!("case {case}: on-surface point rejected"));
        return;
    };
    let shift = |dxp: &Vec<Rat>, dxn: &Vec<Rat>| {
        let pt = pre_legendre(&s, &vec_add(&xp, dxp), &vec_add(&xn, dxn));
        let tangent = (vec_sub(&pt.x, &base.x), vec_sub(&pt.p, &base.p));
        let im = forward_evolve(&s, &pt, &lam).unwrap();
        let image = (vec_sub(&im.x, &img.x), vec_sub(&im.p, &img.p));
        (tangent, image)
    };
    let (du, du_img) = shift(&rand_vec(rng, qp, -2, 2), &rand_vec(rng, qn, -2, 2));
    let (dv, dv_img) = shift(&rand_vec(rng, qp, -2, 2), &rand_vec(rng, qn, -2, 2));
    if pairing(&du, &dv) != pairing(&du_img, &dv_img) {
        failures.push(format!("case {case}: pairing not preserved"));
    }
    // λ-direction (R, C·R) is degenerate against the image.
    for c in &post_constraints(&s).constraints {
        let dir = (c.gp.clone(), s.c_blk.mul_vec(&c.gp));
        for img_t in [&du_img, &dv_img] {
            if !pairing(&dir, img_t).is_negligible() {
                failures.push(format!("case {case}: λ-direction not degenerate"));
            }
        }
    }
}

fn rand_move(rng: &mut ChaCha8Rng, kind: MoveKind) -> MoveSpec<Rat> {
    let (n_o, n_e, n_n) = match kind {
        MoveKind::I => (0, rng.gen_range(1..=2), rng.gen_range(1..=2)),
        MoveKind::II => (rng.gen_range(1..=2), rng.gen_range(1..=2), 0),
        MoveKind::III => {
            let k = rng.gen_range(1..=2);
            (k, rng.gen_range(1..=2), k)
        }
        MoveKind::IV => (0, rng.gen_range(1..=3), 0),
    };
    let o: Vec<String> = (0..n_o).map(|i| format!("o{}", i + 1)).collect();
    let e: Vec<String> = (0..n_e).map(|i| format!("e{}", i + 1)).collect();
    let n: Vec<String> = (0..n_n).map(|i| format!("n{}", i + 1)).collect();
    // k side: o always, e only for pure removals.
    let (prev_vars, next_vars): (Vec<String>, Vec<String>) = if kind == MoveKind::II {
        (o.iter().chain(&e).cloned().collect(), vec![])
    } else {
        (o.clone(), e.iter().chain(&n).cloned().collect())
    };
    let prev = Slice::new("k", prev_vars).unwrap();
    let next = Slice::new("k", next_vars).unwrap();
    let action = rand_action(rng, prev, next, 0);
    let mut roles: Vec<(String, Role)> = Vec::new();
    roles.extend(o.iter().map(|l| (l.clone(), Role::O)));
    roles.extend(e.iter().map(|l| (l.clone(), Role::E)));
    roles.extend(n.iter().map(|l| (l.clone(), Role::N)));
    MoveSpec::new(kind, RoleMap::new(roles).unwrap(), action).unwrap()
}

/// (c) On the move's constraint surface, momentum updating coincides with
/// the extended canonical transformation (which is exactly symplectic), and
/// the emitted constraint sets hold where they should.
fn suite_move_update(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let kind = match case % 4 {
        0 => MoveKind::I,
        1 => MoveKind::II,
        2 => MoveKind::III,
        _ => MoveKind::IV,
    };
    let mv = rand_move(rng, kind);
    let (labels, g, lin, _) = mv.action.as_joint_form();
    let old = mv.old_labels();
    let new = mv.new_labels();
    let slice_vars: Vec<String> = labels.iter().filter(|l| !new.contains(l)).cloned().collect();
    let slice = Slice::new("k", slice_vars).unwrap();
    let q = slice.dim();
    let x = rand_vec(rng, q, -3, 3);
    let mut p = rand_vec(rng, q, -3, 3);
    // Target values for the new variables; for type III they also determine
    // the o-momenta putting the state on the pre-surface.
    let xn_star = rand_vec(rng, new.len(), -3, 3);
    let z: Vec<Rat> = labels
        .iter()
        .map(|l| {
            if let Some(k) = new.iter().position(|m| m == l) {
                xn_star[k].clone()
            } else {
                x[slice.index_of(l).unwrap()].clone()
            }
        })
        .collect();
    let grad = vec_add(&g.mul_vec(&z), &lin);
    for (i, l) in labels.iter().enumerate() {
        if old.contains(l) {
            p[slice.index_of(l).unwrap()] = -grad[i].clone();
        }
    }
    let state = ExtendedState::fresh(slice, x, p);
    let mut params = UpdateParams::default();
    for (k, l) in new.iter().enumerate() {
        params.n_values.insert(l.clone(), xn_star[k].clone());
    }
    let out = match momentum_update_full(&mv, &state, &params) {
        Ok(o) => o,
        Err(e) => {
            failures.push(format!("case {case}: on-surface update failed: {e}"));
            return;
        }
    };
    if !out.emitted_pre.satisfied_at(&state.point.x, &state.point.p) {
        failures.push(format!("case {case}: emitted pre-constraints violated at k"));
    }
    if !out
        .emitted_post
        .satisfied_at(&out.state.point.x, &out.state.point.p)
    {
        failures.push(format!("case {case}: emitted post-constraints violated at k+1"));
    }
    // Reference: extend by the values the update actually chose, then apply
    // the full-gradient shift.
    let mut reference = extend_phase_space(&state, &new, &[]).unwrap();
    for l in &new {
        let j = reference.point.slice.index_of(l).unwrap();
        let j_out = out.state.point.slice.index_of(l).unwrap();
        reference.point.x[j] = out.state.point.x[j_out].clone();
    }
    let reference = extended_canonical_update(&mv, &reference).unwrap();
    for l in &out.state.point.slice.vars {
        let a = out.state.point.slice.index_of(l).unwrap();
        let b = reference.point.slice.index_of(l).unwrap();
        if out.state.point.x[a] != reference.point.x[b]
            || out.state.point.p[a] != reference.point.p[b]
        {
            failures.push(format!("case {case}: momentum update deviates at {l}"));
            return;
        }
    }
}

/// (d) {⁻C_l, ⁺C_r} = Lᵀ H R with H the middle-slice Hessian.
fn suite_lhr(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let q0 = rng.gen_range(1..=3);
    let q1 = rng.gen_range(1..=3);
    let q2 = rng.gen_range(1..=3);
    let mid = Slice::numbered("1", "m", q1);
    let s1 = rand_action(rng, Slice::numbered("0", "u", q0), mid.clone(), 0);
    let s2 = rand_action(rng, mid, Slice::numbered("2", "w", q2), 0);
    let h = hessian_at(&s1, &s2).unwrap();
    for pre in &pre_constraints(&s2).constraints {
        for post in &post_constraints(&s1).constraints {
            let b = poisson_bracket(pre, post).unwrap();
            let lhr = dot(&pre.gp, &h.mul_vec(&post.gp));
            if b != lhr {
                failures.push(format!("case {case}: bracket {b} != contraction {lhr}"));
            }
        }
    }
}

/// (e) Stepwise and effective boundary momenta agree on bulk solutions.
fn suite_commuting(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let q0 = rng.gen_range(1..=3);
    let q1 = rng.gen_range(1..=3);
    let q2 = rng.gen_range(1..=3);
    let mid = Slice::numbered("1", "m", q1);
    let s1 = rand_action(rng, Slice::numbered("0", "u", q0), mid.clone(), 6);
    let s2 = rand_action(rng, mid, Slice::numbered("2", "w", q2), 6);
    let x0 = rand_vec(rng, q0, -3, 3);
    let x2 = rand_vec(rng, q2, -3, 3);
    let h = hessian_at(&s1, &s2).unwrap();
    let zero1 = vec![ri(0); q1];
    let rhs: Vec<Rat> = vec_add(&s1.grad_next(&x0, &zero1), &s2.grad_prev(&zero1, &x2))
        .iter()
        .map(|v| -v.clone())
        .collect();
    let sol = match affine_solve(&h, &rhs) {
        Ok(s) if s.null_basis.is_empty() => s,
        _ => return, // diag boost makes this rare; skip degenerate draws
    };
    let x1 = sol.particular;
    let eff = effective_action(&s1, &s2).unwrap();
    if !eff.multipliers.is_empty() {
        return;
    }
    let p0_step = pre_legendre(&s1, &x0, &x1).p;
    let p2_step = post_legendre(&s2, &x1, &x2).p;
    let p0_eff = pre_legendre(&eff.action, &x0, &x2).p;
    let p2_eff = post_legendre(&eff.action, &x0, &x2).p;
    if p0_step != p0_eff || p2_step != p2_eff {
        failures.push(format!("case {case}: stepwise and effective momenta differ"));
    }
}

/// (f) The two propagating-direction formulas agree, and effective
/// constraint counts only grow as the schedule is extended.
fn suite_counting(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let n_moves = rng.gen_range(2..=3);
    let dims: Vec<usize> = (0..=n_moves).map(|_| rng.gen_range(1..=3)).collect();
    let moves: Vec<QuadraticAction<Rat>> = (0..n_moves)
        .map(|k| {
            rand_action(
                rng,
                Slice::numbered(k.to_string(), &format!("s{k}v"), dims[k]),
                Slice::numbered((k + 1).to_string(), &format!("s{}v", k + 1), dims[k + 1]),
                6,
            )
        })
        .collect();
    let sched = Schedule::new(moves).unwrap();
    let mut last_pre = 0;
    for f in 1..sched.n_slices() {
        let eff = match fold_effective(&sched.moves[0..f]) {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("case {case}: fold failed: {e}"));
                return;
            }
        };
        let n_pre = eff.pre_set().len();
        let n_post = eff.post_set().len();
        let front = 2 * dims[0] as i64 - 2 * n_pre as i64;
        let back = 2 * dims[f] as i64 - 2 * n_post as i64;
        if front != back {
            failures.push(format!("case {case}: N formulas disagree ({front} vs {back})"));
        }
        if n_pre < last_pre {
            failures.push(format!("case {case}: pre-constraint count dropped at {f}"));
        }
        last_pre = n_pre;
    }
}

/// (g) The extended canonical update preserves the full-space pairing.
fn suite_extended(rng: &mut ChaCha8Rng, failures: &mut Vec<String>, case: usize) {
    let kind = match case % 4 {
        0 => MoveKind::I,
        1 => MoveKind::II,
        2 => MoveKind::III,
        _ => MoveKind::IV,
    };
    let mv = rand_move(rng, kind);
    let (labels, _, _, _) = mv.action.as_joint_form();
    let slice = Slice::new("k", labels).unwrap();
    let q = slice.dim();
    let base = ExtendedState::fresh(slice.clone(), rand_vec(rng, q, -3, 3), rand_vec(rng, q, -3, 3));
    let img = extended_canonical_update(&mv, &base).unwrap();
    let push = |dx: Vec<Rat>, dp: Vec<Rat>| {
        let shifted = ExtendedState::fresh(
            slice.clone(),
            vec_add(&base.point.x, &dx),
            vec_add(&base.point.p, &dp),
        );
        let im = extended_canonical_update(&mv, &shifted).unwrap();
        (
            (dx, dp),
            (vec_sub(&im.point.x, &img.point.x), vec_sub(&im.point.p, &img.point.p)),
        )
    };
    let (du, du_img) = push(rand_vec(rng, q, -2, 2), rand_vec(rng, q, -2, 2));
    let (dv, dv_img) = push(rand_vec(rng, q, -2, 2), rand_vec(rng, q, -2, 2));
    if pairing(&du, &dv) != pairing(&du_img, &dv_img) {
        failures.push(format!("case {case}: full-space pairing not preserved"));
    }
}

pub fn run_suite(name: &str, seed: u64, count: usize) -> SuiteResult {
    let index = SUITE_NAMES
        .iter()
        .position(|&n| n == name)
        .unwrap_or_else(|| panic!("unknown suite {name:?}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64 * 0x9e37_79b9));
    let mut failures = Vec::new();
    for case in 0..count {
        match name {
            "subalgebra" => suite_subalgebra(&mut rng, &mut failures, case),
            "presymplectic" => suite_presymplectic(&mut rng, &mut failures, case),
            "move-update" => suite_move_update(&mut rng, &mut failures, case),
            "lhr" => suite_lhr(&mut rng, &mut failures, case),
            "commuting" => suite_commuting(&mut rng, &mut failures, case),
            "counting" => suite_counting(&mut rng, &mut failures, case),
            "extended" => suite_extended(&mut rng, &mut failures, case),
            _ => unreachable!(),
        }
        if failures.len() > 20 {
            break;
        }
    }
    SuiteResult {
        name: name.to_string(),
        cases: count,
        failures,
    }
}

pub fn run_all(seed: u64, count: usize) -> Vec<SuiteResult> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n, seed, count))
        .collect()
}
