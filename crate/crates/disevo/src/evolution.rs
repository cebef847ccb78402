//! Global Hamiltonian evolution: the (multivalued, partially defined) step
//! map with its a priori/a posteriori free parameters, effective actions by
//! bulk elimination, and forward/backward constraint propagation across a
//! schedule of moves.

use thiserror::Error;

use crate::action::{build_action, hessian_at, ActionError, QuadraticAction, Slice};
use crate::legendre::{
    post_constraints, pre_constraints, AddOutcome, AffineConstraint, ConstraintSet,
    ConstraintTag, MomentumTag, PhasePoint, Provenance,
};
use crate::linalg::{
    affine_solve, dot, solve_affine_symbolic, vec_add, vec_is_zero, vec_neg, vec_scale, Mat,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("data violates the pre-constraint surface; residuals {0:?}")]
    OffConstraintSurface(Vec<String>),
    #[error("expected {expected} free parameter(s), got {got}")]
    MissingParameter { expected: usize, got: usize },
    #[error("combined constraints at slice {0:?} cannot be simultaneously satisfied")]
    Inconsistent(String),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// The affine step map of one move: x_next = Mx·x + Mp·p + x0 + Σ λ_r R_r,
/// p_next from the post-Legendre transform. Defined exactly on the
/// pre-constraint surface (the listed conditions).
#[derive(Debug, Clone)]
pub struct EvolutionMap<S> {
    pub source: Slice,
    pub target: Slice,
    pub x_from_x: Mat<S>,
    pub x_from_p: Mat<S>,
    pub x_const: Vec<S>,
    /// (λ-label, right-null direction) pairs, in kernel basis order.
    pub free_directions: Vec<(String, Vec<S>)>,
}

pub fn build_evolution_map<S: Scalar>(s: &QuadraticAction<S>) -> EvolutionMap<S> {
    let qp = s.prev.dim();
    // Solve B x_next = −A x_prev − I p − a with (x_prev, p) symbolic.
    let n = Mat::from_fn(qp, 2 * qp, |i, j| {
        if j < qp {
            -s.a_blk[(i, j)].clone()
        } else if j - qp == i {
            -S::one()
        } else {
            S::zero()
        }
    });
    let sym = solve_affine_symbolic(&s.b_blk, &n, &vec_neg(&s.a_lin));
    let qn = s.next.dim();
    let x_from_x = Mat::from_fn(qn, qp, |i, j| sym.linear[(i, j)].clone());
    let x_from_p = Mat::from_fn(qn, qp, |i, j| sym.linear[(i, qp + j)].clone());
    let free_directions = sym
        .free
        .iter()
        .enumerate()
        .map(|(r, v)| (format!("lambda{}", r + 1), v.clone()))
        .collect();
    EvolutionMap {
        source: s.prev.clone(),
        target: s.next.clone(),
        x_from_x,
        x_from_p,
        x_const: sym.constant,
        free_directions,
    }
}

fn check_lambda_count<S>(given: &[S], expected: usize) -> Result<(), EvolveError> {
    if given.len() != expected {
        Err(EvolveError::MissingParameter {
            expected,
            got: given.len(),
        })
    } else {
        Ok(())
    }
}

/// Solves the pre-momentum equation for x_next (adding Σλ_rR_r) and returns
/// the post-Legendre point. Errors if the data is off the pre-constraint
/// surface or the λ count is wrong.
pub fn forward_evolve<S: Scalar>(
    s: &QuadraticAction<S>,
    pt: &PhasePoint<S>,
    lambdas: &[S],
) -> Result<PhasePoint<S>, EvolveError> {
    assert!(pt.slice.same_vars(&s.prev), "point must live at s.prev");
    let pres = pre_constraints(s);
    if !pres.satisfied_at(&pt.x, &pt.p) {
        let res = pres
            .residuals(&pt.x, &pt.p)
            .iter()
            .map(|r| r.to_string())
            .collect();
        return Err(EvolveError::OffConstraintSurface(res));
    }
    let rhs = vec_neg(&vec_add(&vec_add(&pt.p, &s.a_blk.mul_vec(&pt.x)), &s.a_lin));
    let sol = affine_solve(&s.b_blk, &rhs).map_err(|inf| {
        EvolveError::OffConstraintSurface(vec![format!(
            "certificate {:?}",
            inf.certificate.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        )])
    })?;
    check_lambda_count(lambdas, sol.null_basis.len())?;
    let mut x_next = sol.particular;
    for (lam, dir) in lambdas.iter().zip(&sol.null_basis) {
        x_next = vec_add(&x_next, &vec_scale(dir, lam));
    }
    Ok(PhasePoint::new(
        s.next.clone(),
        x_next.clone(),
        s.grad_next(&pt.x, &x_next),
        MomentumTag::Post,
    ))
}

/// Mirror of [`forward_evolve`]: solves the post-momentum equation for
/// x_prev (adding Σμ_lL_l) and returns the pre-Legendre point.
pub fn backward_evolve<S: Scalar>(
    s: &QuadraticAction<S>,
    pt: &PhasePoint<S>,
    mus: &[S],
) -> Result<PhasePoint<S>, EvolveError> {
    assert!(pt.slice.same_vars(&s.next), "point must live at s.next");
    let posts = post_constraints(s);
    if !posts.satisfied_at(&pt.x, &pt.p) {
        let res = posts
            .residuals(&pt.x, &pt.p)
            .iter()
            .map(|r| r.to_string())
            .collect();
        return Err(EvolveError::OffConstraintSurface(res));
    }
    let rhs = {
        let cx = s.c_blk.mul_vec(&pt.x);
        pt.p
            .iter()
            .zip(cx.iter().zip(&s.c_lin))
            .map(|(p, (c, l))| p.clone() - c.clone() - l.clone())
            .collect::<Vec<_>>()
    };
    let sol = affine_solve(&s.b_blk.transpose(), &rhs).map_err(|inf| {
        EvolveError::OffConstraintSurface(vec![format!(
            "certificate {:?}",
            inf.certificate.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        )])
    })?;
    check_lambda_count(mus, sol.null_basis.len())?;
    let mut x_prev = sol.particular;
    for (mu, dir) in mus.iter().zip(&sol.null_basis) {
        x_prev = vec_add(&x_prev, &vec_scale(dir, mu));
    }
    Ok(PhasePoint::new(
        s.prev.clone(),
        x_prev.clone(),
        vec_neg(&s.grad_prev(&x_prev, &pt.x)),
        MomentumTag::Pre,
    ))
}

/// Effective move over the outer boundary, possibly carrying multiplier
/// variables for boundary-data constraints on an auxiliary part of the next
/// slice.
#[derive(Debug, Clone)]
pub struct EffectiveMove<S> {
    pub action: QuadraticAction<S>,
    /// Multiplier labels appended to `action.next`; excluded from counting.
    pub multipliers: Vec<String>,
}

impl<S: Scalar> EffectiveMove<S> {
    pub fn regular(action: QuadraticAction<S>) -> Self {
        EffectiveMove {
            action,
            multipliers: Vec::new(),
        }
    }

    /// The next slice with multiplier variables stripped.
    pub fn physical_next(&self) -> Slice {
        let vars: Vec<String> = self
            .action
            .next
            .vars
            .iter()
            .filter(|v| !self.multipliers.contains(v))
            .cloned()
            .collect();
        Slice {
            step_label: self.action.next.step_label.clone(),
            vars,
        }
    }

    pub fn pre_set(&self) -> ConstraintSet<S> {
        pre_constraints(&self.action)
    }

    /// Post-constraints projected onto the physical variables.
    pub fn post_set(&self) -> ConstraintSet<S> {
        let raw = post_constraints(&self.action);
        if self.multipliers.is_empty() {
            return raw;
        }
        let positions: Vec<usize> = self
            .action
            .next
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| self.multipliers.contains(v))
            .map(|(i, _)| i)
            .collect();
        raw.eliminate_positions(&positions, self.physical_next())
    }
}

/// Integrates out the shared bulk slice. `s_in.next` is the bulk; every
/// `s_out.prev` variable must appear there (multipliers from a previous
/// composition are eliminated like any other bulk variable). If the bulk
/// Hessian is singular, each non-trivial solvability condition becomes a
/// boundary-data constraint enforced by a multiplier variable κ_h appended
/// to the next slice.
pub fn effective_action<S: Scalar>(
    s_in: &QuadraticAction<S>,
    s_out: &QuadraticAction<S>,
) -> Result<EffectiveMove<S>, EvolveError> {
    let bulk = &s_in.next;
    let qm = bulk.dim();
    let qp = s_in.prev.dim();
    let qn = s_out.next.dim();
    // Embed s_out's prev-coupled blocks into bulk coordinates.
    let embed: Vec<usize> = s_out
        .prev
        .vars
        .iter()
        .map(|v| {
            bulk.index_of(v).ok_or_else(|| {
                EvolveError::Action(ActionError::SliceMismatch(format!(
                    "bulk slice is missing {v:?}"
                )))
            })
        })
        .collect::<Result<_, _>>()?;
    let mut a_out = Mat::zeros(qm, qm);
    let mut b_out = Mat::zeros(qm, qn);
    let mut a_lin_out = vec![S::zero(); qm];
    for (i, &gi) in embed.iter().enumerate() {
        for (j, &gj) in embed.iter().enumerate() {
            a_out[(gi, gj)] = s_out.a_blk[(i, j)].clone();
        }
        for j in 0..qn {
            b_out[(gi, j)] = s_out.b_blk[(i, j)].clone();
        }
        a_lin_out[gi] = s_out.a_lin[i].clone();
    }

    let h = s_in.c_blk.add(&a_out);
    let d = vec_add(&s_in.c_lin, &a_lin_out);
    // Bulk stationarity: H x_m = −B_inᵀ x_p − B_out x_n − d.
    let coeff = Mat::from_fn(qm, qp + qn, |i, j| {
        if j < qp {
            -s_in.b_blk[(j, i)].clone()
        } else {
            -b_out[(i, j - qp)].clone()
        }
    });
    let sym = solve_affine_symbolic(&h, &coeff, &vec_neg(&d));

    // Substitute x_m = L·(x_p; x_n) + x0 into S_in + S_out.
    let total = qp + qm + qn;
    let mut g = Mat::zeros(total, total);
    let mut lin = vec![S::zero(); total];
    for i in 0..qp {
        for j in 0..qp {
            g[(i, j)] = s_in.a_blk[(i, j)].clone();
        }
        for j in 0..qm {
            g[(i, qp + j)] = s_in.b_blk[(i, j)].clone();
            g[(qp + j, i)] = s_in.b_blk[(i, j)].clone();
        }
        lin[i] = s_in.a_lin[i].clone();
    }
    for i in 0..qm {
        for j in 0..qm {
            g[(qp + i, qp + j)] = h[(i, j)].clone();
        }
        for j in 0..qn {
            g[(qp + i, qp + qm + j)] = b_out[(i, j)].clone();
            g[(qp + qm + j, qp + i)] = b_out[(i, j)].clone();
        }
        lin[qp + i] = d[i].clone();
    }
    for i in 0..qn {
        for j in 0..qn {
            g[(qp + qm + i, qp + qm + j)] = s_out.c_blk[(i, j)].clone();
        }
        lin[qp + qm + i] = s_out.c_lin[i].clone();
    }
    let s0 = s_in.s0.clone() + s_out.s0.clone();

    // T maps y = (x_p; x_n) to (x_p; x_m; x_n); t0 is the constant offset.
    let t = Mat::from_fn(total, qp + qn, |i, j| {
        if i < qp {
            if i == j {
                S::one()
            } else {
                S::zero()
            }
        } else if i < qp + qm {
            sym.linear[(i - qp, j)].clone()
        } else if j >= qp && i - qp - qm == j - qp {
            S::one()
        } else {
            S::zero()
        }
    });
    let mut t0 = vec![S::zero(); total];
    t0[qp..qp + qm].clone_from_slice(&sym.constant[..qm]);

    let tg = t.transpose().mul_mat(&g);
    let q_eff = tg.mul_mat(&t);
    let lin_eff = vec_add(&tg.mul_vec(&t0), &t.transpose().mul_vec(&lin)).to_vec();
    // Careful: TᵀG t0 counts the quadratic cross term once; the symmetric
    // expansion of ½(Ty+t0)ᵀG(Ty+t0) puts TᵀGt0 (not half) into the linear
    // part because G is symmetric.
    let half = S::from_ratio(1, 2);
    let s0_eff =
        dot(&t0, &g.mul_vec(&t0)) * half.clone() + dot(&lin, &t0) + s0;

    // Boundary-data constraints from rank-deficient bulk rows.
    let conditions: Vec<(Vec<S>, S)> = sym.conditions;
    let n_kappa = conditions.len();
    let mut next_vars = s_out.next.vars.clone();
    let mut multipliers = Vec::new();
    for hidx in 0..n_kappa {
        let mut label = format!("kappa{}", hidx + 1);
        while next_vars.contains(&label) || s_in.prev.vars.contains(&label) {
            label.push('\'');
        }
        multipliers.push(label.clone());
        next_vars.push(label);
    }

    let a_eff = Mat::from_fn(qp, qp, |i, j| q_eff[(i, j)].clone());
    let b_eff = Mat::from_fn(qp, qn + n_kappa, |i, j| {
        if j < qn {
            q_eff[(i, qp + j)].clone()
        } else {
            // Coupling x_p to κ_h: the x_p part of condition h.
            conditions[j - qn].0[i].clone()
        }
    });
    let c_eff = Mat::from_fn(qn + n_kappa, qn + n_kappa, |i, j| {
        if i < qn && j < qn {
            q_eff[(qp + i, qp + j)].clone()
        } else if i < qn && j >= qn {
            conditions[j - qn].0[qp + i].clone()
        } else if i >= qn && j < qn {
            conditions[i - qn].0[qp + j].clone()
        } else {
            S::zero()
        }
    });
    let a_lin_eff = lin_eff[..qp].to_vec();
    let mut c_lin_eff = lin_eff[qp..].to_vec();
    for (_, c0) in &conditions {
        c_lin_eff.push(c0.clone());
    }

    let prev = s_in.prev.clone();
    let next = Slice::new(s_out.next.step_label.clone(), next_vars)?;
    let action = build_action(prev, next, a_eff, b_eff, c_eff, a_lin_eff, c_lin_eff, s0_eff)?;
    Ok(EffectiveMove {
        action,
        multipliers,
    })
}

/// Folds a run of moves into one effective move over the outer boundary.
pub fn fold_effective<S: Scalar>(
    moves: &[QuadraticAction<S>],
) -> Result<EffectiveMove<S>, EvolveError> {
    assert!(!moves.is_empty(), "empty schedule segment");
    let mut acc = EffectiveMove::regular(moves[0].clone());
    for next in &moves[1..] {
        acc = effective_action(&acc.action, next)?;
    }
    Ok(acc)
}

/// Ordered run of moves over slices 0..K; consecutive moves share their
/// boundary slice variables.
#[derive(Debug, Clone)]
pub struct Schedule<S> {
    pub moves: Vec<QuadraticAction<S>>,
}

impl<S: Scalar> Schedule<S> {
    pub fn new(moves: Vec<QuadraticAction<S>>) -> Result<Self, ActionError> {
        if moves.is_empty() {
            return Err(ActionError::SliceMismatch(
                "schedule must contain at least one move".into(),
            ));
        }
        for w in moves.windows(2) {
            if !w[0].next.same_vars(&w[1].prev) {
                return Err(ActionError::SliceMismatch(format!(
                    "move boundary {:?} vs {:?}",
                    w[0].next.vars, w[1].prev.vars
                )));
            }
        }
        Ok(Schedule { moves })
    }

    pub fn n_slices(&self) -> usize {
        self.moves.len() + 1
    }

    pub fn slice(&self, n: usize) -> &Slice {
        if n == 0 {
            &self.moves[0].prev
        } else {
            &self.moves[n - 1].next
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceStatus {
    Consistent,
    FixesParameters,
    Inconsistent,
}

#[derive(Debug, Clone)]
pub struct SliceReport<S> {
    pub slice: Slice,
    pub pre: ConstraintSet<S>,
    pub post: ConstraintSet<S>,
    pub status: SliceStatus,
}

impl<S: Scalar> SliceReport<S> {
    /// Pre and post constraints merged into one irreducible set.
    pub fn combined(&self) -> ConstraintSet<S> {
        let mut set = self.pre.clone();
        for c in &self.post.constraints {
            set.insert_reduced(c.clone());
        }
        set
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintReport<S> {
    pub slices: Vec<SliceReport<S>>,
    pub sweeps_used: usize,
}

impl<S: Scalar> ConstraintReport<S> {
    pub fn is_consistent(&self) -> bool {
        self.slices
            .iter()
            .all(|s| s.status != SliceStatus::Inconsistent)
    }

    pub fn first_inconsistent_slice(&self) -> Option<&SliceReport<S>> {
        self.slices
            .iter()
            .find(|s| s.status == SliceStatus::Inconsistent)
    }
}

struct SymbolicMaps<S> {
    forward: crate::linalg::SymbolicSolution<S>,
    backward: crate::linalg::SymbolicSolution<S>,
}

fn symbolic_maps<S: Scalar>(s: &QuadraticAction<S>) -> SymbolicMaps<S> {
    let qp = s.prev.dim();
    let qn = s.next.dim();
    // Forward: B x_n = −A x_p − p − a, symbolic in (x_p, p).
    let nf = Mat::from_fn(qp, 2 * qp, |i, j| {
        if j < qp {
            -s.a_blk[(i, j)].clone()
        } else if j - qp == i {
            -S::one()
        } else {
            S::zero()
        }
    });
    let forward = solve_affine_symbolic(&s.b_blk, &nf, &vec_neg(&s.a_lin));
    // Backward: Bᵀ x_p = −C x_n + p − c, symbolic in (x_n, p).
    let nb = Mat::from_fn(qn, 2 * qn, |i, j| {
        if j < qn {
            -s.c_blk[(i, j)].clone()
        } else if j - qn == i {
            S::one()
        } else {
            S::zero()
        }
    });
    let backward = solve_affine_symbolic(&s.b_blk.transpose(), &nb, &vec_neg(&s.c_lin));
    SymbolicMaps { forward, backward }
}

/// Computes primary constraints per move, then alternates backward and
/// forward sweeps: pull downstream pre-constraints through each step map
/// (new independent results become secondary pre-constraints upstream) and
/// push upstream post-constraints (secondary post-constraints downstream).
/// Constraints whose pullback depends on a free parameter fix that parameter
/// instead of propagating.
pub fn match_and_propagate<S: Scalar>(schedule: &Schedule<S>) -> ConstraintReport<S> {
    let k = schedule.moves.len();
    let mut pre: Vec<ConstraintSet<S>> = Vec::new();
    let mut post: Vec<ConstraintSet<S>> = Vec::new();
    for n in 0..=k {
        let slice = schedule.slice(n).clone();
        pre.push(if n < k {
            pre_constraints(&schedule.moves[n])
        } else {
            ConstraintSet::empty(slice.clone())
        });
        post.push(if n > 0 {
            post_constraints(&schedule.moves[n - 1])
        } else {
            ConstraintSet::empty(slice)
        });
    }
    let maps: Vec<SymbolicMaps<S>> = schedule.moves.iter().map(symbolic_maps).collect();
    let mut fixes = vec![false; k + 1];
    let mut inconsistent = vec![false; k + 1];

    let cap = 4 * k.max(1);
    let mut sweeps_used = 0;
    for _ in 0..cap {
        sweeps_used += 1;
        let mut changed = false;
        // Backward sweep: pull pre[n] through move n−1 (slice n−1 → n).
        for n in (1..=k).rev() {
            let mv = &schedule.moves[n - 1];
            let map = &maps[n - 1];
            let qp = mv.prev.dim();
            let mut new_cands = Vec::new();
            for c in &pre[n].constraints {
                // Constraint value at the image point:
                // (gx + C gp)·x_n + (B gp)·x_p + gp·c + c0, with x_n affine
                // in (x_p, p) plus free λ directions.
                let u = vec_add(&c.gx, &mv.c_blk.mul_vec(&c.gp));
                let lam_dep = map
                    .forward
                    .free
                    .iter()
                    .any(|r| !dot(&u, r).is_negligible_scaled(map.forward.scale));
                if lam_dep {
                    fixes[n] = true;
                    continue;
                }
                let lin = map.forward.linear.transpose().mul_vec(&u);
                let gx_up = vec_add(&lin[..qp], &mv.b_blk.mul_vec(&c.gp));
                let gp_up = lin[qp..].to_vec();
                let c0_up = dot(&u, &map.forward.constant)
                    + dot(&c.gp, &mv.c_lin)
                    + c.c0.clone();
                new_cands.push(AffineConstraint {
                    slice: mv.prev.clone(),
                    gx: gx_up,
                    gp: gp_up,
                    c0: c0_up,
                    tag: ConstraintTag::Pre,
                    provenance: Provenance::Secondary,
                });
            }
            for cand in new_cands {
                let trivial = vec_is_zero(&cand.gx, 1.0)
                    && vec_is_zero(&cand.gp, 1.0)
                    && cand.c0.is_negligible();
                if trivial {
                    continue;
                }
                match pre[n - 1].insert_reduced(cand) {
                    AddOutcome::Added => changed = true,
                    AddOutcome::Inconsistent => inconsistent[n - 1] = true,
                    AddOutcome::Dependent => {}
                }
            }
        }
        // Forward sweep: push post[n−1] through move n−1.
        for n in 1..=k {
            let mv = &schedule.moves[n - 1];
            let map = &maps[n - 1];
            let qn = mv.next.dim();
            let mut new_cands = Vec::new();
            for c in &post[n - 1].constraints {
                // Value in terms of the target data: x_p affine in (x_n, p_n)
                // plus free μ directions; p_p = −(A x_p + B x_n + a).
                let v: Vec<S> = {
                    let av = mv.a_blk.mul_vec(&c.gp);
                    c.gx
                        .iter()
                        .zip(&av)
                        .map(|(g, a)| g.clone() - a.clone())
                        .collect()
                };
                let mu_dep = map
                    .backward
                    .free
                    .iter()
                    .any(|l| !dot(&v, l).is_negligible_scaled(map.backward.scale));
                if mu_dep {
                    fixes[n - 1] = true;
                    continue;
                }
                let lin = map.backward.linear.transpose().mul_vec(&v);
                let bg = mv.b_blk.transpose().mul_vec(&c.gp);
                let mut gx_down = lin[..qn].to_vec();
                for i in 0..qn {
                    gx_down[i] = gx_down[i].clone() - bg[i].clone();
                }
                let gp_down = lin[qn..].to_vec();
                let c0_down = dot(&v, &map.backward.constant) - dot(&c.gp, &mv.a_lin)
                    + c.c0.clone();
                new_cands.push(AffineConstraint {
                    slice: mv.next.clone(),
                    gx: gx_down,
                    gp: gp_down,
                    c0: c0_down,
                    tag: ConstraintTag::Post,
                    provenance: Provenance::Secondary,
                });
            }
            for cand in new_cands {
                let trivial = vec_is_zero(&cand.gx, 1.0)
                    && vec_is_zero(&cand.gp, 1.0)
                    && cand.c0.is_negligible();
                if trivial {
                    continue;
                }
                match post[n].insert_reduced(cand) {
                    AddOutcome::Added => changed = true,
                    AddOutcome::Inconsistent => inconsistent[n] = true,
                    AddOutcome::Dependent => {}
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut slices = Vec::new();
    for n in 0..=k {
        let slice = schedule.slice(n).clone();
        let mut combined = pre[n].clone();
        let mut contradiction = inconsistent[n];
        for c in &post[n].constraints {
            if combined.insert_reduced(c.clone()) == AddOutcome::Inconsistent {
                contradiction = true;
            }
        }
        // Any nonzero mutual bracket in the combined set fixes parameters.
        let mut second_class = false;
        'outer: for (i, ci) in combined.constraints.iter().enumerate() {
            for cj in combined.constraints.iter().skip(i + 1) {
                let br = dot(&ci.gx, &cj.gp) - dot(&ci.gp, &cj.gx);
                if !br.is_negligible() {
                    second_class = true;
                    break 'outer;
                }
            }
        }
        let status = if contradiction {
            SliceStatus::Inconsistent
        } else if fixes[n] || second_class {
            SliceStatus::FixesParameters
        } else {
            SliceStatus::Consistent
        };
        slices.push(SliceReport {
            slice,
            pre: pre[n].clone(),
            post: post[n].clone(),
            status,
        });
    }
    ConstraintReport {
        slices,
        sweeps_used,
    }
}

/// Effective two-form check helper: for invertible H the two-form of the
/// effective move equals B_in H⁻¹ B_out (as the negated B-block).
pub fn effective_two_form_schur<S: Scalar>(
    s_in: &QuadraticAction<S>,
    s_out: &QuadraticAction<S>,
) -> Option<Mat<S>> {
    let h = hessian_at(s_in, s_out).ok()?;
    let qm = h.nrows();
    // Invert H column-wise; None if singular.
    let mut inv_cols = Vec::new();
    for j in 0..qm {
        let mut e = vec![S::zero(); qm];
        e[j] = S::one();
        let sol = affine_solve(&h, &e).ok()?;
        if !sol.null_basis.is_empty() {
            return None;
        }
        inv_cols.push(sol.particular);
    }
    let h_inv = Mat::from_fn(qm, qm, |i, j| inv_cols[j][i].clone());
    Some(s_in.b_blk.mul_mat(&h_inv).mul_mat(&s_out.b_blk))
}
